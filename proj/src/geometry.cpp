#include "zfem/geometry.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "zfem/errors.hpp"

namespace zfem {

double signed_area(const std::vector<Point2>& loop) {
  double twice = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    twice += cross(loop[i], loop[(i + 1) % loop.size()]);
  }
  return 0.5 * twice;
}

namespace {

// Orientation of (a, b, c) with a tolerance band around zero.
int orient(const Point2& a, const Point2& b, const Point2& c, double tol) {
  const double v = cross(b - a, c - a);
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p, double tol) {
  return std::min(a.x, b.x) - tol <= p.x && p.x <= std::max(a.x, b.x) + tol &&
         std::min(a.y, b.y) - tol <= p.y && p.y <= std::max(a.y, b.y) + tol;
}

bool segments_touch(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2,
                    double area_tol, double len_tol) {
  const int o1 = orient(p1, p2, q1, area_tol);
  const int o2 = orient(p1, p2, q2, area_tol);
  const int o3 = orient(q1, q2, p1, area_tol);
  const int o4 = orient(q1, q2, p2, area_tol);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(p1, p2, q1, len_tol)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2, len_tol)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1, len_tol)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2, len_tol)) return true;
  return false;
}

}  // namespace

Polygon::Polygon(std::vector<Point2> vertices, std::vector<std::size_t> ids)
    : vertices_(std::move(vertices)), ids_(std::move(ids)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw InvalidPolygon("polygon needs at least 3 vertices");
  if (!ids_.empty() && ids_.size() != n) throw InvalidPolygon("vertex id list does not match vertex count");
  for (const auto& v : vertices_) {
    if (!is_finite(v)) throw InvalidPolygon("non-finite vertex coordinate");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) diameter_ = std::max(diameter_, distance(vertices_[i], vertices_[j]));
  }
  if (!(diameter_ > 0.0)) throw InvalidPolygon("polygon has zero diameter");
  const double h = diameter_;
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(vertices_[i], vertices_[(i + 1) % n]) <= 1e-12 * h) {
      throw InvalidPolygon("consecutive vertices " + std::to_string(i) + " and " +
                           std::to_string((i + 1) % n) + " coincide");
    }
  }
  area_ = signed_area(vertices_);
  if (area_ <= 0.0) throw InvalidPolygon("polygon is not counterclockwise");

  const double area_tol = 1e-14 * h * h;
  const double len_tol = 1e-12 * h;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[(i + 1) % n];
    const Point2& c = vertices_[(i + 2) % n];
    // adjacent edges may be collinear (hanging nodes) but must not fold back
    if (orient(a, b, c, area_tol) == 0 && dot(b - a, c - b) < 0.0) {
      throw InvalidPolygon("boundary folds back at vertex " + std::to_string((i + 1) % n));
    }
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(a, b, vertices_[j], vertices_[(j + 1) % n], area_tol, len_tol)) {
        throw InvalidPolygon("edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      }
    }
  }

  edges_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Edge e;
    e.a = vertices_[i];
    e.b = vertices_[(i + 1) % n];
    const Point2 d = e.b - e.a;
    e.length = norm(d);
    e.normal = Point2{d.y, -d.x} / e.length;
    e.offset = dot(e.normal, e.a);
    edges_.push_back(e);
  }
}

Point2 Polygon::centroid() const {
  Point2 c;
  for (std::size_t i = 0; i < size(); ++i) {
    const Point2& a = vertex(i);
    const Point2& b = vertex(i + 1);
    c += (a + b) * cross(a, b);
  }
  return c / (6.0 * area_);
}

bool Polygon::is_convex() const {
  const double tol = 1e-14 * diameter_ * diameter_;
  for (std::size_t i = 0; i < size(); ++i) {
    if (cross(vertex(i + 1) - vertex(i), vertex(i + 2) - vertex(i + 1)) < -tol) return false;
  }
  return true;
}

double kernel_margin(const Polygon& polygon, const Point2& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : polygon.edges()) m = std::min(m, e.offset - dot(e.normal, x));
  return m;
}

StarCenter star_center_lp(const Polygon& polygon) {
  // Rows a . (x, y, r) <= b: one per edge plus the cap r <= h_E.
  const double h = polygon.diameter();
  std::vector<Eigen::Vector3d> rows;
  std::vector<double> rhs;
  for (const auto& e : polygon.edges()) {
    rows.emplace_back(e.normal.x, e.normal.y, 1.0);
    rhs.push_back(e.offset);
  }
  rows.emplace_back(0.0, 0.0, 1.0);
  rhs.push_back(h);

  const std::size_t m = rows.size();
  const double feas_tol = 1e-12 * h;
  bool found = false;
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  Eigen::Matrix3d a;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t l = j + 1; l < m; ++l) {
        a.row(0) = rows[i];
        a.row(1) = rows[j];
        a.row(2) = rows[l];
        const double det = a.determinant();
        if (std::abs(det) < 1e-12) continue;
        const Eigen::Vector3d sol = a.partialPivLu().solve(Eigen::Vector3d(rhs[i], rhs[j], rhs[l]));
        bool feasible = true;
        for (std::size_t q = 0; q < m && feasible; ++q) feasible = rows[q].dot(sol) <= rhs[q] + feas_tol;
        if (!feasible) continue;
        if (!found || sol.z() > best.z() + feas_tol) {
          best = sol;
          found = true;
        } else if (sol.z() >= best.z() - feas_tol) {
          // degenerate optimal face: lexicographically smallest (x, y)
          const bool smaller = sol.x() < best.x() - feas_tol ||
                               (std::abs(sol.x() - best.x()) <= feas_tol && sol.y() < best.y() - feas_tol);
          if (smaller) best = sol;
        }
      }
    }
  }
  if (!found || best.z() <= 1e-10 * h) {
    throw NotStarShaped("polygon kernel has no interior (r_E = " +
                        std::to_string(found ? best.z() : 0.0) + ")");
  }
  return StarCenter{Point2{best.x(), best.y()}, best.z()};
}

StarCenter star_center_area_weights(const Polygon& polygon) {
  // 2 area(T_j) = c_j - g_j . x, with g_j = (e_y, -e_x) for e = v_{j+1} - v_j.
  Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
  for (std::size_t j = 0; j < polygon.size(); ++j) {
    const Point2& v0 = polygon.vertex(j);
    const Point2& v1 = polygon.vertex(j + 1);
    const Eigen::Vector2d g(v1.y - v0.y, -(v1.x - v0.x));
    normal += g * g.transpose();
    rhs += cross(v0, v1) * g;
  }
  const Eigen::Vector2d x = normal.ldlt().solve(rhs);
  StarCenter c{Point2{x.x(), x.y()}, 0.0};
  c.radius = kernel_margin(polygon, c.center);
  if (!(c.radius > 1e-10 * polygon.diameter())) {
    throw NotStarShaped("area-weighted center lies outside the polygon kernel");
  }
  return c;
}

Point2 FanTriangle::map(const Point2& ref) const {
  const Eigen::Vector2d v = jacobian * Eigen::Vector2d(ref.x, ref.y);
  return corners[0] + Point2{v.x(), v.y()};
}

Point2 FanTriangle::inverse_map(const Point2& x) const {
  const Point2 d = x - corners[0];
  const Eigen::Vector2d v = inverse_jacobian * Eigen::Vector2d(d.x, d.y);
  return Point2{v.x(), v.y()};
}

SubTriangulation build_subtriangulation(const Polygon& polygon, const StarCenter& center) {
  if (!(center.radius > 0.0)) throw NotStarShaped("fan center is not strictly inside the kernel");
  const double h = polygon.diameter();
  SubTriangulation sub;
  sub.center = center.center;
  sub.triangles.reserve(polygon.size());
  for (std::size_t j = 0; j < polygon.size(); ++j) {
    FanTriangle t;
    t.corners = {center.center, polygon.vertex(j), polygon.vertex(j + 1)};
    const Point2 a = t.corners[1] - t.corners[0];
    const Point2 b = t.corners[2] - t.corners[0];
    t.jacobian << a.x, b.x, a.y, b.y;
    t.det = t.jacobian.determinant();
    t.orientation = t.det > 0.0 ? 1 : -1;
    if (0.5 * t.det < 1e-14 * h * h) {
      throw DegenerateTriangle("fan triangle " + std::to_string(j) + " has area " + std::to_string(0.5 * t.det));
    }
    t.inverse_jacobian = t.jacobian.inverse();
    sub.triangles.push_back(t);
  }
  return sub;
}

double min_triangle_quality(const SubTriangulation& sub) {
  double q = 1.0;
  for (const auto& t : sub.triangles) {
    double sq = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Point2 d = t.corners[(i + 1) % 3] - t.corners[i];
      sq += dot(d, d);
    }
    q = std::min(q, 4.0 * std::sqrt(3.0) * t.area() / sq);
  }
  return q;
}

Mesh::Mesh(std::vector<Point2> vertices, std::vector<std::vector<std::size_t>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  std::ostringstream bad;
  int nbad = 0;
  auto flag = [&](std::size_t c, const std::string& why) {
    bad << "\n  cell " << c << ": " << why;
    ++nbad;
  };
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (!is_finite(vertices_[v])) throw ValidationError("vertex " + std::to_string(v) + " is not finite");
  }
  polygons_.reserve(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& cell = cells_[c];
    if (cell.size() < 3) { flag(c, "fewer than 3 vertices"); polygons_.emplace_back(); continue; }
    bool ok = true;
    for (std::size_t id : cell) {
      if (id >= vertices_.size()) { flag(c, "vertex index " + std::to_string(id) + " out of range"); ok = false; break; }
    }
    if (ok) {
      std::vector<std::size_t> sorted = cell;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) { flag(c, "repeated vertex index"); ok = false; }
    }
    if (!ok) { polygons_.emplace_back(); continue; }
    std::vector<Point2> loop;
    for (std::size_t id : cell) loop.push_back(vertices_[id]);
    if (signed_area(loop) < 0.0) {
      std::reverse(cell.begin(), cell.end());
      std::reverse(loop.begin(), loop.end());
      warnings_.push_back("cell " + std::to_string(c) + " was clockwise and has been reversed");
    }
    try {
      polygons_.emplace_back(std::move(loop), cell);
    } catch (const InvalidPolygon& e) {
      flag(c, e.what());
      polygons_.emplace_back();
    }
  }
  if (nbad > 0) throw ValidationError(std::to_string(nbad) + " invalid cell(s):" + bad.str());
  for (const auto& p : polygons_) h_ = std::max(h_, p.diameter());
  classify_edges();
}

double Mesh::total_area() const {
  double a = 0.0;
  for (const auto& p : polygons_) a += p.area();
  return a;
}

void Mesh::classify_edges() {
  boundary_edge_.assign(cells_.size(), {});
  boundary_vertex_.assign(vertices_.size(), 0);

  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& cell = cells_[c];
    boundary_edge_[c].assign(cell.size(), 0);
    for (std::size_t e = 0; e < cell.size(); ++e) {
      auto key = std::make_pair(cell[e], cell[(e + 1) % cell.size()]);
      if (++directed[key] > 1) {
        issues_.push_back("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                          ") is used twice with the same orientation");
      }
    }
  }

  struct Open {
    std::size_t cell, edge;
  };
  std::vector<Open> open;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& cell = cells_[c];
    for (std::size_t e = 0; e < cell.size(); ++e) {
      if (!directed.count({cell[(e + 1) % cell.size()], cell[e]})) open.push_back({c, e});
    }
  }

  // Edges without a topological twin: either on the boundary or covered by a
  // chain of collinear neighbour edges (hanging nodes).
  for (const auto& oe : open) {
    const Edge& me = polygons_[oe.cell].edges()[oe.edge];
    const double tol = 1e-10 * polygons_[oe.cell].diameter();
    const Point2 u = (me.b - me.a) / me.length;
    double covered = 0.0;
    for (const auto& other : open) {
      if (other.cell == oe.cell) continue;
      const Edge& oe2 = polygons_[other.cell].edges()[other.edge];
      if (std::abs(cross(u, oe2.a - me.a)) > tol || std::abs(cross(u, oe2.b - me.a)) > tol) continue;
      const double s = dot(u, oe2.a - me.a);
      const double t = dot(u, oe2.b - me.a);
      const double overlap = std::min(me.length, std::max(s, t)) - std::max(0.0, std::min(s, t));
      if (overlap <= tol) continue;
      if (t < s) {
        covered += overlap;
      } else {
        issues_.push_back("cells " + std::to_string(oe.cell) + " and " + std::to_string(other.cell) + " overlap");
      }
    }
    if (covered <= tol) {
      boundary_edge_[oe.cell][oe.edge] = 1;
      const auto& cell = cells_[oe.cell];
      boundary_vertex_[cell[oe.edge]] = 1;
      boundary_vertex_[cell[(oe.edge + 1) % cell.size()]] = 1;
    } else if (std::abs(covered - me.length) > tol) {
      issues_.push_back("edge " + std::to_string(oe.edge) + " of cell " + std::to_string(oe.cell) +
                        " is only partially shared");
    }
  }

  double enclosed = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (std::size_t e = 0; e < cells_[c].size(); ++e) {
      if (!boundary_edge_[c][e]) continue;
      const Edge& ed = polygons_[c].edges()[e];
      enclosed += 0.5 * cross(ed.a, ed.b);
    }
  }
  const double area = total_area();
  if (std::abs(enclosed - area) > 1e-10 * area) {
    issues_.push_back("cell areas (" + std::to_string(area) + ") do not match the domain area (" +
                      std::to_string(enclosed) + ")");
  }
}

std::vector<std::size_t> MeshReport::failed_cells() const {
  std::vector<std::size_t> out;
  for (const auto& c : cells) {
    if (!c.pass) out.push_back(c.cell);
  }
  return out;
}

MeshReport validate_mesh_assumptions(const Mesh& mesh, double rho) {
  MeshReport report;
  report.rho = rho;
  report.warnings = mesh.warnings();
  report.issues = mesh.issues();
  report.pass = report.issues.empty();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Polygon& p = mesh.polygon(c);
    CellReport r;
    r.cell = c;
    const double h = p.diameter();
    r.min_edge_ratio = std::numeric_limits<double>::infinity();
    for (const auto& e : p.edges()) r.min_edge_ratio = std::min(r.min_edge_ratio, e.length / h);
    try {
      const StarCenter sc = star_center_lp(p);
      r.star_shaped = true;
      r.radius_ratio = sc.radius / h;
      r.min_triangle_quality = min_triangle_quality(build_subtriangulation(p, sc));
    } catch (const NotStarShaped&) {
      r.star_shaped = false;
    } catch (const DegenerateTriangle&) {
      r.min_triangle_quality = 0.0;
    }
    r.pass = r.star_shaped && r.min_edge_ratio >= rho && r.radius_ratio >= rho;
    report.pass = report.pass && r.pass;
    report.cells.push_back(r);
  }
  return report;
}

}  // namespace zfem
