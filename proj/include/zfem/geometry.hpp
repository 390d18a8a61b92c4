#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace zfem {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
  Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }
  Point2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend Point2 operator+(Point2 a, const Point2& b) { return a += b; }
  friend Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
  friend Point2 operator*(Point2 a, double s) { return a *= s; }
  friend Point2 operator*(double s, Point2 a) { return a *= s; }
  friend Point2 operator/(Point2 a, double s) { return a *= (1.0 / s); }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }
inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Supporting line of a polygon edge: normal . x == offset for every x on the edge.
struct Edge {
  Point2 a;
  Point2 b;
  Point2 normal;  // unit, outward
  double offset = 0.0;
  double length = 0.0;
};

/// Signed area of a closed vertex loop (positive when counterclockwise).
double signed_area(const std::vector<Point2>& loop);

/// A simple counterclockwise polygon. Construction validates the ordering,
/// vertex distinctness and simplicity of the boundary and throws InvalidPolygon.
class Polygon {
public:
  Polygon() = default;
  explicit Polygon(std::vector<Point2> vertices, std::vector<std::size_t> ids = {});

  std::size_t size() const { return vertices_.size(); }
  const Point2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  const std::vector<Point2>& vertices() const { return vertices_; }
  /// Global mesh vertex ids, empty for free-standing polygons.
  const std::vector<std::size_t>& ids() const { return ids_; }
  const std::vector<Edge>& edges() const { return edges_; }

  double diameter() const { return diameter_; }
  double area() const { return area_; }
  Point2 centroid() const;
  bool is_convex() const;

private:
  std::vector<Point2> vertices_;
  std::vector<std::size_t> ids_;
  std::vector<Edge> edges_;
  double diameter_ = 0.0;
  double area_ = 0.0;
};

struct StarCenter {
  Point2 center;
  double radius = 0.0;
};

/// Chebyshev center of the polygon kernel: maximizes r subject to
/// n_e . x + r <= b_e for every edge and 0 < r <= h_E.
StarCenter star_center_lp(const Polygon& polygon);

/// Alternative center: the minimizer of the sum of squared fan-triangle areas
/// over affine vertex combinations. The radius is recomputed as the distance
/// to the nearest edge line.
StarCenter star_center_area_weights(const Polygon& polygon);

/// min_e (b_e - n_e . x): the largest disk radius around x inside all edge half-planes.
double kernel_margin(const Polygon& polygon, const Point2& x);

/// Fan triangle (x_E, v_j, v_{j+1}) with its affine map x = A xhat + x_E.
struct FanTriangle {
  std::array<Point2, 3> corners;  // x_E, v_j, v_{j+1}
  Eigen::Matrix2d jacobian;       // columns v_j - x_E, v_{j+1} - x_E
  Eigen::Matrix2d inverse_jacobian;
  double det = 0.0;
  int orientation = 1;

  double area() const { return 0.5 * std::abs(det); }
  Point2 map(const Point2& ref) const;
  Point2 inverse_map(const Point2& x) const;
};

struct SubTriangulation {
  Point2 center;
  std::vector<FanTriangle> triangles;
};

SubTriangulation build_subtriangulation(const Polygon& polygon, const StarCenter& center);

/// Worst fan-triangle shape quality 4*sqrt(3)*area / sum|edge|^2 (1 for equilateral).
double min_triangle_quality(const SubTriangulation& sub);

/// Polygonal mesh with shared vertex coordinates. Cells are stored as
/// counterclockwise vertex-index loops; clockwise input loops are reversed
/// and noted in warnings(). Immutable after construction.
class Mesh {
public:
  Mesh() = default;
  Mesh(std::vector<Point2> vertices, std::vector<std::vector<std::size_t>> cells);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::vector<std::size_t>>& cells() const { return cells_; }
  std::size_t num_cells() const { return cells_.size(); }
  const Polygon& polygon(std::size_t cell) const { return polygons_[cell]; }

  /// Maximum cell diameter.
  double h() const { return h_; }
  double total_area() const;
  /// True when local edge e of the cell lies on the domain boundary.
  bool is_boundary_edge(std::size_t cell, std::size_t edge) const { return boundary_edge_[cell][edge] != 0; }
  const std::vector<char>& boundary_vertex_flags() const { return boundary_vertex_; }

  /// Loader notes (orientation fixes).
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// Conformity problems found while matching edges (partial or doubled coverage).
  const std::vector<std::string>& issues() const { return issues_; }

private:
  void classify_edges();

  std::vector<Point2> vertices_;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<Polygon> polygons_;
  std::vector<std::vector<char>> boundary_edge_;
  std::vector<char> boundary_vertex_;
  std::vector<std::string> warnings_;
  std::vector<std::string> issues_;
  double h_ = 0.0;
};

struct CellReport {
  std::size_t cell = 0;
  double min_edge_ratio = 0.0;     // min |e| / h_E
  double radius_ratio = 0.0;       // r_E / h_E, 0 when not star-shaped
  double min_triangle_quality = 0.0;
  bool star_shaped = false;
  bool pass = false;
};

struct MeshReport {
  double rho = 0.0;
  std::vector<CellReport> cells;
  std::vector<std::string> warnings;
  std::vector<std::string> issues;
  bool pass = false;

  std::vector<std::size_t> failed_cells() const;
};

/// Checks |e| >= rho h_E and r_E >= rho h_E on every cell.
MeshReport validate_mesh_assumptions(const Mesh& mesh, double rho);

}  // namespace zfem
