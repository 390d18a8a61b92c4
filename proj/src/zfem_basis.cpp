#include "zfem/zfem_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "zfem/errors.hpp"
#include "zfem/quadrature.hpp"

namespace zfem {

ScaledMonomials::ScaledMonomials(const Point2& center, double diameter, int k)
    : center_(center), diameter_(diameter), k_(k) {
  for (int d = 0; d <= k; ++d) {
    for (int py = 0; py <= d; ++py) exponents_.push_back({d - py, py});
  }
}

namespace {

// powers[p] = t^p for p = 0..k
void powers(double t, int k, double* out) {
  out[0] = 1.0;
  for (int p = 1; p <= k; ++p) out[p] = out[p - 1] * t;
}

}  // namespace

Eigen::VectorXd ScaledMonomials::values(const Point2& x) const {
  double px[kMaxOrder + 2], py[kMaxOrder + 2];
  powers((x.x - center_.x) / diameter_, k_, px);
  powers((x.y - center_.y) / diameter_, k_, py);
  Eigen::VectorXd v(size());
  for (int a = 0; a < size(); ++a) v(a) = px[exponents_[a].i] * py[exponents_[a].j];
  return v;
}

Eigen::MatrixX2d ScaledMonomials::gradients(const Point2& x) const {
  double px[kMaxOrder + 2], py[kMaxOrder + 2];
  powers((x.x - center_.x) / diameter_, k_, px);
  powers((x.y - center_.y) / diameter_, k_, py);
  Eigen::MatrixX2d g(size(), 2);
  for (int a = 0; a < size(); ++a) {
    const int i = exponents_[a].i, j = exponents_[a].j;
    g(a, 0) = i > 0 ? i * px[i - 1] * py[j] / diameter_ : 0.0;
    g(a, 1) = j > 0 ? j * px[i] * py[j - 1] / diameter_ : 0.0;
  }
  return g;
}

FineNodeSet enumerate_fine_nodes(const SubTriangulation& sub, int k) {
  const RefNodeLayout layout(k);
  const int nv = static_cast<int>(sub.triangles.size());
  const int nint = poly_dim(k - 3);
  FineNodeSet fine;
  fine.order = k;
  fine.num_vertices = nv;
  const int total = (2 * k - 1 + nint) * nv + 1;
  fine.nodes.resize(total);
  fine.boundary.assign(total, 0);

  auto vertex = [&](int j) { return sub.triangles[j % nv].corners[1]; };
  const Point2 xe = sub.center;
  for (int j = 0; j < nv; ++j) fine.nodes[j] = vertex(j);
  for (int j = 0; j < nv; ++j) {
    for (int t = 1; t < k; ++t) {
      const double s = static_cast<double>(t) / k;
      fine.nodes[nv + j * (k - 1) + (t - 1)] = (1.0 - s) * vertex(j) + s * vertex(j + 1);
    }
  }
  for (int n = 0; n < nv * k; ++n) fine.boundary[n] = 1;
  fine.nodes[fine.center_index()] = xe;
  for (int j = 0; j < nv; ++j) {
    for (int t = 1; t < k; ++t) {
      const double s = static_cast<double>(t) / k;
      fine.nodes[fine.spoke_node(j, t)] = (1.0 - s) * xe + s * vertex(j);
    }
  }

  fine.triangle_nodes.assign(nv, std::vector<int>(layout.size(), -1));
  for (int tri = 0; tri < nv; ++tri) {
    const FanTriangle& ft = sub.triangles[tri];
    auto& map = fine.triangle_nodes[tri];
    for (int l = 0; l < layout.size(); ++l) {
      const int a = layout.lattice()[l].i;
      const int b = layout.lattice()[l].j;
      int g;
      if (a == 0 && b == 0) {
        g = fine.center_index();
      } else if (a == k) {
        g = tri;
      } else if (b == k) {
        g = (tri + 1) % nv;
      } else if (a + b == k) {
        g = nv + tri * (k - 1) + (b - 1);
      } else if (b == 0) {
        g = fine.spoke_node(tri, a);
      } else if (a == 0) {
        g = fine.spoke_node((tri + 1) % nv, b);
      } else {
        g = fine.interior_node(tri, l - layout.first_interior());
        fine.nodes[g] = ft.map(layout.node(l));
      }
      map[l] = g;
    }
  }
  return fine;
}

std::vector<int> interleave_counts(int selections, int slots) {
  std::vector<int> counts(slots, 0);
  if (selections <= 0 || slots <= 0) return counts;
  if (selections >= slots) {
    for (int s = 0; s < slots; ++s) counts[s] = selections / slots + (s < selections % slots ? 1 : 0);
    return counts;
  }
  const int size = slots / selections;
  const int larger = slots % selections;
  int start = 0;
  for (int g = 0; g < selections; ++g) {
    counts[start] = 1;
    start += size + (g >= selections - larger ? 1 : 0);
  }
  return counts;
}

NodeClassification select_coarse_nodes(const FineNodeSet& fine, int k) {
  NodeClassification cls;
  const int nv = fine.num_vertices;
  const int nint = poly_dim(k - 3);
  std::vector<char> is_coarse(fine.size(), 0);
  for (int n = 0; n < fine.num_boundary(); ++n) {
    cls.coarse.push_back(n);
    is_coarse[n] = 1;
  }
  cls.interior_per_triangle.assign(nv, 0);
  if (k >= 3) {
    cls.coarse.push_back(fine.center_index());
    is_coarse[fine.center_index()] = 1;
  }
  if (k >= 4) {
    const std::vector<int> per_triangle = interleave_counts(nint - 1, nv);
    for (int tri = 0; tri < nv; ++tri) {
      cls.interior_per_triangle[tri] = per_triangle[tri];
      if (per_triangle[tri] == 0) continue;
      const std::vector<int> within = interleave_counts(per_triangle[tri], nint);
      for (int m = 0; m < nint; ++m) {
        if (!within[m]) continue;
        const int g = fine.interior_node(tri, m);
        cls.coarse.push_back(g);
        is_coarse[g] = 1;
      }
    }
  }
  for (int n = 0; n < fine.size(); ++n) {
    if (!is_coarse[n]) cls.virtual_nodes.push_back(n);
  }
  return cls;
}

double unisolvence_margin(const std::vector<Point2>& points, int k) {
  const int nk = poly_dim(k);
  if (static_cast<int>(points.size()) < nk) return 0.0;
  Point2 c;
  for (const auto& p : points) c += p;
  c = c / static_cast<double>(points.size());
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, distance(p, c));
  if (!(scale > 0.0)) return 0.0;
  const ScaledMonomials mono(c, scale, k);
  Eigen::MatrixXd vdm(points.size(), nk);
  for (std::size_t r = 0; r < points.size(); ++r) vdm.row(r) = mono.values(points[r]).transpose();
  for (int a = 0; a < nk; ++a) {
    const double cn = vdm.col(a).norm();
    if (cn > 0.0) vdm.col(a) /= cn;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(vdm);
  return svd.singularValues()(nk - 1);
}

bool verify_unisolvence(const std::vector<Point2>& points, int k) {
  return unisolvence_margin(points, k) > 1e-10;
}

ConstraintMatrices build_D_V(const FineNodeSet& fine, const NodeClassification& cls, const ScaledMonomials& mono) {
  ConstraintMatrices m;
  m.D.resize(mono.size(), cls.num_dofs());
  m.V.resize(mono.size(), cls.num_virtual());
  for (int i = 0; i < cls.num_dofs(); ++i) m.D.col(i) = mono.values(fine.nodes[cls.coarse[i]]);
  for (int j = 0; j < cls.num_virtual(); ++j) m.V.col(j) = mono.values(fine.nodes[cls.virtual_nodes[j]]);
  return m;
}

WeightMatrix solve_weights(const Eigen::MatrixXd& D, const Eigen::MatrixXd& V) {
  if (D.rows() != V.rows()) throw Error("solve_weights: D and V row counts differ");
  if (D.cols() < D.rows()) throw RankDeficient("fewer coarse nodes than polynomial dimension");
  // unit-norm rows: S D W = S V has the same minimum-norm solution and a far
  // better conditioned Gram matrix once high-degree monomials get small
  Eigen::VectorXd row_scale = D.rowwise().norm();
  for (Eigen::Index r = 0; r < row_scale.size(); ++r) {
    if (!(row_scale(r) > 0.0)) throw RankDeficient("constraint row " + std::to_string(r) + " vanishes");
    row_scale(r) = 1.0 / row_scale(r);
  }
  const Eigen::MatrixXd Ds = row_scale.asDiagonal() * D;
  const Eigen::MatrixXd Vs = row_scale.asDiagonal() * V;
  const Eigen::MatrixXd gram = Ds * Ds.transpose();
  const Eigen::LLT<Eigen::MatrixXd> chol(gram);
  if (chol.info() != Eigen::Success) throw RankDeficient("Gram matrix D D^T is not positive definite");
  const double scale = gram.diagonal().maxCoeff();
  const Eigen::MatrixXd& lower = chol.matrixLLT();
  for (Eigen::Index r = 0; r < gram.rows(); ++r) {
    if (lower(r, r) * lower(r, r) < 1e-12 * scale) {
      throw RankDeficient("Gram matrix D D^T is numerically singular (pivot " + std::to_string(r) + ")");
    }
  }
  WeightMatrix out;
  out.W = Ds.transpose() * chol.solve(Vs);
  // one refinement sweep with the same factorization; stays in the row space of D
  const Eigen::MatrixXd r = Vs - Ds * out.W;
  out.W += Ds.transpose() * chol.solve(r);
  out.residual = V.cols() > 0 ? (D * out.W - V).cwiseAbs().maxCoeff() : 0.0;
  return out;
}

namespace {

StarCenter pick_center(const Polygon& polygon, CenterMethod method) {
  return method == CenterMethod::AreaWeights ? star_center_area_weights(polygon) : star_center_lp(polygon);
}

}  // namespace

LocalBasis::LocalBasis(const Polygon& polygon, int k, const LocalBasisOptions& options)
    : polygon_(polygon),
      k_(k),
      options_(options),
      center_(pick_center(polygon_, options.center)),
      sub_(build_subtriangulation(polygon_, center_)),
      fine_(enumerate_fine_nodes(sub_, k)),
      classification_(select_coarse_nodes(fine_, k)),
      monomials_(center_.center, polygon_.diameter(), k),
      ref_(k) {
  build_weights();
}

void LocalBasis::build_weights() {
  const int reproduction_degree = std::min(2 * k_ + 2, kMaxQuadratureDegree);
  for (;;) {
    bool ok = true;
    try {
      const ConstraintMatrices dv = build_D_V(fine_, classification_, monomials_);
      weights_ = solve_weights(dv.D, dv.V);
    } catch (const RankDeficient&) {
      ok = false;
    }
    if (ok) {
      const int nk = ref_.size();
      expansions_.assign(sub_.triangles.size(), Eigen::MatrixXd::Zero(nk, num_dofs()));
      std::vector<int> position(fine_.size(), 0);
      for (int i = 0; i < num_dofs(); ++i) position[classification_.coarse[i]] = i + 1;
      for (int j = 0; j < classification_.num_virtual(); ++j) position[classification_.virtual_nodes[j]] = -(j + 1);
      for (std::size_t t = 0; t < sub_.triangles.size(); ++t) {
        for (int l = 0; l < nk; ++l) {
          const int p = position[fine_.triangle_nodes[t][l]];
          if (p > 0) {
            expansions_[t](l, p - 1) = 1.0;
          } else {
            expansions_[t].row(l) = weights_.W.col(-p - 1).transpose();
          }
        }
      }
      if (!options_.allow_promotion) return;
      const ReproductionErrors err = polynomial_reproduction_errors(*this, reproduction_degree);
      if (err.l2 / std::sqrt(polygon_.area()) <= options_.reproduction_tolerance) return;
    } else if (!options_.allow_promotion || classification_.num_virtual() == 0) {
      throw RankDeficient("coarse nodes are not unisolvent for P_" + std::to_string(k_));
    }
    if (classification_.num_virtual() == 0) return;

    // promote the virtual node that best conditions the coarse Vandermonde matrix
    std::vector<Point2> pts;
    for (int c : classification_.coarse) pts.push_back(fine_.nodes[c]);
    pts.push_back(Point2{});
    int best = 0;
    double best_margin = -1.0;
    for (int j = 0; j < classification_.num_virtual(); ++j) {
      pts.back() = fine_.nodes[classification_.virtual_nodes[j]];
      const double m = unisolvence_margin(pts, k_);
      if (m > best_margin) {
        best_margin = m;
        best = j;
      }
    }
    classification_.coarse.push_back(classification_.virtual_nodes[best]);
    classification_.virtual_nodes.erase(classification_.virtual_nodes.begin() + best);
    ++classification_.promotions;
  }
}

int LocalBasis::locate(const Point2& x) const {
  const double tol = 1e-12;
  for (std::size_t t = 0; t < sub_.triangles.size(); ++t) {
    const Point2 r = sub_.triangles[t].inverse_map(x);
    if (r.x >= -tol && r.y >= -tol && r.x + r.y <= 1.0 + tol) return static_cast<int>(t);
  }
  throw PointOutsideElement("point (" + std::to_string(x.x) + ", " + std::to_string(x.y) + ") is outside the element");
}

void LocalBasis::evaluate_reference(int t, const Point2& ref, Eigen::VectorXd* values,
                                    Eigen::MatrixX2d* gradients) const {
  Eigen::VectorXd psi;
  Eigen::MatrixX2d dpsi;
  ref_.evaluate(ref, values ? &psi : nullptr, gradients ? &dpsi : nullptr);
  const Eigen::MatrixXd& c = expansions_[t];
  if (values) *values = c.transpose() * psi;
  if (gradients) *gradients = c.transpose() * (dpsi * sub_.triangles[t].inverse_jacobian);
}

void LocalBasis::evaluate(const Point2& x, Eigen::VectorXd* values, Eigen::MatrixX2d* gradients) const {
  const int t = locate(x);
  evaluate_reference(t, sub_.triangles[t].inverse_map(x), values, gradients);
}

std::string LocalBasis::debug_json(long element_id) const {
  nlohmann::json j;
  if (element_id >= 0) j["element"] = element_id;
  j["order"] = k_;
  j["num_vertices"] = polygon_.size();
  j["center"] = {center_.center.x, center_.center.y};
  j["radius"] = center_.radius;
  j["num_fine"] = fine_.size();
  j["coarse"] = classification_.coarse;
  j["virtual"] = classification_.virtual_nodes;
  j["interior_per_triangle"] = classification_.interior_per_triangle;
  j["weights_shape"] = {weights_.W.rows(), weights_.W.cols()};
  j["constraint_residual"] = weights_.residual;
  j["promotions"] = classification_.promotions;
  return j.dump();
}

Eigen::VectorXd local_interpolate(const LocalBasis& basis, const ScalarField& f) {
  Eigen::VectorXd c(basis.num_dofs());
  for (int i = 0; i < basis.num_dofs(); ++i) c(i) = f(basis.dof_point(i));
  return c;
}

ReproductionErrors polynomial_reproduction_errors(const LocalBasis& basis, int quad_degree) {
  const ScaledMonomials& mono = basis.monomials();
  const int nk = mono.size();
  // coefficient matrix: column a holds dof_i(m_a)
  Eigen::MatrixXd coeff(basis.num_dofs(), nk);
  for (int i = 0; i < basis.num_dofs(); ++i) coeff.row(i) = mono.values(basis.dof_point(i)).transpose();

  const QuadratureRule& rule = quadrature_rule(quad_degree);
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(nk);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(nk);
  Eigen::VectorXd phi;
  Eigen::MatrixX2d dphi;
  const auto& tris = basis.subtriangulation().triangles;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * std::abs(tris[t].det);
      const Point2 x = tris[t].map(rule.points[q]);
      basis.evaluate_reference(static_cast<int>(t), rule.points[q], &phi, &dphi);
      const Eigen::VectorXd diff = mono.values(x) - coeff.transpose() * phi;
      const Eigen::MatrixX2d gdiff = mono.gradients(x) - coeff.transpose() * dphi;
      e0 += w * diff.cwiseAbs2();
      e1 += w * gdiff.rowwise().squaredNorm();
    }
  }
  return ReproductionErrors{std::sqrt(e0.maxCoeff()), std::sqrt(e1.maxCoeff())};
}

}  // namespace zfem
