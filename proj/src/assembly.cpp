#include "zfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "zfem/errors.hpp"
#include "zfem/quadrature.hpp"

namespace zfem {

int DofMap::num_boundary() const {
  return static_cast<int>(std::count(boundary.begin(), boundary.end(), char{1}));
}

namespace {

// Buckets points on a grid much coarser than the merge tolerance and compares
// candidates from the 3x3 neighbourhood by distance.
class PointMerger {
public:
  explicit PointMerger(double tolerance) : tol_(tolerance), cell_(tolerance * 1e3) {}

  int find_or_insert(const Point2& p, int next_id, bool* inserted) {
    const std::int64_t ix = static_cast<std::int64_t>(std::floor(p.x / cell_));
    const std::int64_t iy = static_cast<std::int64_t>(std::floor(p.y / cell_));
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = buckets_.find({ix + dx, iy + dy});
        if (it == buckets_.end()) continue;
        for (const auto& [q, id] : it->second) {
          if (distance(p, q) <= tol_) {
            *inserted = false;
            return id;
          }
        }
      }
    }
    buckets_[{ix, iy}].push_back({p, next_id});
    *inserted = true;
    return next_id;
  }

private:
  double tol_;
  double cell_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::pair<Point2, int>>> buckets_;
};

}  // namespace

DofMap build_dof_map(const Mesh& mesh, const std::vector<LocalBasis>& bases) {
  if (bases.size() != mesh.num_cells()) throw Error("build_dof_map: one local basis per cell required");
  DofMap map;
  PointMerger merger(1e-10 * mesh.h());
  const std::vector<char>& boundary_vertex = mesh.boundary_vertex_flags();

  map.element_dofs.resize(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const LocalBasis& basis = bases[c];
    const int nv = static_cast<int>(basis.polygon().size());
    const int k = basis.order();
    const FineNodeSet& fine = basis.fine_nodes();
    const NodeClassification& cls = basis.classification();
    auto& ids = map.element_dofs[c];
    ids.resize(cls.num_dofs());
    for (int i = 0; i < cls.num_dofs(); ++i) {
      const int n = cls.coarse[i];
      const Point2& p = fine.nodes[n];
      if (n >= fine.num_boundary()) {
        ids[i] = map.size();
        map.points.push_back(p);
        map.boundary.push_back(0);
        continue;
      }
      bool on_boundary;
      if (n < nv) {
        on_boundary = mesh.is_boundary_edge(c, n) || mesh.is_boundary_edge(c, (n + nv - 1) % nv) ||
                      boundary_vertex[mesh.polygon(c).ids()[n]];
      } else {
        on_boundary = mesh.is_boundary_edge(c, (n - nv) / (k - 1));
      }
      bool inserted = false;
      const int id = merger.find_or_insert(p, map.size(), &inserted);
      if (inserted) {
        map.points.push_back(p);
        map.boundary.push_back(0);
      }
      if (on_boundary) map.boundary[id] = 1;
      ids[i] = id;
    }
  }

  // every interior edge must carry the same k+1 ids as some neighbouring cell
  std::vector<std::vector<int>> sorted(mesh.num_cells());
  std::vector<std::vector<int>> cells_of(map.size());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    sorted[c] = map.element_dofs[c];
    std::sort(sorted[c].begin(), sorted[c].end());
    for (int id : sorted[c]) cells_of[id].push_back(static_cast<int>(c));
  }
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int nv = static_cast<int>(bases[c].polygon().size());
    const int k = bases[c].order();
    const auto& ids = map.element_dofs[c];
    for (int e = 0; e < nv; ++e) {
      if (mesh.is_boundary_edge(c, e)) continue;
      std::vector<int> edge_ids{ids[e], ids[(e + 1) % nv]};
      for (int t = 1; t < k; ++t) edge_ids.push_back(ids[nv + e * (k - 1) + (t - 1)]);
      bool matched = false;
      for (int other : cells_of[edge_ids[0]]) {
        if (other == static_cast<int>(c)) continue;
        matched = std::all_of(edge_ids.begin(), edge_ids.end(), [&](int id) {
          return std::binary_search(sorted[other].begin(), sorted[other].end(), id);
        });
        if (matched) break;
      }
      if (!matched) {
        throw EdgeMismatch("cell " + std::to_string(c) + ", edge " + std::to_string(e) +
                           ": edge nodes are not matched by a neighbouring cell");
      }
    }
  }
  return map;
}

CoefficientField CoefficientField::laplace() {
  return CoefficientField{[](const Point2&) { return Eigen::Matrix2d::Identity().eval(); },
                          [](const Point2&) { return 0.0; }, [](const Point2&) { return 0.0; }};
}

void check_coefficients(const CoefficientField& coeffs, const std::vector<Point2>& samples) {
  for (const Point2& x : samples) {
    const Eigen::Matrix2d d = coeffs.diffusion(x);
    const double scale = d.cwiseAbs().maxCoeff();
    if (std::abs(d(0, 1) - d(1, 0)) > 1e-12 * scale) {
      throw ValidationError("diffusion tensor is not symmetric at (" + std::to_string(x.x) + ", " +
                            std::to_string(x.y) + ")");
    }
    if (!(d(0, 0) > 0.0) || !(d.determinant() > 0.0)) {
      throw ValidationError("diffusion tensor is not positive definite at (" + std::to_string(x.x) + ", " +
                            std::to_string(x.y) + ")");
    }
    if (coeffs.reaction(x) < 0.0) {
      throw ValidationError("reaction coefficient is negative at (" + std::to_string(x.x) + ", " +
                            std::to_string(x.y) + ")");
    }
  }
}

int default_quadrature_degree(int k) { return std::min(2 * k + 2, kMaxQuadratureDegree); }

ElementSystem element_system(const LocalBasis& basis, const CoefficientField& coeffs, int quad_degree) {
  if (quad_degree < 2 * basis.order()) {
    throw ValidationError("quadrature degree " + std::to_string(quad_degree) + " is below 2k = " +
                          std::to_string(2 * basis.order()));
  }
  const QuadratureRule& rule = quadrature_rule(quad_degree);
  const int n = basis.num_dofs();
  ElementSystem out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  Eigen::VectorXd phi;
  Eigen::MatrixX2d dphi;
  const auto& tris = basis.subtriangulation().triangles;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * std::abs(tris[t].det);
      const Point2 x = tris[t].map(rule.points[q]);
      basis.evaluate_reference(static_cast<int>(t), rule.points[q], &phi, &dphi);
      const Eigen::Matrix2d d = coeffs.diffusion(x);
      out.matrix.noalias() += w * (dphi * d * dphi.transpose());
      out.matrix.noalias() += (w * coeffs.reaction(x)) * (phi * phi.transpose());
      out.load.noalias() += (w * coeffs.load(x)) * phi;
    }
  }
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  return out;
}

SymmetricSparseSystem assemble(const Mesh& mesh, const std::vector<LocalBasis>& bases, const DofMap& dofs,
                               const CoefficientField& coeffs, int quad_degree) {
  std::vector<ElementSystem> staged(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) staged[c] = element_system(bases[c], coeffs, quad_degree);

  std::size_t nnz = 0;
  for (const auto& s : staged) nnz += static_cast<std::size_t>(s.matrix.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nnz);
  SymmetricSparseSystem sys;
  sys.load = Eigen::VectorXd::Zero(dofs.size());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& ids = dofs.element_dofs[c];
    const ElementSystem& s = staged[c];
    for (std::size_t i = 0; i < ids.size(); ++i) {
      sys.load(ids[i]) += s.load(i);
      for (std::size_t j = 0; j < ids.size(); ++j) triplets.emplace_back(ids[i], ids[j], s.matrix(i, j));
    }
  }
  sys.matrix.resize(dofs.size(), dofs.size());
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& free_values) const {
  Eigen::VectorXd full = lift;
  for (std::size_t i = 0; i < free_dofs.size(); ++i) full(free_dofs[i]) = free_values(i);
  return full;
}

ReducedSystem apply_dirichlet(const SymmetricSparseSystem& system, const DofMap& dofs, const ScalarField& g) {
  ReducedSystem out;
  const int n = dofs.size();
  out.lift = Eigen::VectorXd::Zero(n);
  std::vector<int> position(n, -1);
  for (int i = 0; i < n; ++i) {
    if (dofs.boundary[i]) {
      out.lift(i) = g(dofs.points[i]);
    } else {
      position[i] = static_cast<int>(out.free_dofs.size());
      out.free_dofs.push_back(i);
    }
  }
  const int m = static_cast<int>(out.free_dofs.size());
  const Eigen::VectorXd lifted = system.matrix * out.lift;
  out.load.resize(m);
  for (int i = 0; i < m; ++i) out.load(i) = system.load(out.free_dofs[i]) - lifted(out.free_dofs[i]);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(system.matrix.nonZeros());
  for (int col = 0; col < system.matrix.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, col); it; ++it) {
      const int r = position[it.row()], c = position[it.col()];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  out.matrix.resize(m, m);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SolveReport solve_spd(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs, double tolerance) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size()) throw Error("solve_spd: dimension mismatch");
  SolveReport report;
  report.x = Eigen::VectorXd::Zero(rhs.size());
  const double bnorm = rhs.norm();
  if (rhs.size() == 0 || bnorm == 0.0) return report;

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> chol(matrix);
  if (chol.info() != Eigen::Success) throw SolverBreakdown("sparse Cholesky failed: matrix is not positive definite");
  report.x = chol.solve(rhs);
  Eigen::VectorXd r = rhs - matrix * report.x;
  report.relative_residual = r.norm() / bnorm;
  while (report.relative_residual > tolerance && report.refinement_steps < 5) {
    report.x += chol.solve(r);
    r = rhs - matrix * report.x;
    report.relative_residual = r.norm() / bnorm;
    ++report.refinement_steps;
  }
  if (report.relative_residual <= tolerance) return report;

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(tolerance);
  cg.setMaxIterations(std::max<Eigen::Index>(100, 10 * matrix.rows()));
  cg.compute(matrix);
  if (cg.info() == Eigen::Success) {
    report.x = cg.solveWithGuess(rhs, report.x);
    report.iterative_fallback = true;
    report.relative_residual = (rhs - matrix * report.x).norm() / bnorm;
  }
  if (report.relative_residual > tolerance) {
    throw NonConvergence("linear solve reached relative residual " + std::to_string(report.relative_residual),
                         report.relative_residual);
  }
  return report;
}

Discretization::Discretization(Mesh m, int k, const LocalBasisOptions& options) : mesh(std::move(m)), order(k) {
  bases.reserve(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) bases.emplace_back(mesh.polygon(c), k, options);
  dofs = build_dof_map(mesh, bases);
}

DiscreteSolution::DiscreteSolution(std::shared_ptr<const Discretization> disc, Eigen::VectorXd coefficients)
    : disc_(std::move(disc)), u_(std::move(coefficients)) {
  if (u_.size() != disc_->dofs.size()) throw Error("DiscreteSolution: coefficient vector has the wrong length");
}

Eigen::VectorXd DiscreteSolution::element_coefficients(std::size_t cell) const {
  const auto& ids = disc_->dofs.element_dofs[cell];
  Eigen::VectorXd local(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) local(i) = u_(ids[i]);
  return local;
}

double DiscreteSolution::value(std::size_t cell, const Point2& x) const {
  Eigen::VectorXd phi;
  disc_->bases[cell].evaluate(x, &phi, nullptr);
  return phi.dot(element_coefficients(cell));
}

Point2 DiscreteSolution::gradient(std::size_t cell, const Point2& x) const {
  Eigen::MatrixX2d dphi;
  disc_->bases[cell].evaluate(x, nullptr, &dphi);
  const Eigen::Vector2d g = dphi.transpose() * element_coefficients(cell);
  return Point2{g(0), g(1)};
}

ErrorNorms compute_errors(const DiscreteSolution& sol, const ScalarField& u_exact, const VectorField& grad_exact,
                          int quad_degree) {
  const Discretization& disc = sol.discretization();
  const QuadratureRule& rule = quadrature_rule(quad_degree);
  double e0 = 0.0, e1 = 0.0;
  Eigen::VectorXd phi;
  Eigen::MatrixX2d dphi;
  for (std::size_t c = 0; c < disc.mesh.num_cells(); ++c) {
    const LocalBasis& basis = disc.bases[c];
    const Eigen::VectorXd uc = sol.element_coefficients(c);
    const auto& tris = basis.subtriangulation().triangles;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q] * std::abs(tris[t].det);
        const Point2 x = tris[t].map(rule.points[q]);
        basis.evaluate_reference(static_cast<int>(t), rule.points[q], &phi, &dphi);
        const double du = u_exact(x) - phi.dot(uc);
        const Eigen::Vector2d gh = dphi.transpose() * uc;
        const Point2 g = grad_exact(x);
        e0 += w * du * du;
        e1 += w * ((g.x - gh(0)) * (g.x - gh(0)) + (g.y - gh(1)) * (g.y - gh(1)));
      }
    }
  }
  return ErrorNorms{std::sqrt(e0), std::sqrt(e1)};
}

DiscreteSolution solve_problem(std::shared_ptr<const Discretization> disc, const CoefficientField& coeffs,
                               const ScalarField& g, int quad_degree) {
  const SymmetricSparseSystem sys = assemble(disc->mesh, disc->bases, disc->dofs, coeffs, quad_degree);
  const ReducedSystem reduced = apply_dirichlet(sys, disc->dofs, g);
  const SolveReport report = solve_spd(reduced.matrix, reduced.load);
  return DiscreteSolution(std::move(disc), reduced.expand(report.x));
}

DiscreteSolution interpolate(std::shared_ptr<const Discretization> disc, const ScalarField& f) {
  Eigen::VectorXd u(disc->dofs.size());
  for (int i = 0; i < disc->dofs.size(); ++i) u(i) = f(disc->dofs.points[i]);
  return DiscreteSolution(std::move(disc), std::move(u));
}

}  // namespace zfem
