#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "zfem/geometry.hpp"
#include "zfem/zfem_basis.hpp"

namespace zfem {

/// Global numbering of the coarse nodes of all elements.
struct DofMap {
  /// element_dofs[c][i]: global id of local coarse node i of cell c.
  std::vector<std::vector<int>> element_dofs;
  std::vector<Point2> points;
  std::vector<char> boundary;

  int size() const { return static_cast<int>(points.size()); }
  int num_boundary() const;
};

/// Element-boundary nodes are merged by position (tolerance 1e-10 h), element
/// interior nodes get private ids. Ids follow the first encounter in cell order.
/// Throws EdgeMismatch when the nodes of an interior edge are not all shared
/// with one neighbouring cell.
DofMap build_dof_map(const Mesh& mesh, const std::vector<LocalBasis>& bases);

using MatrixField = std::function<Eigen::Matrix2d(const Point2&)>;

struct CoefficientField {
  MatrixField diffusion;
  ScalarField reaction;
  ScalarField load;

  /// D = I, gamma = 0, f = 0.
  static CoefficientField laplace();
};

/// Samples the fields at the points and throws ValidationError if D is not
/// symmetric positive definite or gamma is negative somewhere.
void check_coefficients(const CoefficientField& coeffs, const std::vector<Point2>& samples);

/// Quadrature degree used when none is given: 2k + 2.
int default_quadrature_degree(int k);

struct ElementSystem {
  Eigen::MatrixXd matrix;  // (D grad phi_j, grad phi_i) + (gamma phi_j, phi_i)
  Eigen::VectorXd load;    // (f, phi_i)
};

/// Element integrals summed over the fan triangles. Requires degree >= 2k.
ElementSystem element_system(const LocalBasis& basis, const CoefficientField& coeffs, int quad_degree);

struct SymmetricSparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd load;
};

/// Element systems are computed into per-element buffers and merged in cell
/// order, so the result does not depend on scheduling.
SymmetricSparseSystem assemble(const Mesh& mesh, const std::vector<LocalBasis>& bases, const DofMap& dofs,
                               const CoefficientField& coeffs, int quad_degree);

/// System restricted to the free DOFs after lifting the boundary values.
struct ReducedSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd load;
  std::vector<int> free_dofs;
  /// Full-length vector holding g at boundary DOFs and 0 elsewhere.
  Eigen::VectorXd lift;

  /// Scatter a free-DOF vector back into a full coefficient vector.
  Eigen::VectorXd expand(const Eigen::VectorXd& free_values) const;
};

ReducedSystem apply_dirichlet(const SymmetricSparseSystem& system, const DofMap& dofs, const ScalarField& g);

struct SolveReport {
  Eigen::VectorXd x;
  double relative_residual = 0.0;
  int refinement_steps = 0;
  bool iterative_fallback = false;
};

/// Sparse Cholesky with iterative refinement down to a relative residual of
/// `tolerance`, then preconditioned CG if that is not enough. Throws
/// SolverBreakdown if the matrix is not positive definite and NonConvergence
/// if the tolerance cannot be met.
SolveReport solve_spd(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs,
                      double tolerance = 1e-11);

/// Mesh, local bases and DOF numbering for one polynomial order.
struct Discretization {
  Discretization(Mesh mesh, int k, const LocalBasisOptions& options = {});

  Mesh mesh;
  int order;
  std::vector<LocalBasis> bases;
  DofMap dofs;
};

class DiscreteSolution {
public:
  DiscreteSolution(std::shared_ptr<const Discretization> disc, Eigen::VectorXd coefficients);

  const Discretization& discretization() const { return *disc_; }
  const Eigen::VectorXd& coefficients() const { return u_; }
  /// Local coefficient vector of cell c.
  Eigen::VectorXd element_coefficients(std::size_t cell) const;

  /// u_h(x) and grad u_h(x) using the restriction to the given cell.
  double value(std::size_t cell, const Point2& x) const;
  Point2 gradient(std::size_t cell, const Point2& x) const;

private:
  std::shared_ptr<const Discretization> disc_;
  Eigen::VectorXd u_;
};

struct ErrorNorms {
  double l2 = 0.0;
  double grad = 0.0;
};

ErrorNorms compute_errors(const DiscreteSolution& sol, const ScalarField& u_exact, const VectorField& grad_exact,
                          int quad_degree);

/// Assemble, impose u = g on the boundary and solve.
DiscreteSolution solve_problem(std::shared_ptr<const Discretization> disc, const CoefficientField& coeffs,
                               const ScalarField& g, int quad_degree);

/// Global nodal interpolant of f.
DiscreteSolution interpolate(std::shared_ptr<const Discretization> disc, const ScalarField& f);

}  // namespace zfem
