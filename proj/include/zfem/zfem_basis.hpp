#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zfem/geometry.hpp"
#include "zfem/reference_element.hpp"

namespace zfem {

/// m_alpha(x) = ((x - x_E) / h_E)^idx(alpha), ordered by total degree and,
/// within a degree, by decreasing power of x: 1, x, y, x^2, xy, y^2, ...
class ScaledMonomials {
public:
  ScaledMonomials(const Point2& center, double diameter, int k);

  int order() const { return k_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const std::vector<LatticeIndex>& exponents() const { return exponents_; }
  const Point2& center() const { return center_; }
  double diameter() const { return diameter_; }

  Eigen::VectorXd values(const Point2& x) const;
  Eigen::MatrixX2d gradients(const Point2& x) const;

private:
  Point2 center_;
  double diameter_;
  int k_;
  std::vector<LatticeIndex> exponents_;
};

/// All Lagrange nodes of order k on the fan, glued across shared spokes.
///
/// Numbering: the N_v polygon vertices, the (k-1) lattice points of each
/// boundary edge (edge j runs v_j -> v_{j+1}), x_E, the (k-1) points of each
/// spoke x_E -> v_j, then the n_{k-3} interior points of each fan triangle in
/// reference order. The first N_v k nodes are exactly the boundary nodes.
struct FineNodeSet {
  int order = 0;
  int num_vertices = 0;
  std::vector<Point2> nodes;
  std::vector<char> boundary;
  /// triangle_nodes[t][l]: fine index of reference layout node l in fan triangle t.
  std::vector<std::vector<int>> triangle_nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  int num_boundary() const { return num_vertices * order; }
  int center_index() const { return num_vertices * order; }
  int spoke_node(int j, int t) const { return center_index() + 1 + j * (order - 1) + (t - 1); }
  int interior_node(int tri, int m) const {
    return center_index() + 1 + num_vertices * (order - 1) + tri * poly_dim(order - 3) + m;
  }
};

FineNodeSet enumerate_fine_nodes(const SubTriangulation& sub, int k);

/// Split of the fine nodes into coarse (DOF-carrying) and virtual nodes.
struct NodeClassification {
  std::vector<int> coarse;         // fine indices in DOF order
  std::vector<int> virtual_nodes;  // fine indices in column order of W
  /// Selected interior coarse nodes per fan triangle, x_E excluded.
  std::vector<int> interior_per_triangle;
  int promotions = 0;

  int num_dofs() const { return static_cast<int>(coarse.size()); }
  int num_virtual() const { return static_cast<int>(virtual_nodes.size()); }
};

/// Distributes `selections` items over `slots` ordered slots. With at least as
/// many items as slots every slot gets the floor share and the leading slots
/// one more; otherwise the slots are cut into contiguous groups (the trailing
/// N mod G groups one larger) and the first slot of each group is chosen.
std::vector<int> interleave_counts(int selections, int slots);

/// Boundary nodes, then x_E for k >= 3, then n_{k-3} - 1 interior nodes spread
/// over the fan triangles and inside each triangle with interleave_counts().
NodeClassification select_coarse_nodes(const FineNodeSet& fine, int k);

/// Smallest singular value of the column-normalized scaled-monomial
/// Vandermonde matrix of the points (0 when there are fewer than n_k points).
double unisolvence_margin(const std::vector<Point2>& points, int k);

/// True iff the points determine a polynomial of degree <= k uniquely.
bool verify_unisolvence(const std::vector<Point2>& points, int k);

struct ConstraintMatrices {
  Eigen::MatrixXd D;  // n_k x N_dof, D(a, i) = m_a(x_i)
  Eigen::MatrixXd V;  // n_k x N_virt, V(a, j) = m_a(p_j)
};

ConstraintMatrices build_D_V(const FineNodeSet& fine, const NodeClassification& cls, const ScaledMonomials& mono);

struct WeightMatrix {
  Eigen::MatrixXd W;  // N_dof x N_virt
  double residual = 0.0;  // max_n |D W(:,n) - V(:,n)|_inf
};

/// Column-wise minimum-norm solution of D W = V via one Cholesky
/// factorization of the Gram matrix D D^T: W = D^T (D D^T)^{-1} V.
/// Throws RankDeficient when D does not have full row rank.
WeightMatrix solve_weights(const Eigen::MatrixXd& D, const Eigen::MatrixXd& V);

enum class CenterMethod { Chebyshev, AreaWeights };

struct LocalBasisOptions {
  CenterMethod center = CenterMethod::Chebyshev;
  bool allow_promotion = true;
  /// RMS polynomial-reproduction error above which a virtual node is promoted.
  double reproduction_tolerance = 1e-8;
};

/// Zipped shape functions phi_i = Psi_i + sum_j w_ij Psi_j of one polygon.
///
/// Build once, then evaluate from any number of threads.
class LocalBasis {
public:
  LocalBasis(const Polygon& polygon, int k, const LocalBasisOptions& options = {});

  int order() const { return k_; }
  int num_dofs() const { return classification_.num_dofs(); }
  const Polygon& polygon() const { return polygon_; }
  const StarCenter& center() const { return center_; }
  const SubTriangulation& subtriangulation() const { return sub_; }
  const FineNodeSet& fine_nodes() const { return fine_; }
  const NodeClassification& classification() const { return classification_; }
  const Eigen::MatrixXd& weights() const { return weights_.W; }
  double constraint_residual() const { return weights_.residual; }
  const ScaledMonomials& monomials() const { return monomials_; }
  const RefBasis& reference_basis() const { return ref_; }

  /// Coordinates of coarse node i.
  const Point2& dof_point(int i) const { return fine_.nodes[classification_.coarse[i]]; }
  /// Values of the zipped functions at the fine nodes of fan triangle t (n_k x N_dof).
  const Eigen::MatrixXd& triangle_expansion(int t) const { return expansions_[t]; }

  /// Fan triangle containing x (lowest index on shared spokes); throws PointOutsideElement.
  int locate(const Point2& x) const;
  void evaluate(const Point2& x, Eigen::VectorXd* values, Eigen::MatrixX2d* gradients) const;
  /// Evaluation at a reference point of fan triangle t; gradients are physical.
  void evaluate_reference(int t, const Point2& ref, Eigen::VectorXd* values, Eigen::MatrixX2d* gradients) const;

  std::string debug_json(long element_id = -1) const;

private:
  void build_weights();

  Polygon polygon_;
  int k_;
  LocalBasisOptions options_;
  StarCenter center_;
  SubTriangulation sub_;
  FineNodeSet fine_;
  NodeClassification classification_;
  ScaledMonomials monomials_;
  RefBasis ref_;
  WeightMatrix weights_;
  std::vector<Eigen::MatrixXd> expansions_;
};

using ScalarField = std::function<double(const Point2&)>;
using VectorField = std::function<Point2(const Point2&)>;

/// Nodal coefficients f(x_i) of the interpolant.
Eigen::VectorXd local_interpolate(const LocalBasis& basis, const ScalarField& f);

struct ReproductionErrors {
  double l2 = 0.0;    // max_alpha || m_alpha - I m_alpha ||_{L2(E)}
  double grad = 0.0;  // max_alpha || grad(m_alpha - I m_alpha) ||_{L2(E)}
};

/// Interpolation error of every scaled monomial of degree <= k, integrated
/// over the fan with a rule of the given degree.
ReproductionErrors polynomial_reproduction_errors(const LocalBasis& basis, int quad_degree);

}  // namespace zfem
