#pragma once

#include <vector>

#include <Eigen/Core>

#include "zfem/geometry.hpp"

namespace zfem {

inline constexpr int kMaxOrder = 10;

/// Dimension of P_k in two variables, (k+1)(k+2)/2; zero for negative k.
constexpr int poly_dim(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

/// Integer lattice position of a reference node: xhat = (i, j) / k.
struct LatticeIndex {
  int i = 0;
  int j = 0;
};

/// Evenly spaced nodes of order k on the reference triangle (0,0), (1,0), (0,1).
///
/// Enumeration: the three vertices (0,0), (k,0), (0,k); then the k-1 interior
/// points of edge 0 (v0 -> v1), edge 1 (v1 -> v2) and edge 2 (v2 -> v0), each
/// walked from its start vertex; then the interior lattice points sorted
/// lexicographically by (i, j).
class RefNodeLayout {
public:
  explicit RefNodeLayout(int k);

  int order() const { return k_; }
  int size() const { return static_cast<int>(lattice_.size()); }
  const std::vector<LatticeIndex>& lattice() const { return lattice_; }
  Point2 node(int l) const;
  std::vector<Point2> nodes() const;

  /// Layout indices on reference edge e, including both end vertices, from its start vertex.
  std::vector<int> edge_nodes(int edge) const;
  int first_interior() const { return 3 * k_; }
  int num_interior() const { return poly_dim(k_ - 3); }
  /// Layout index of lattice position (i, j).
  int index_of(int i, int j) const { return index_[i * (k_ + 1) + j]; }

private:
  int k_;
  std::vector<LatticeIndex> lattice_;
  std::vector<int> index_;
};

/// Throws UnsupportedOrder unless 1 <= k <= kMaxOrder.
RefNodeLayout ref_nodes(int k);

/// Lagrange basis on a RefNodeLayout, written as a product over the three
/// barycentric coordinates of the lattice factors (k lambda - m) / (a - m).
class RefBasis {
public:
  explicit RefBasis(int k);

  int order() const { return layout_.order(); }
  int size() const { return layout_.size(); }
  const RefNodeLayout& layout() const { return layout_; }

  Eigen::VectorXd values(const Point2& ref) const;
  /// Row l holds the reference gradient of basis function l.
  Eigen::MatrixX2d gradients(const Point2& ref) const;
  void evaluate(const Point2& ref, Eigen::VectorXd* values, Eigen::MatrixX2d* gradients) const;

private:
  RefNodeLayout layout_;
};

inline Eigen::VectorXd ref_basis_eval(int k, const Point2& ref) { return RefBasis(k).values(ref); }
inline Eigen::MatrixX2d ref_basis_grad(int k, const Point2& ref) { return RefBasis(k).gradients(ref); }

}  // namespace zfem
