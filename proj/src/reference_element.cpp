#include "zfem/reference_element.hpp"

#include <algorithm>
#include <string>

#include "zfem/errors.hpp"

namespace zfem {

RefNodeLayout::RefNodeLayout(int k) : k_(k) {
  if (k < 1 || k > kMaxOrder) throw UnsupportedOrder("Lagrange order " + std::to_string(k) + " outside 1.." + std::to_string(kMaxOrder));
  lattice_.reserve(poly_dim(k));
  lattice_.push_back({0, 0});
  lattice_.push_back({k, 0});
  lattice_.push_back({0, k});
  for (int t = 1; t < k; ++t) lattice_.push_back({t, 0});
  for (int t = 1; t < k; ++t) lattice_.push_back({k - t, t});
  for (int t = 1; t < k; ++t) lattice_.push_back({0, k - t});
  for (int i = 1; i < k; ++i) {
    for (int j = 1; i + j < k; ++j) lattice_.push_back({i, j});
  }
  index_.assign((k + 1) * (k + 1), -1);
  for (int l = 0; l < size(); ++l) index_[lattice_[l].i * (k + 1) + lattice_[l].j] = l;
}

Point2 RefNodeLayout::node(int l) const {
  return Point2{static_cast<double>(lattice_[l].i) / k_, static_cast<double>(lattice_[l].j) / k_};
}

std::vector<Point2> RefNodeLayout::nodes() const {
  std::vector<Point2> out;
  out.reserve(lattice_.size());
  for (int l = 0; l < size(); ++l) out.push_back(node(l));
  return out;
}

std::vector<int> RefNodeLayout::edge_nodes(int edge) const {
  static constexpr int start[3] = {0, 1, 2};
  static constexpr int end[3] = {1, 2, 0};
  std::vector<int> out{start[edge]};
  for (int t = 1; t < k_; ++t) out.push_back(3 + edge * (k_ - 1) + (t - 1));
  out.push_back(end[edge]);
  return out;
}

RefNodeLayout ref_nodes(int k) { return RefNodeLayout(k); }

RefBasis::RefBasis(int k) : layout_(k) {}

Eigen::VectorXd RefBasis::values(const Point2& ref) const {
  Eigen::VectorXd v;
  evaluate(ref, &v, nullptr);
  return v;
}

Eigen::MatrixX2d RefBasis::gradients(const Point2& ref) const {
  Eigen::MatrixX2d g;
  evaluate(ref, nullptr, &g);
  return g;
}

void RefBasis::evaluate(const Point2& ref, Eigen::VectorXd* values, Eigen::MatrixX2d* gradients) const {
  const int k = order();
  const double lambda[3] = {ref.x, ref.y, 1.0 - ref.x - ref.y};
  // f[d][a] = prod_{m<a} (k lambda_d - m) / (a - m), df its derivative in lambda_d
  double f[3][kMaxOrder + 1];
  double df[3][kMaxOrder + 1];
  for (int d = 0; d < 3; ++d) {
    f[d][0] = 1.0;
    df[d][0] = 0.0;
    for (int a = 1; a <= k; ++a) {
      const double factor = (k * lambda[d] - (a - 1)) / a;
      f[d][a] = f[d][a - 1] * factor;
      df[d][a] = df[d][a - 1] * factor + f[d][a - 1] * static_cast<double>(k) / a;
    }
  }
  const int n = size();
  if (values) values->resize(n);
  if (gradients) gradients->resize(n, 2);
  for (int l = 0; l < n; ++l) {
    const int a1 = layout_.lattice()[l].i;
    const int a2 = layout_.lattice()[l].j;
    const int a3 = k - a1 - a2;
    const double p1 = f[0][a1], p2 = f[1][a2], p3 = f[2][a3];
    if (values) (*values)(l) = p1 * p2 * p3;
    if (gradients) {
      // lambda_3 = 1 - x - y contributes -d/dlambda_3 to both components
      (*gradients)(l, 0) = df[0][a1] * p2 * p3 - p1 * p2 * df[2][a3];
      (*gradients)(l, 1) = p1 * df[1][a2] * p3 - p1 * p2 * df[2][a3];
    }
  }
}

}  // namespace zfem
