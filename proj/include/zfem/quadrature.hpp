#pragma once

#include <vector>

#include "zfem/geometry.hpp"

namespace zfem {

inline constexpr int kMaxQuadratureDegree = 25;

/// Positive-weight rule on the reference triangle; weights sum to 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<Point2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Rule exact for all polynomials of total degree <= d, 1 <= d <= 25.
/// Degrees 1 and 2 use the centroid and three-point rules; higher degrees use
/// a collapsed Gauss-Jacobi x Gauss-Legendre product rule. Rules are built
/// once and shared.
const QuadratureRule& quadrature_rule(int degree);

/// Gauss-Jacobi nodes and weights on [-1, 1] for weight (1-x)^alpha (1+x)^beta.
void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace zfem
