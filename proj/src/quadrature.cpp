#include "zfem/quadrature.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "zfem/errors.hpp"

namespace zfem {

void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights) {
  // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      jac(0, 0) = (beta - alpha) / (ab + 2.0);
    } else {
      jac(i, i) = (beta * beta - alpha * alpha) / ((2.0 * i + ab) * (2.0 * i + ab + 2.0));
    }
  }
  for (int i = 1; i < n; ++i) {
    const double s = 2.0 * i + ab;
    const double b = 4.0 * i * (i + alpha) * (i + beta) * (i + ab) / (s * s * (s + 1.0) * (s - 1.0));
    jac(i, i - 1) = jac(i - 1, i) = std::sqrt(b);
  }
  const double mu0 =
      std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = eig.eigenvalues()(i);
    const double v = eig.eigenvectors()(0, i);
    weights[i] = mu0 * v * v;
  }
}

namespace {

QuadratureRule make_rule(int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  if (degree == 1) {
    rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
    rule.weights = {0.5};
    return rule;
  }
  if (degree == 2) {
    rule.points = {{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}};
    rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    return rule;
  }
  // xhat = s, yhat = t (1 - s): the Jacobian (1 - s) is absorbed into the s-rule.
  const int n = degree / 2 + 1;
  std::vector<double> xs, ws, xt, wt;
  gauss_jacobi(n, 1.0, 0.0, xs, ws);
  gauss_jacobi(n, 0.0, 0.0, xt, wt);
  for (int a = 0; a < n; ++a) {
    const double s = 0.5 * (1.0 + xs[a]);
    for (int b = 0; b < n; ++b) {
      const double t = 0.5 * (1.0 + xt[b]);
      rule.points.push_back({s, t * (1.0 - s)});
      rule.weights.push_back(0.25 * ws[a] * 0.5 * wt[b]);
    }
  }
  return rule;
}

std::vector<QuadratureRule> make_table() {
  std::vector<QuadratureRule> table;
  for (int d = 1; d <= kMaxQuadratureDegree; ++d) table.push_back(make_rule(d));
  return table;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
  if (degree < 1 || degree > kMaxQuadratureDegree) {
    throw UnsupportedOrder("quadrature degree " + std::to_string(degree) + " outside 1.." +
                           std::to_string(kMaxQuadratureDegree));
  }
  static const std::vector<QuadratureRule> table = make_table();
  return table[degree - 1];
}

}  // namespace zfem
