#include <doctest.h>

#include <cmath>
#include <random>

#include "zfem/errors.hpp"
#include "zfem/reference_element.hpp"

using namespace zfem;

namespace {

Point2 random_ref(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double x = unit(rng), y = unit(rng);
  if (x + y > 1.0) x = 1.0 - x, y = 1.0 - y;
  return {x, y};
}

}  // namespace

TEST_CASE("reference layouts for low orders") {
  const RefNodeLayout k1 = ref_nodes(1);
  REQUIRE(k1.size() == 3);
  CHECK(k1.node(0) == Point2{0, 0});
  CHECK(k1.node(1) == Point2{1, 0});
  CHECK(k1.node(2) == Point2{0, 1});

  const RefNodeLayout k2 = ref_nodes(2);
  REQUIRE(k2.size() == 6);
  CHECK(k2.num_interior() == 0);
  CHECK(k2.node(3) == Point2{0.5, 0});
  CHECK(k2.node(4) == Point2{0.5, 0.5});
  CHECK(k2.node(5) == Point2{0, 0.5});

  const RefNodeLayout k3 = ref_nodes(3);
  REQUIRE(k3.size() == 10);
  REQUIRE(k3.num_interior() == 1);
  CHECK(k3.node(k3.first_interior()).x == doctest::Approx(1.0 / 3.0));
  CHECK(k3.node(k3.first_interior()).y == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("layout invariants for all supported orders") {
  for (int k = 1; k <= kMaxOrder; ++k) {
    const RefNodeLayout layout(k);
    CHECK(layout.size() == (k + 1) * (k + 2) / 2);
    CHECK(layout.first_interior() == 3 * k);
    CHECK(layout.num_interior() == poly_dim(k - 3));
    for (int l = 0; l < layout.size(); ++l) {
      const auto [i, j] = layout.lattice()[l];
      CHECK(i >= 0);
      CHECK(j >= 0);
      CHECK(i + j <= k);
      CHECK(layout.index_of(i, j) == l);
      const bool on_boundary = i == 0 || j == 0 || i + j == k;
      CHECK(on_boundary == (l < layout.first_interior()));
    }
    for (int e = 0; e < 3; ++e) {
      const auto nodes = layout.edge_nodes(e);
      CHECK(nodes.size() == static_cast<std::size_t>(k + 1));
    }
  }
  CHECK_THROWS_AS(RefNodeLayout(0), UnsupportedOrder);
  CHECK_THROWS_AS(RefNodeLayout(11), UnsupportedOrder);
  CHECK_THROWS_AS(RefBasis(11), UnsupportedOrder);
}

TEST_CASE("edge node lists walk each reference edge in order") {
  const RefNodeLayout layout(4);
  const Point2 start[3] = {{0, 0}, {1, 0}, {0, 1}};
  const Point2 end[3] = {{1, 0}, {0, 1}, {0, 0}};
  for (int e = 0; e < 3; ++e) {
    const auto nodes = layout.edge_nodes(e);
    for (std::size_t t = 0; t < nodes.size(); ++t) {
      const double s = static_cast<double>(t) / 4.0;
      const Point2 expect = (1.0 - s) * start[e] + s * end[e];
      CHECK(distance(layout.node(nodes[t]), expect) <= 1e-15);
    }
  }
}

TEST_CASE("k = 1 basis at the centroid") {
  const Eigen::VectorXd v = ref_basis_eval(1, {1.0 / 3.0, 1.0 / 3.0});
  for (int l = 0; l < 3; ++l) CHECK(v(l) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("quadratic basis matches the closed-form P2 functions") {
  const RefBasis basis(2);
  std::mt19937_64 rng(5);
  std::vector<Point2> points{{0.25, 0.25}};
  for (int s = 0; s < 10; ++s) points.push_back(random_ref(rng));
  for (const Point2& p : points) {
    const double l1 = p.x, l2 = p.y, l3 = 1.0 - p.x - p.y;
    // layout order: (0,0), (2,0), (0,2), (1,0), (1,1), (0,1)
    const double expect[6] = {l3 * (2 * l3 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l1 * l3, 4 * l1 * l2,
                              4 * l2 * l3};
    const Eigen::VectorXd v = basis.values(p);
    for (int l = 0; l < 6; ++l) CHECK(v(l) == doctest::Approx(expect[l]).epsilon(1e-14));
  }
}

TEST_CASE("Kronecker delta on the lattice") {
  for (int k = 1; k <= kMaxOrder; ++k) {
    const RefBasis basis(k);
    for (int m = 0; m < basis.size(); ++m) {
      const Eigen::VectorXd v = basis.values(basis.layout().node(m));
      for (int l = 0; l < basis.size(); ++l) CHECK(std::abs(v(l) - (l == m ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("partition of unity and zero gradient sum") {
  std::mt19937_64 rng(7);
  for (int k = 1; k <= kMaxOrder; ++k) {
    const RefBasis basis(k);
    for (int s = 0; s < 20; ++s) {
      const Point2 p = random_ref(rng);
      Eigen::VectorXd v;
      Eigen::MatrixX2d g;
      basis.evaluate(p, &v, &g);
      CHECK(std::abs(v.sum() - 1.0) <= 1e-12);
      CHECK(std::abs(g.col(0).sum()) <= 1e-11);
      CHECK(std::abs(g.col(1).sum()) <= 1e-11);
    }
  }
}

TEST_CASE("polynomial reproduction on the reference triangle") {
  std::mt19937_64 rng(9);
  for (int k = 1; k <= 6; ++k) {
    const RefBasis basis(k);
    const auto nodes = basis.layout().nodes();
    for (int a = 0; a <= k; ++a) {
      for (int b = 0; a + b <= k; ++b) {
        auto p = [a, b](const Point2& x) { return std::pow(x.x, a) * std::pow(x.y, b); };
        Eigen::VectorXd coeff(basis.size());
        for (int l = 0; l < basis.size(); ++l) coeff(l) = p(nodes[l]);
        for (int s = 0; s < 50; ++s) {
          const Point2 x = random_ref(rng);
          CHECK(std::abs(coeff.dot(basis.values(x)) - p(x)) <= 1e-11);
        }
      }
    }
  }
}

TEST_CASE("gradients agree with central differences") {
  std::mt19937_64 rng(13);
  const double step = 1e-6;
  for (int k = 1; k <= 6; ++k) {
    const RefBasis basis(k);
    for (int s = 0; s < 20; ++s) {
      Point2 p = random_ref(rng);
      p = 0.98 * p + Point2{0.01, 0.01};
      const Eigen::MatrixX2d g = basis.gradients(p);
      const Eigen::VectorXd dx = (basis.values(p + Point2{step, 0}) - basis.values(p - Point2{step, 0})) / (2 * step);
      const Eigen::VectorXd dy = (basis.values(p + Point2{0, step}) - basis.values(p - Point2{0, step})) / (2 * step);
      CHECK((g.col(0) - dx).cwiseAbs().maxCoeff() <= 1e-5);
      CHECK((g.col(1) - dy).cwiseAbs().maxCoeff() <= 1e-5);
    }
  }
}
