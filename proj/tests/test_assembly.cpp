#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "zfem/assembly.hpp"
#include "zfem/errors.hpp"
#include "zfem/harness.hpp"
#include "zfem/meshgen.hpp"

using namespace zfem;

namespace {

std::string data_path(const std::string& rel) { return std::string(ZFEM_DATA_DIR) + "/" + rel; }

std::shared_ptr<const Discretization> discretize(const Mesh& mesh, int k) {
  return std::make_shared<const Discretization>(mesh, k);
}

CoefficientField unit_mass() {
  CoefficientField c;
  c.diffusion = [](const Point2&) { return Eigen::Matrix2d::Identity().eval(); };
  c.reaction = [](const Point2&) { return 1.0; };
  c.load = [](const Point2&) { return 1.0; };
  return c;
}

CoefficientField poisson_unit_load() {
  CoefficientField c = CoefficientField::laplace();
  c.load = [](const Point2&) { return 1.0; };
  return c;
}

std::vector<Mesh> fixture_meshes() {
  return {gen_cartesian(3),
          gen_distorted_quads(4, 3),
          gen_structured_concave(2),
          read_mesh(data_path("meshes/hanging.mesh")),
          read_mesh(data_path("meshes/voronoi_0.mesh"))};
}

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& m) { return Eigen::MatrixXd(m); }

}  // namespace

TEST_CASE("global DOF counts") {
  const Mesh two({{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}}, {{0, 1, 4, 3}, {1, 2, 5, 4}});
  CHECK(discretize(two, 1)->dofs.size() == 6);
  CHECK(discretize(two, 2)->dofs.size() == 13);
  CHECK(discretize(two, 2)->dofs.num_boundary() == 12);
  // each element: 4k boundary nodes plus n_{k-3} private interior nodes
  CHECK(discretize(two, 4)->dofs.size() == 6 + 7 * 3 + 2 * 3);
  CHECK(discretize(gallery_mesh("regular"), 4)->dofs.size() == 9 * 4 + 3);
  const Polygon oct({{1, 0}, {2, 0}, {3, 1}, {3, 2}, {2, 3}, {1, 3}, {0, 2}, {0, 1}});
  CHECK(LocalBasis(oct, 4).num_dofs() == 35);
  // N_v = 11 vertices, 15 edges on a 5-cell hanging mesh; one DOF per vertex and k-1 per edge
  const Mesh hanging = read_mesh(data_path("meshes/hanging.mesh"));
  for (int k = 1; k <= 4; ++k) CHECK(discretize(hanging, k)->dofs.size() == 11 + 15 * (k - 1) + 5 * poly_dim(k - 3));
}

TEST_CASE("shared edges carry shared DOFs and interior DOFs stay private") {
  for (const Mesh& mesh : fixture_meshes()) {
    for (int k = 1; k <= 4; ++k) {
      const auto disc = discretize(mesh, k);
      const DofMap& dofs = disc->dofs;
      std::vector<int> owners(dofs.size(), 0);
      for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const LocalBasis& b = disc->bases[c];
        REQUIRE(dofs.element_dofs[c].size() == static_cast<std::size_t>(b.num_dofs()));
        for (int i = 0; i < b.num_dofs(); ++i) {
          const int g = dofs.element_dofs[c][i];
          CHECK(distance(dofs.points[g], b.dof_point(i)) <= 1e-10 * mesh.h());
          ++owners[g];
        }
      }
      for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const LocalBasis& b = disc->bases[c];
        for (int i = b.fine_nodes().num_boundary(); i < b.num_dofs(); ++i) {
          CHECK(owners[dofs.element_dofs[c][i]] == 1);
          CHECK(dofs.boundary[dofs.element_dofs[c][i]] == 0);
        }
      }
      for (int g = 0; g < dofs.size(); ++g) {
        const Point2& p = dofs.points[g];
        const bool on_square = std::min({p.x, p.y, 1.0 - p.x, 1.0 - p.y}) <= 1e-12;
        CHECK((dofs.boundary[g] != 0) == on_square);
      }
    }
  }
}

TEST_CASE("a hanging vertex missing from the long edge's cell is an edge mismatch") {
  const Mesh mesh({{0, 0}, {0.5, 0}, {1, 0}, {0.5, 0.5}, {1, 0.5}, {0, 1}, {0.5, 1}, {1, 1}},
                  {{0, 1, 6, 5}, {1, 2, 4, 3}, {3, 4, 7, 6}});
  // the long edge is covered exactly by the two short ones, so the geometry itself is accepted
  CHECK(mesh.issues().empty());
  CHECK_THROWS_AS(Discretization(mesh, 2), EdgeMismatch);
}

TEST_CASE("element matrices: constants in the kernel and unit mass") {
  for (const std::string& name : gallery_names()) {
    for (int k = 1; k <= 5; ++k) {
      const LocalBasis b(gallery(name), k);
      const ElementSystem lap = element_system(b, CoefficientField::laplace(), default_quadrature_degree(k));
      CHECK(lap.matrix.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((lap.matrix - lap.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(lap.load.cwiseAbs().maxCoeff() == 0.0);
      const ElementSystem mass = element_system(b, unit_mass(), default_quadrature_degree(k));
      // the stiffness part sums to zero only up to cancellation in its entries
      CHECK(std::abs(mass.matrix.sum() - b.polygon().area()) <= 1e-13 * lap.matrix.cwiseAbs().sum());
      CHECK(mass.load.sum() == doctest::Approx(b.polygon().area()).epsilon(1e-12));
    }
  }
  const LocalBasis sq(Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 1);
  CHECK(element_system(sq, unit_mass(), 4).matrix.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("element matrices agree with over-integration") {
  for (const std::string& name : {"irregular", "concave", "hanging"}) {
    for (int k = 1; k <= 5; ++k) {
      const LocalBasis b(gallery(name), k);
      const CoefficientField coeffs = manufactured::coefficients();
      const Eigen::MatrixXd a = element_system(b, coeffs, default_quadrature_degree(k)).matrix;
      const Eigen::MatrixXd o = element_system(b, coeffs, 2 * k + 6).matrix;
      CHECK((a - o).cwiseAbs().maxCoeff() <= 1e-8 * o.cwiseAbs().maxCoeff());
    }
  }
  CHECK_THROWS_AS(element_system(LocalBasis(gallery("triangle"), 3), CoefficientField::laplace(), 5), ValidationError);
}

TEST_CASE("coefficient checks") {
  CoefficientField bad = CoefficientField::laplace();
  bad.diffusion = [](const Point2&) { return Eigen::Matrix2d{{1.0, 0.5}, {0.0, 1.0}}; };
  CHECK_THROWS_AS(check_coefficients(bad, {{0.5, 0.5}}), ValidationError);
  bad = CoefficientField::laplace();
  bad.reaction = [](const Point2& x) { return x.x - 0.5; };
  CHECK_THROWS_AS(check_coefficients(bad, {{0.1, 0.1}}), ValidationError);
  CHECK_NOTHROW(check_coefficients(manufactured::coefficients(), {{0, 0}, {1, 1}, {0.3, 0.9}}));
}

TEST_CASE("assembled matrices are symmetric and the reduced matrix is positive definite") {
  for (const Mesh& mesh : {gen_cartesian(2), gen_structured_concave(1), read_mesh(data_path("meshes/hanging.mesh"))}) {
    for (int k = 1; k <= 3; ++k) {
      const auto disc = discretize(mesh, k);
      const SymmetricSparseSystem sys =
          assemble(disc->mesh, disc->bases, disc->dofs, manufactured::coefficients(), default_quadrature_degree(k));
      const Eigen::MatrixXd b = dense(sys.matrix);
      CHECK((b - b.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff());
      const ReducedSystem red = apply_dirichlet(sys, disc->dofs, manufactured::solution);
      REQUIRE(red.matrix.rows() <= 200);
      REQUIRE(red.matrix.rows() > 0);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense(red.matrix));
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("Dirichlet elimination") {
  const auto disc = discretize(gen_distorted_quads(4, 9), 2);
  const SymmetricSparseSystem sys = assemble(disc->mesh, disc->bases, disc->dofs, poisson_unit_load(), 6);
  const ReducedSystem zero = apply_dirichlet(sys, disc->dofs, [](const Point2&) { return 0.0; });
  const Eigen::MatrixXd b = dense(sys.matrix);
  const Eigen::MatrixXd r = dense(zero.matrix);
  REQUIRE(static_cast<int>(zero.free_dofs.size()) == disc->dofs.size() - disc->dofs.num_boundary());
  for (std::size_t i = 0; i < zero.free_dofs.size(); ++i) {
    CHECK(zero.load(i) == sys.load(zero.free_dofs[i]));
    for (std::size_t j = 0; j < zero.free_dofs.size(); ++j) CHECK(r(i, j) == b(zero.free_dofs[i], zero.free_dofs[j]));
  }
  CHECK(zero.lift.cwiseAbs().maxCoeff() == 0.0);

  // lifting: B_ff u_f = F_f - B_fb g_b
  auto g = [](const Point2& x) { return 1.0 + x.x - 2.0 * x.y; };
  const ReducedSystem lifted = apply_dirichlet(sys, disc->dofs, g);
  Eigen::VectorXd gb = Eigen::VectorXd::Zero(disc->dofs.size());
  for (int i = 0; i < disc->dofs.size(); ++i) {
    if (disc->dofs.boundary[i]) gb(i) = g(disc->dofs.points[i]);
  }
  const Eigen::VectorXd full = sys.load - b * gb;
  for (std::size_t i = 0; i < lifted.free_dofs.size(); ++i) {
    CHECK(lifted.load(i) == doctest::Approx(full(lifted.free_dofs[i])).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("solve_spd") {
  Eigen::SparseMatrix<double> one(1, 1);
  one.insert(0, 0) = 4.0;
  CHECK(solve_spd(one, Eigen::VectorXd::Constant(1, 2.0)).x(0) == 0.5);

  Eigen::SparseMatrix<double> id(5, 5);
  id.setIdentity();
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(5, 0);
  CHECK(solve_spd(id, e1).x == e1);

  Eigen::SparseMatrix<double> indefinite(2, 2);
  indefinite.insert(0, 0) = 1.0;
  indefinite.insert(1, 1) = -1.0;
  CHECK_THROWS_AS(solve_spd(indefinite, Eigen::VectorXd::Ones(2)), SolverBreakdown);

  const auto disc = discretize(gen_cartesian(4), 1);
  const SymmetricSparseSystem sys = assemble(disc->mesh, disc->bases, disc->dofs, poisson_unit_load(), 4);
  const ReducedSystem red = apply_dirichlet(sys, disc->dofs, [](const Point2&) { return 0.0; });
  const SolveReport rep = solve_spd(red.matrix, red.load);
  const Eigen::VectorXd oracle = dense(red.matrix).ldlt().solve(red.load);
  CHECK((rep.x - oracle).cwiseAbs().maxCoeff() <= 1e-10 * oracle.cwiseAbs().maxCoeff());
  CHECK(rep.relative_residual <= 1e-11);
  // bilinear stiffness on squares is an M-matrix, so a positive load gives a positive solution
  CHECK(rep.x.minCoeff() > 0.0);
}

TEST_CASE("boundary values are imposed exactly") {
  const auto disc = discretize(gen_structured_concave(2), 3);
  const DiscreteSolution sol = solve_problem(disc, manufactured::coefficients(), manufactured::solution, 8);
  for (int i = 0; i < disc->dofs.size(); ++i) {
    if (disc->dofs.boundary[i]) CHECK(sol.coefficients()(i) == manufactured::solution(disc->dofs.points[i]));
  }
}

TEST_CASE("patch test on every fixture mesh") {
  std::vector<Mesh> meshes = fixture_meshes();
  for (const std::string& name : gallery_names()) meshes.push_back(gallery_mesh(name));
  for (const Mesh& mesh : meshes) {
    for (int k = 1; k <= 6; ++k) {
      const ErrorNorms e = patch_test(mesh, k);
      CHECK(e.l2 <= 1e-9);
      CHECK(e.grad <= 1e-8);
    }
  }
}

TEST_CASE("error norms") {
  const auto disc = discretize(gen_cartesian(4), 2);
  const DiscreteSolution zero(disc, Eigen::VectorXd::Zero(disc->dofs.size()));
  const ErrorNorms e = compute_errors(zero, manufactured::solution, manufactured::gradient, 20);
  CHECK(e.l2 == doctest::Approx(0.5).epsilon(1e-10));
  // |grad u|^2 integrates to 2 * (2 pi)^2 / 4
  CHECK(e.grad == doctest::Approx(std::sqrt(2.0) * M_PI).epsilon(1e-10));

  for (const Mesh& mesh : fixture_meshes()) {
    for (int k = 1; k <= 4; ++k) {
      const PatchProblem p(k);
      const auto d = discretize(mesh, k);
      const DiscreteSolution interp = interpolate(d, [&](const Point2& x) { return p.value(x); });
      const ErrorNorms ie = compute_errors(
          interp, [&](const Point2& x) { return p.value(x); }, [&](const Point2& x) { return p.gradient(x); },
          default_quadrature_degree(k));
      CHECK(ie.l2 <= 1e-9);
      CHECK(ie.grad <= 1e-9);
    }
  }
}

TEST_CASE("solutions are continuous across shared edges") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::vector<Mesh> meshes = fixture_meshes();
  meshes.push_back(read_mesh(data_path("meshes/concave_4.mesh")));
  for (const Mesh& mesh : meshes) {
    for (int k = 1; k <= 5; ++k) {
      const auto disc = discretize(mesh, k);
      Eigen::VectorXd u(disc->dofs.size());
      for (int i = 0; i < u.size(); ++i) u(i) = normal(rng);
      const DiscreteSolution sol(disc, u);
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> first;
      int shared = 0;
      for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const auto& cell = mesh.cells()[c];
        for (std::size_t e = 0; e < cell.size(); ++e) {
          const std::size_t a = cell[e], b = cell[(e + 1) % cell.size()];
          const auto key = std::minmax(a, b);
          const auto it = first.find(key);
          if (it == first.end()) {
            first[key] = c;
            continue;
          }
          ++shared;
          for (int s = 1; s <= 5; ++s) {
            const Point2 x = mesh.vertices()[a] + (s / 6.0) * (mesh.vertices()[b] - mesh.vertices()[a]);
            CHECK(std::abs(sol.value(c, x) - sol.value(it->second, x)) <= 1e-9);
          }
        }
      }
      CHECK(shared > 0);
    }
  }
}

TEST_CASE("errors decrease under refinement") {
  for (const std::string family : {"cartesian", "distorted", "concave"}) {
    for (int k = 1; k <= 4; ++k) {
      ConvergenceOptions opt;
      opt.family = family;
      opt.k = k;
      opt.levels = 3;
      const auto records = run_convergence(opt);
      REQUIRE(records.size() == 3);
      for (std::size_t l = 1; l < records.size(); ++l) {
        CHECK(records[l].h < records[l - 1].h);
        CHECK(records[l].err0 < records[l - 1].err0);
        CHECK(records[l].errgrad < records[l - 1].errgrad);
      }
    }
  }
}

TEST_CASE("k = 1 energy error halves with h on distorted quads") {
  ConvergenceOptions opt;
  opt.family = "distorted";
  opt.k = 1;
  opt.levels = 4;
  const auto r = run_convergence(opt);
  CHECK(r[1].errgrad / r[2].errgrad == doctest::Approx(2.0).epsilon(0.2));
  CHECK(r[2].errgrad / r[3].errgrad == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("assembly is deterministic") {
  const auto disc = discretize(gen_distorted_quads(8, 4), 3);
  const SymmetricSparseSystem a = assemble(disc->mesh, disc->bases, disc->dofs, manufactured::coefficients(), 8);
  const SymmetricSparseSystem b = assemble(disc->mesh, disc->bases, disc->dofs, manufactured::coefficients(), 8);
  CHECK((dense(a.matrix) - dense(b.matrix)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.load == b.load);
}
