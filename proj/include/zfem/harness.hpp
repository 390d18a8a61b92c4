#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zfem/assembly.hpp"

namespace zfem {

/// Diffusion-reaction test problem on the unit square with exact solution
/// u = sin(2 pi x) sin(2 pi y), D = [[1 + y^2, -xy], [-xy, 1 + x^2]],
/// gamma = xy and f = -div(D grad u) + gamma u in closed form.
namespace manufactured {
double solution(const Point2& x);
Point2 gradient(const Point2& x);
Eigen::Matrix2d diffusion(const Point2& x);
double reaction(const Point2& x);
double load(const Point2& x);
CoefficientField coefficients();
}  // namespace manufactured

/// Polynomial of total degree k with constant diffusion, zero reaction and
/// matching load; solving it must reproduce u exactly.
struct PatchProblem {
  explicit PatchProblem(int k);

  int order;
  Eigen::Matrix2d diffusion;
  double value(const Point2& x) const;
  Point2 gradient(const Point2& x) const;
  double load(const Point2& x) const;
  CoefficientField coefficients() const;

private:
  std::vector<LatticeIndex> exponents_;
  std::vector<double> coefficients_;
};

/// Solve the patch problem on the mesh and return the error norms.
ErrorNorms patch_test(const Mesh& mesh, int k);

struct PolyRecord {
  std::string polygon;
  int k = 0;
  double err0 = 0.0;
  double errgrad = 0.0;
};

/// Monomial interpolation errors of each gallery polygon, quadrature degree 2k+4.
std::vector<PolyRecord> reproduce_poly(const std::vector<int>& orders, const std::vector<std::string>& polygons);
std::string poly_csv_header();
std::string poly_csv_row(const PolyRecord& r);

/// Mesh of a refinement family at a level: cartesian, distorted and concave use
/// n = 4 * 2^level cells per side; "file:a,b,c" reads the level-th path.
Mesh family_mesh(const std::string& family, int level, std::uint64_t seed);
/// Number of levels a family provides (-1 when unbounded).
int family_levels(const std::string& family);

struct ConvergenceRecord {
  std::string family;
  int k = 0;
  int level = 0;
  double h = 0.0;
  int ndof = 0;
  double err0 = 0.0;
  double errgrad = 0.0;
  double seconds = 0.0;
};

struct ConvergenceOptions {
  std::string family = "distorted";
  int k = 1;
  int levels = 4;
  std::uint64_t seed = 1;
  int quad_degree = 0;  // 0: 2k + 2
  bool timings = false;  // seconds column stays 0 unless set, keeping output reproducible
  std::function<void(const ConvergenceRecord&)> on_record;
  /// Receives one JSON object per element and level when set.
  std::function<void(const std::string&)> on_element_debug;
};

std::vector<ConvergenceRecord> run_convergence(const ConvergenceOptions& options);
std::string convergence_csv_header();
std::string convergence_csv_row(const ConvergenceRecord& r);

/// Least-squares slope of log(err) against log(h); needs at least three points.
double eoc_fit(const std::vector<double>& h, const std::vector<double>& err);

struct EocReport {
  std::string family;
  int k = 0;
  double eoc0 = 0.0;
  double eocgrad = 0.0;
};

EocReport eoc_report(const std::vector<ConvergenceRecord>& records);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace zfem
