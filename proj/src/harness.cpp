#include "zfem/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "zfem/errors.hpp"
#include "zfem/meshgen.hpp"

namespace zfem {

namespace manufactured {

namespace {
constexpr double kWave = 2.0 * std::numbers::pi;
}

double solution(const Point2& p) { return std::sin(kWave * p.x) * std::sin(kWave * p.y); }

Point2 gradient(const Point2& p) {
  return {kWave * std::cos(kWave * p.x) * std::sin(kWave * p.y), kWave * std::sin(kWave * p.x) * std::cos(kWave * p.y)};
}

Eigen::Matrix2d diffusion(const Point2& p) {
  Eigen::Matrix2d d;
  d << 1.0 + p.y * p.y, -p.x * p.y, -p.x * p.y, 1.0 + p.x * p.x;
  return d;
}

double reaction(const Point2& p) { return p.x * p.y; }

double load(const Point2& p) {
  const double a2 = kWave * kWave;
  const double u = solution(p);
  const Point2 g = gradient(p);
  const double uxy = a2 * std::cos(kWave * p.x) * std::cos(kWave * p.y);
  return a2 * (2.0 + p.x * p.x + p.y * p.y) * u + 2.0 * p.x * p.y * uxy + p.x * g.x + p.y * g.y + p.x * p.y * u;
}

CoefficientField coefficients() { return CoefficientField{diffusion, reaction, load}; }

}  // namespace manufactured

PatchProblem::PatchProblem(int k) : order(k) {
  diffusion << 2.0, 0.5, 0.5, 1.0;
  for (int d = 0; d <= k; ++d) {
    for (int b = 0; b <= d; ++b) {
      const int a = d - b;
      exponents_.push_back({a, b});
      coefficients_.push_back(((a + b) % 2 ? -1.0 : 1.0) / (1.0 + a + 2.0 * b));
    }
  }
}

namespace {

// x^a with 0^0 = 1 and negative powers treated as 0
double ipow(double x, int a) {
  if (a < 0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < a; ++i) r *= x;
  return r;
}

}  // namespace

double PatchProblem::value(const Point2& x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < exponents_.size(); ++m) {
    s += coefficients_[m] * ipow(x.x, exponents_[m].i) * ipow(x.y, exponents_[m].j);
  }
  return s;
}

Point2 PatchProblem::gradient(const Point2& x) const {
  Point2 g;
  for (std::size_t m = 0; m < exponents_.size(); ++m) {
    const int a = exponents_[m].i, b = exponents_[m].j;
    g.x += coefficients_[m] * a * ipow(x.x, a - 1) * ipow(x.y, b);
    g.y += coefficients_[m] * b * ipow(x.x, a) * ipow(x.y, b - 1);
  }
  return g;
}

double PatchProblem::load(const Point2& x) const {
  double uxx = 0.0, uxy = 0.0, uyy = 0.0;
  for (std::size_t m = 0; m < exponents_.size(); ++m) {
    const int a = exponents_[m].i, b = exponents_[m].j;
    const double c = coefficients_[m];
    uxx += c * a * (a - 1) * ipow(x.x, a - 2) * ipow(x.y, b);
    uxy += c * a * b * ipow(x.x, a - 1) * ipow(x.y, b - 1);
    uyy += c * b * (b - 1) * ipow(x.x, a) * ipow(x.y, b - 2);
  }
  return -(diffusion(0, 0) * uxx + 2.0 * diffusion(0, 1) * uxy + diffusion(1, 1) * uyy);
}

CoefficientField PatchProblem::coefficients() const {
  const Eigen::Matrix2d d = diffusion;
  return CoefficientField{[d](const Point2&) { return d; }, [](const Point2&) { return 0.0; },
                          [problem = *this](const Point2& x) { return problem.load(x); }};
}

ErrorNorms patch_test(const Mesh& mesh, int k) {
  const PatchProblem problem(k);
  auto disc = std::make_shared<const Discretization>(mesh, k);
  const int degree = default_quadrature_degree(k);
  const DiscreteSolution sol =
      solve_problem(disc, problem.coefficients(), [&](const Point2& x) { return problem.value(x); }, degree);
  return compute_errors(
      sol, [&](const Point2& x) { return problem.value(x); }, [&](const Point2& x) { return problem.gradient(x); },
      degree);
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

// quotes a field holding a comma, quote or newline
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<PolyRecord> reproduce_poly(const std::vector<int>& orders, const std::vector<std::string>& polygons) {
  std::vector<PolyRecord> out;
  for (const std::string& name : polygons) {
    const Polygon poly = gallery(name);
    for (int k : orders) {
      if (k < 1 || k > 6) throw UnsupportedOrder("reproduction orders must lie in 1..6, got " + std::to_string(k));
      const LocalBasis basis(poly, k);
      const ReproductionErrors e = polynomial_reproduction_errors(basis, 2 * k + 4);
      out.push_back({name, k, e.l2, e.grad});
    }
  }
  return out;
}

std::string poly_csv_header() { return "polygon,k,err_i0,err_igrad"; }

std::string poly_csv_row(const PolyRecord& r) {
  return csv_field(r.polygon) + "," + std::to_string(r.k) + "," + format_double(r.err0) + "," + format_double(r.errgrad);
}

namespace {

std::vector<std::string> split_paths(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int family_levels(const std::string& family) {
  if (family.rfind("file:", 0) == 0) return static_cast<int>(split_paths(family.substr(5)).size());
  if (family == "cartesian" || family == "distorted" || family == "concave") return -1;
  throw UnknownName("unknown mesh family '" + family + "'");
}

Mesh family_mesh(const std::string& family, int level, std::uint64_t seed) {
  if (level < 0) throw ValidationError("refinement level must be non-negative");
  if (family.rfind("file:", 0) == 0) {
    const auto paths = split_paths(family.substr(5));
    if (level >= static_cast<int>(paths.size())) {
      throw ValidationError("family '" + family + "' has only " + std::to_string(paths.size()) + " levels");
    }
    return read_mesh(paths[level]);
  }
  if (level > 10) throw ValidationError("refinement level too large");
  const int n = 4 << level;
  if (family == "cartesian") return gen_cartesian(n);
  if (family == "distorted") return gen_distorted_quads(n, seed);
  if (family == "concave") return gen_structured_concave(n);
  throw UnknownName("unknown mesh family '" + family + "'");
}

std::vector<ConvergenceRecord> run_convergence(const ConvergenceOptions& options) {
  if (options.k < 1 || options.k > 6) throw UnsupportedOrder("order must lie in 1..6, got " + std::to_string(options.k));
  if (options.levels < 1) throw ValidationError("at least one refinement level is required");
  const int available = family_levels(options.family);
  if (available >= 0 && options.levels > available) {
    throw ValidationError("family '" + options.family + "' provides " + std::to_string(available) + " levels");
  }
  const int k = options.k;
  const int degree = options.quad_degree > 0 ? options.quad_degree : default_quadrature_degree(k);
  const int error_degree = std::max(degree, default_quadrature_degree(k));
  const CoefficientField coeffs = manufactured::coefficients();

  std::vector<ConvergenceRecord> records;
  for (int level = 0; level < options.levels; ++level) {
    const auto start = std::chrono::steady_clock::now();
    Mesh mesh = family_mesh(options.family, level, options.seed);
    check_coefficients(coeffs, mesh.vertices());
    auto disc = std::make_shared<const Discretization>(std::move(mesh), k);
    if (options.on_element_debug) {
      for (std::size_t c = 0; c < disc->bases.size(); ++c) {
        nlohmann::json j = nlohmann::json::parse(disc->bases[c].debug_json(static_cast<long>(c)));
        j["level"] = level;
        options.on_element_debug(j.dump());
      }
    }
    const DiscreteSolution sol = solve_problem(disc, coeffs, manufactured::solution, degree);
    const ErrorNorms err = compute_errors(sol, manufactured::solution, manufactured::gradient, error_degree);
    const double seconds =
        options.timings ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;
    ConvergenceRecord rec{options.family, k, level, disc->mesh.h(), disc->dofs.size(), err.l2, err.grad, seconds};
    records.push_back(rec);
    if (options.on_record) options.on_record(rec);
  }
  return records;
}

std::string convergence_csv_header() { return "family,k,level,h,ndof,err0,errgrad,seconds"; }

std::string convergence_csv_row(const ConvergenceRecord& r) {
  return csv_field(r.family) + "," + std::to_string(r.k) + "," + std::to_string(r.level) + "," + format_double(r.h) + "," +
         std::to_string(r.ndof) + "," + format_double(r.err0) + "," + format_double(r.errgrad) + "," +
         format_double(r.seconds);
}

double eoc_fit(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size()) throw ValidationError("eoc_fit: h and err lengths differ");
  if (h.size() < 3) throw ValidationError("eoc_fit: at least three levels are required");
  const double n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0)) throw ValidationError("eoc_fit: h and err must be positive");
    sx += std::log(h[i]);
    sy += std::log(err[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err[i]) - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("eoc_fit: all h values coincide");
  return sxy / sxx;
}

EocReport eoc_report(const std::vector<ConvergenceRecord>& records) {
  if (records.empty()) throw ValidationError("eoc_report: no records");
  std::vector<double> h, e0, e1;
  for (const auto& r : records) {
    h.push_back(r.h);
    e0.push_back(r.err0);
    e1.push_back(r.errgrad);
  }
  return EocReport{records.front().family, records.front().k, eoc_fit(h, e0), eoc_fit(h, e1)};
}

}  // namespace zfem
