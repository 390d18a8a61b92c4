// zfem command-line driver: mesh validation, polynomial reproduction table,
// convergence studies and mesh export.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zfem/errors.hpp"
#include "zfem/harness.hpp"
#include "zfem/meshgen.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// "1..6", "2", "1,3,5" or a mix such as "1..3,6"
std::vector<int> parse_orders(const std::string& list) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoi(item));
      } else {
        const int lo = std::stoi(item.substr(0, dots));
        const int hi = std::stoi(item.substr(dots + 2));
        for (int k = lo; k <= hi; ++k) out.push_back(k);
      }
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--orders", "cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--orders", "no orders given");
  return out;
}

std::vector<std::string> parse_polygons(const std::string& list) {
  if (list == "all") return zfem::gallery_names();
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

// Output sink: a file when a path is given, stdout otherwise.
class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw zfem::IoError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void line(const std::string& s) {
    stream() << s << '\n';
    stream().flush();
  }

private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_validate(const std::string& path, double rho) {
  const zfem::Mesh mesh = zfem::read_mesh(path);
  const zfem::MeshReport report = zfem::validate_mesh_assumptions(mesh, rho);
  std::printf("cells %zu, rho %s, h %s\n", mesh.num_cells(), zfem::format_double(rho).c_str(),
              zfem::format_double(mesh.h()).c_str());
  double worst_edge = 1.0, worst_radius = 1.0, worst_quality = 1.0;
  for (const auto& c : report.cells) {
    worst_edge = std::min(worst_edge, c.min_edge_ratio);
    worst_radius = std::min(worst_radius, c.radius_ratio);
    worst_quality = std::min(worst_quality, c.min_triangle_quality);
  }
  std::printf("worst |e|/h_E %.6g, worst r_E/h_E %.6g, worst fan triangle quality %.6g\n", worst_edge, worst_radius,
              worst_quality);
  for (const auto& c : report.cells) {
    if (c.pass) continue;
    std::printf("cell %zu fails: |e|/h_E %.6g, r_E/h_E %.6g%s\n", c.cell, c.min_edge_ratio, c.radius_ratio,
                c.star_shaped ? "" : ", not star-shaped");
  }
  for (const auto& w : report.warnings) std::printf("warning: %s\n", w.c_str());
  for (const auto& i : report.issues) std::printf("issue: %s\n", i.c_str());
  std::printf("%s\n", report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitOk : kExitValidation;
}

int cmd_poly(const std::string& orders, const std::string& polygons, const std::string& out_path,
             const std::string& debug_path) {
  const std::vector<int> ks = parse_orders(orders);
  const std::vector<std::string> names = parse_polygons(polygons);
  for (const auto& name : names) zfem::gallery(name);
  Output out(out_path);
  out.line(zfem::poly_csv_header());
  std::unique_ptr<Output> debug;
  if (!debug_path.empty()) debug = std::make_unique<Output>(debug_path);
  for (const auto& name : names) {
    for (int k : ks) {
      const auto rec = zfem::reproduce_poly({k}, {name});
      out.line(zfem::poly_csv_row(rec.front()));
      if (debug) debug->line(zfem::LocalBasis(zfem::gallery(name), k).debug_json());
    }
  }
  return kExitOk;
}

struct ConvergeArgs {
  std::string family = "distorted";
  int order = 1;
  int levels = 4;
  std::uint64_t seed = 1;
  int quad_degree = 0;
  std::string out;
  std::string eoc_out;
  std::string debug_path;
  bool timings = false;
};

int cmd_converge(const ConvergeArgs& a) {
  Output out(a.out);
  out.line(zfem::convergence_csv_header());
  std::unique_ptr<Output> debug;
  if (!a.debug_path.empty()) debug = std::make_unique<Output>(a.debug_path);

  zfem::ConvergenceOptions opt;
  opt.family = a.family;
  opt.k = a.order;
  opt.levels = a.levels;
  opt.seed = a.seed;
  opt.quad_degree = a.quad_degree;
  opt.timings = a.timings;
  opt.on_record = [&](const zfem::ConvergenceRecord& r) { out.line(zfem::convergence_csv_row(r)); };
  if (debug) opt.on_element_debug = [&](const std::string& s) { debug->line(s); };
  const auto records = zfem::run_convergence(opt);

  if (records.size() >= 3) {
    const zfem::EocReport eoc = zfem::eoc_report(records);
    std::fprintf(stderr, "EOC %s k=%d: L2 %.4f, H1 %.4f\n", eoc.family.c_str(), eoc.k, eoc.eoc0, eoc.eocgrad);
    if (!a.eoc_out.empty()) {
      Output e(a.eoc_out);
      e.line("family,k,eoc0,eocgrad");
      e.line(eoc.family + "," + std::to_string(eoc.k) + "," + zfem::format_double(eoc.eoc0) + "," +
             zfem::format_double(eoc.eocgrad));
    }
  } else {
    std::fprintf(stderr, "EOC needs at least three levels; none reported\n");
  }
  return kExitOk;
}

int cmd_generate(const std::string& family, int n, std::uint64_t seed, double amplitude, const std::string& gallery,
                 const std::string& out_path) {
  zfem::Mesh mesh;
  if (!gallery.empty()) {
    mesh = zfem::gallery_mesh(gallery);
  } else if (family == "cartesian") {
    mesh = zfem::gen_cartesian(n);
  } else if (family == "distorted") {
    mesh = zfem::gen_distorted_quads(n, seed, amplitude);
  } else if (family == "concave") {
    mesh = zfem::gen_structured_concave(n);
  } else {
    throw zfem::UnknownName("unknown mesh family '" + family + "'");
  }
  Output out(out_path);
  out.stream() << zfem::format_mesh(mesh);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zipped polygonal finite elements"};
  app.require_subcommand(1);

  std::string mesh_path;
  double rho = 0.1;
  auto* validate = app.add_subcommand("validate", "Check a mesh file against the shape-regularity assumptions");
  validate->add_option("--mesh", mesh_path, "Mesh file")->required();
  validate->add_option("--rho", rho, "Shape-regularity constant")->check(CLI::PositiveNumber);

  std::string orders = "1..6", polygons = "all", poly_out, poly_debug;
  auto* poly = app.add_subcommand("poly", "Monomial interpolation errors on the gallery polygons");
  poly->add_option("--orders", orders, "Orders, e.g. 1..6 or 2,4");
  poly->add_option("--polygons", polygons, "Comma-separated gallery names or 'all'");
  poly->add_option("--out", poly_out, "CSV output file (default stdout)");
  poly->add_option("--dump-element-debug", poly_debug, "Write one JSON line per local basis");

  ConvergeArgs conv;
  auto* converge = app.add_subcommand("converge", "Convergence study for the manufactured diffusion-reaction problem");
  converge->add_option("--family", conv.family, "cartesian, distorted, concave or file:<path>,<path>,...");
  converge->add_option("--order", conv.order, "Polynomial order k")->check(CLI::Range(1, 6));
  converge->add_option("--levels", conv.levels, "Number of refinement levels")->check(CLI::Range(1, 8));
  converge->add_option("--seed", conv.seed, "Seed for the distorted family");
  converge->add_option("--quad-degree", conv.quad_degree, "Quadrature degree (default 2k+2)")
      ->check(CLI::Range(1, 25));
  converge->add_option("--out", conv.out, "CSV output file (default stdout)");
  converge->add_option("--eoc-out", conv.eoc_out, "Write the fitted convergence orders as CSV");
  converge->add_option("--dump-element-debug", conv.debug_path, "Write one JSON line per element and level");
  converge->add_flag("--timings", conv.timings, "Fill the seconds column with wall-clock times");

  std::string gen_family = "cartesian", gen_gallery, gen_out;
  int gen_n = 4;
  std::uint64_t gen_seed = 1;
  double gen_amplitude = 0.2;
  auto* generate = app.add_subcommand("generate", "Write a generated mesh or gallery polygon in mesh-file form");
  generate->add_option("--family", gen_family, "cartesian, distorted or concave");
  generate->add_option("--n", gen_n, "Cells per side")->check(CLI::Range(1, 4096));
  generate->add_option("--seed", gen_seed, "Seed for the distorted family");
  generate->add_option("--amplitude", gen_amplitude, "Vertex perturbation for the distorted family");
  generate->add_option("--gallery", gen_gallery, "Gallery polygon name instead of a family");
  generate->add_option("--out", gen_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(mesh_path, rho);
    if (*poly) return cmd_poly(orders, polygons, poly_out, poly_debug);
    if (*converge) return cmd_converge(conv);
    if (*generate) return cmd_generate(gen_family, gen_n, gen_seed, gen_amplitude, gen_gallery, gen_out);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const zfem::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const zfem::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const zfem::UnknownName& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const zfem::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const zfem::Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitUsage;
}
