#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zfem/assembly.hpp"
#include "zfem/errors.hpp"
#include "zfem/harness.hpp"
#include "zfem/meshgen.hpp"
#include "zfem/quadrature.hpp"
#include "zfem/zfem_basis.hpp"

namespace py = pybind11;
using namespace zfem;

namespace {

using XY = std::pair<double, double>;

Point2 to_point(const XY& p) { return {p.first, p.second}; }
XY to_xy(const Point2& p) { return {p.x, p.y}; }

std::vector<Point2> to_points(const std::vector<XY>& pts) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(to_point(p));
  return out;
}

std::vector<XY> to_xys(const std::vector<Point2>& pts) {
  std::vector<XY> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(to_xy(p));
  return out;
}

py::dict report_dict(const MeshReport& r) {
  py::list cells;
  for (const auto& c : r.cells) {
    py::dict d;
    d["cell"] = c.cell;
    d["min_edge_ratio"] = c.min_edge_ratio;
    d["radius_ratio"] = c.radius_ratio;
    d["min_triangle_quality"] = c.min_triangle_quality;
    d["star_shaped"] = c.star_shaped;
    d["pass"] = c.pass;
    cells.append(d);
  }
  py::dict out;
  out["rho"] = r.rho;
  out["pass"] = r.pass;
  out["cells"] = cells;
  out["warnings"] = r.warnings;
  out["issues"] = r.issues;
  out["failed_cells"] = r.failed_cells();
  return out;
}

CenterMethod parse_center(const std::string& name) {
  if (name == "chebyshev") return CenterMethod::Chebyshev;
  if (name == "area_weights") return CenterMethod::AreaWeights;
  throw UnknownName("unknown center method '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zipped polygonal finite elements";

  auto base = py::register_exception<Error>(m, "ZfemError", PyExc_RuntimeError);
  py::register_exception<InvalidPolygon>(m, "InvalidPolygon", base);
  py::register_exception<NotStarShaped>(m, "NotStarShaped", base);
  py::register_exception<DegenerateTriangle>(m, "DegenerateTriangle", base);
  py::register_exception<UnsupportedOrder>(m, "UnsupportedOrder", base);
  py::register_exception<RankDeficient>(m, "RankDeficient", base);
  py::register_exception<PointOutsideElement>(m, "PointOutsideElement", base);
  py::register_exception<EdgeMismatch>(m, "EdgeMismatch", base);
  py::register_exception<SolverBreakdown>(m, "SolverBreakdown", base);
  py::register_exception<NonConvergence>(m, "NonConvergence", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<UnknownName>(m, "UnknownName", base);

  py::class_<Polygon>(m, "Polygon")
      .def(py::init([](const std::vector<XY>& v) { return Polygon(to_points(v)); }), py::arg("vertices"))
      .def_property_readonly("vertices", [](const Polygon& p) { return to_xys(p.vertices()); })
      .def_property_readonly("num_vertices", &Polygon::size)
      .def_property_readonly("area", &Polygon::area)
      .def_property_readonly("diameter", &Polygon::diameter)
      .def_property_readonly("is_convex", &Polygon::is_convex)
      .def("__len__", &Polygon::size);

  m.def(
      "star_center_lp",
      [](const Polygon& p) {
        const StarCenter c = star_center_lp(p);
        return std::make_pair(to_xy(c.center), c.radius);
      },
      "Chebyshev center of the polygon kernel: ((x, y), radius).");
  m.def(
      "star_center_area_weights",
      [](const Polygon& p) {
        const StarCenter c = star_center_area_weights(p);
        return std::make_pair(to_xy(c.center), c.radius);
      },
      "Center minimizing the sum of squared fan-triangle areas: ((x, y), radius).");

  py::class_<Mesh>(m, "Mesh")
      .def(py::init([](const std::vector<XY>& v, const std::vector<std::vector<std::size_t>>& cells) {
             return Mesh(to_points(v), cells);
           }),
           py::arg("vertices"), py::arg("cells"))
      .def_property_readonly("vertices", [](const Mesh& mesh) { return to_xys(mesh.vertices()); })
      .def_property_readonly("cells", &Mesh::cells)
      .def_property_readonly("num_cells", &Mesh::num_cells)
      .def_property_readonly("h", &Mesh::h)
      .def_property_readonly("total_area", &Mesh::total_area)
      .def_property_readonly("warnings", &Mesh::warnings)
      .def_property_readonly("issues", &Mesh::issues)
      .def("polygon", &Mesh::polygon, py::arg("cell"));

  m.def(
      "validate_mesh_assumptions", [](const Mesh& mesh, double rho) { return report_dict(validate_mesh_assumptions(mesh, rho)); },
      py::arg("mesh"), py::arg("rho"));

  m.def("gen_cartesian", &gen_cartesian, py::arg("n"));
  m.def("gen_distorted_quads", &gen_distorted_quads, py::arg("n"), py::arg("seed"), py::arg("amplitude") = 0.2);
  m.def("gen_structured_concave", &gen_structured_concave, py::arg("n"), py::arg("amplitude") = 0.1);
  m.def("format_mesh", &format_mesh, py::arg("mesh"));
  m.def("parse_mesh", [](const std::string& text) { return parse_mesh(text); }, py::arg("text"));
  m.def("read_mesh", &read_mesh, py::arg("path"));
  m.def("write_mesh", &write_mesh, py::arg("mesh"), py::arg("path"));
  m.def("gallery", &gallery, py::arg("name"));
  m.def("gallery_names", &gallery_names);

  m.def(
      "quadrature_rule",
      [](int degree) {
        const QuadratureRule& r = quadrature_rule(degree);
        return std::make_pair(to_xys(r.points), r.weights);
      },
      py::arg("degree"), "Reference-triangle rule exact to the given degree: (points, weights).");
  m.def(
      "ref_basis", [](int k, double x, double y) {
        RefBasis b(k);
        Eigen::VectorXd v;
        Eigen::MatrixX2d g;
        b.evaluate({x, y}, &v, &g);
        return std::make_pair(v, g);
      },
      py::arg("k"), py::arg("x"), py::arg("y"), "Lagrange basis values and gradients on the reference triangle.");

  m.def("interleave_counts", &interleave_counts, py::arg("selections"), py::arg("slots"));
  m.def(
      "solve_weights",
      [](const Eigen::MatrixXd& d, const Eigen::MatrixXd& v) { return solve_weights(d, v).W; }, py::arg("D"),
      py::arg("V"), "Minimum-norm solution W of D W = V.");

  py::class_<LocalBasis>(m, "LocalBasis")
      .def(py::init([](const Polygon& p, int k, const std::string& center) {
             LocalBasisOptions opt;
             opt.center = parse_center(center);
             return LocalBasis(p, k, opt);
           }),
           py::arg("polygon"), py::arg("k"), py::arg("center") = "chebyshev")
      .def_property_readonly("order", &LocalBasis::order)
      .def_property_readonly("num_dofs", &LocalBasis::num_dofs)
      .def_property_readonly("num_fine_nodes", [](const LocalBasis& b) { return b.fine_nodes().size(); })
      .def_property_readonly("center", [](const LocalBasis& b) { return std::make_pair(to_xy(b.center().center), b.center().radius); })
      .def_property_readonly("weights", &LocalBasis::weights)
      .def_property_readonly("constraint_residual", &LocalBasis::constraint_residual)
      .def_property_readonly("interior_per_triangle",
                             [](const LocalBasis& b) { return b.classification().interior_per_triangle; })
      .def_property_readonly("promotions", [](const LocalBasis& b) { return b.classification().promotions; })
      .def_property_readonly("dof_points",
                             [](const LocalBasis& b) {
                               std::vector<XY> out;
                               for (int i = 0; i < b.num_dofs(); ++i) out.push_back(to_xy(b.dof_point(i)));
                               return out;
                             })
      .def(
          "evaluate",
          [](const LocalBasis& b, double x, double y) {
            Eigen::VectorXd v;
            Eigen::MatrixX2d g;
            b.evaluate({x, y}, &v, &g);
            return std::make_pair(v, g);
          },
          py::arg("x"), py::arg("y"), "Shape function values and gradients at a point of the polygon.")
      .def(
          "reproduction_errors",
          [](const LocalBasis& b, int degree) {
            const ReproductionErrors e = polynomial_reproduction_errors(b, degree);
            return std::make_pair(e.l2, e.grad);
          },
          py::arg("quad_degree"))
      .def("debug_json", &LocalBasis::debug_json, py::arg("element_id") = -1);

  m.def(
      "patch_test",
      [](const Mesh& mesh, int k) {
        const ErrorNorms e = patch_test(mesh, k);
        return std::make_pair(e.l2, e.grad);
      },
      py::arg("mesh"), py::arg("k"), "Solve a degree-k polynomial problem; returns (err_0, err_grad).");

  m.def(
      "solve_manufactured",
      [](const Mesh& mesh, int k, int quad_degree) {
        auto disc = std::make_shared<const Discretization>(mesh, k);
        const int q = quad_degree > 0 ? quad_degree : default_quadrature_degree(k);
        const DiscreteSolution sol =
            solve_problem(disc, manufactured::coefficients(), manufactured::solution, q);
        const ErrorNorms e =
            compute_errors(sol, manufactured::solution, manufactured::gradient, std::max(q, default_quadrature_degree(k)));
        py::dict out;
        out["ndof"] = disc->dofs.size();
        out["coefficients"] = sol.coefficients();
        out["dof_points"] = to_xys(disc->dofs.points);
        out["err0"] = e.l2;
        out["errgrad"] = e.grad;
        return out;
      },
      py::arg("mesh"), py::arg("k"), py::arg("quad_degree") = 0);

  m.def(
      "manufactured_load", [](double x, double y) { return manufactured::load({x, y}); }, py::arg("x"), py::arg("y"));
  m.def(
      "manufactured_solution", [](double x, double y) { return manufactured::solution({x, y}); }, py::arg("x"),
      py::arg("y"));

  m.def(
      "reproduce_poly",
      [](const std::vector<int>& orders, const std::vector<std::string>& polygons) {
        py::list out;
        for (const auto& r : reproduce_poly(orders, polygons)) {
          py::dict d;
          d["polygon"] = r.polygon;
          d["k"] = r.k;
          d["err0"] = r.err0;
          d["errgrad"] = r.errgrad;
          out.append(d);
        }
        return out;
      },
      py::arg("orders"), py::arg("polygons"));

  m.def(
      "run_convergence",
      [](const std::string& family, int k, int levels, std::uint64_t seed, int quad_degree) {
        ConvergenceOptions opt;
        opt.family = family;
        opt.k = k;
        opt.levels = levels;
        opt.seed = seed;
        opt.quad_degree = quad_degree;
        py::list out;
        for (const auto& r : run_convergence(opt)) {
          py::dict d;
          d["family"] = r.family;
          d["k"] = r.k;
          d["level"] = r.level;
          d["h"] = r.h;
          d["ndof"] = r.ndof;
          d["err0"] = r.err0;
          d["errgrad"] = r.errgrad;
          out.append(d);
        }
        return out;
      },
      py::arg("family"), py::arg("k"), py::arg("levels"), py::arg("seed") = 1, py::arg("quad_degree") = 0);

  m.def("eoc_fit", &eoc_fit, py::arg("h"), py::arg("err"), "Least-squares slope of log(err) against log(h).");
}
