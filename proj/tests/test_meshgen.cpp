#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zfem/errors.hpp"
#include "zfem/harness.hpp"
#include "zfem/meshgen.hpp"

using namespace zfem;

namespace {

std::string data_path(const std::string& rel) { return std::string(ZFEM_DATA_DIR) + "/" + rel; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool same_mesh(const Mesh& a, const Mesh& b) { return a.vertices() == b.vertices() && a.cells() == b.cells(); }

int reflex_vertices(const Polygon& p) {
  int count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (cross(p.vertex(i) - p.vertex(i + p.size() - 1), p.vertex(i + 1) - p.vertex(i)) < 0.0) ++count;
  }
  return count;
}

ParseError parse_failure(const std::string& text) {
  try {
    parse_mesh(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no ParseError for: " << text);
  return ParseError("", 0, 0);
}

}  // namespace

TEST_CASE("cartesian grids") {
  CHECK(gen_cartesian(1).num_cells() == 1);
  CHECK(gen_cartesian(1).vertices().size() == 4);
  CHECK(gen_cartesian(2).num_cells() == 4);
  CHECK(gen_cartesian(2).vertices().size() == 9);
  CHECK(gen_cartesian(4).h() == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-15));
  CHECK(gen_cartesian(5).total_area() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(gen_cartesian(0), ValidationError);
}

TEST_CASE("distorted quads") {
  CHECK(same_mesh(gen_distorted_quads(6, 3, 0.0), gen_cartesian(6)));
  CHECK(same_mesh(gen_distorted_quads(8, 42), gen_distorted_quads(8, 42)));
  CHECK_FALSE(same_mesh(gen_distorted_quads(8, 42), gen_distorted_quads(8, 43)));
  const Mesh m = gen_distorted_quads(8, 1, 0.2);
  CHECK(validate_mesh_assumptions(m, 0.1).pass);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-13));
  // boundary vertices stay on the grid, interior ones move by at most a/n per axis
  const Mesh c = gen_cartesian(8);
  for (std::size_t i = 0; i < m.vertices().size(); ++i) {
    const Point2 d = m.vertices()[i] - c.vertices()[i];
    CHECK(std::abs(d.x) <= 0.2 / 8);
    CHECK(std::abs(d.y) <= 0.2 / 8);
    if (m.boundary_vertex_flags()[i]) CHECK(d == Point2{0, 0});
  }
  for (int n : {4, 8, 16, 32}) CHECK(validate_mesh_assumptions(gen_distorted_quads(n, 1), 0.1).pass);
  CHECK_THROWS_AS(gen_distorted_quads(4, 1, 0.5), ValidationError);
  CHECK_THROWS_AS(gen_distorted_quads(4, 1, -0.1), ValidationError);
}

TEST_CASE("structured concave tiling") {
  for (int n : {1, 2, 4, 8, 16}) {
    const Mesh m = gen_structured_concave(n);
    CHECK(m.num_cells() == static_cast<std::size_t>(2 * n * n));
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.issues().empty());
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      CHECK_FALSE(m.polygon(c).is_convex());
      CHECK(reflex_vertices(m.polygon(c)) >= 1);
    }
    const MeshReport r = validate_mesh_assumptions(m, 0.05);
    CHECK(r.pass);
    for (const CellReport& cell : r.cells) CHECK(cell.radius_ratio >= 0.1);
  }
}

TEST_CASE("refinement families halve h") {
  for (const std::string family : {"cartesian", "distorted", "concave"}) {
    for (int level = 1; level < 4; ++level) {
      const double ratio = family_mesh(family, level - 1, 1).h() / family_mesh(family, level, 1).h();
      CHECK(ratio >= 2.0 * 0.9);
      CHECK(ratio <= 2.0 * 1.1);
    }
  }
  for (int level = 1; level < 3; ++level) {
    const double ratio = read_mesh(data_path("meshes/voronoi_" + std::to_string(level - 1) + ".mesh")).h() /
                         read_mesh(data_path("meshes/voronoi_" + std::to_string(level) + ".mesh")).h();
    CHECK(ratio >= 2.0 * 0.9);
    CHECK(ratio <= 2.0 * 1.1);
  }
}

TEST_CASE("text round trip") {
  std::vector<Mesh> meshes{gen_cartesian(3), gen_distorted_quads(8, 7), gen_structured_concave(3)};
  for (const std::string& name : gallery_names()) meshes.push_back(gallery_mesh(name));
  for (const Mesh& m : meshes) {
    const std::string text = format_mesh(m);
    const Mesh back = parse_mesh(text);
    CHECK(same_mesh(back, m));
    CHECK(format_mesh(back) == text);
  }
  for (const auto& entry : std::filesystem::directory_iterator(data_path("meshes"))) {
    const std::string name = entry.path().filename().string();
    if (name == "truncated.mesh" || name == "repeated_index.mesh") continue;
    const std::string text = slurp(entry.path().string());
    CHECK_MESSAGE(format_mesh(parse_mesh(text)) == text, name);
  }
  const auto path = std::filesystem::temp_directory_path() / "zfem_roundtrip.mesh";
  write_mesh(meshes[1], path.string());
  CHECK(same_mesh(read_mesh(path.string()), meshes[1]));
  std::filesystem::remove(path);
}

TEST_CASE("committed fixtures match the built-in definitions") {
  for (const std::string& name : gallery_names()) {
    CHECK_MESSAGE(slurp(data_path("gallery/" + name + ".mesh")) == format_mesh(gallery_mesh(name)), name);
  }
  CHECK(slurp(data_path("meshes/cartesian_4.mesh")) == format_mesh(gen_cartesian(4)));
  CHECK(slurp(data_path("meshes/distorted_8.mesh")) == format_mesh(gen_distorted_quads(8, 1)));
  CHECK(slurp(data_path("meshes/concave_4.mesh")) == format_mesh(gen_structured_concave(4)));
}

TEST_CASE("parse errors carry line and column") {
  const ParseError trunc = parse_failure(slurp(data_path("meshes/truncated.mesh")));
  CHECK(trunc.line() == 5);
  CHECK(std::string(trunc.what()).rfind("line 5, column 1: ", 0) == 0);

  const ParseError header = parse_failure("zfem-mesh 2\n");
  CHECK(header.line() == 1);
  CHECK(header.column() == 11);

  const ParseError coord = parse_failure("zfem-mesh 1\n3 1\n0 0\n1 x\n0 1\n3 0 1 2\n");
  CHECK(coord.line() == 4);
  CHECK(coord.column() == 3);

  const ParseError extra = parse_failure("zfem-mesh 1\n3 1\n0 0\n1 0\n0 1\n3 0 1 2 7\n");
  CHECK(extra.line() == 6);
  CHECK(extra.column() == 9);

  const ParseError trailing = parse_failure("zfem-mesh 1\n3 1\n0 0\n1 0\n0 1\n3 0 1 2\njunk\n");
  CHECK(trailing.line() == 7);

  CHECK_NOTHROW(parse_mesh("zfem-mesh 1\r\n3 1\r\n0 0\r\n1 0\r\n0 1\r\n3 0 1 2\r\n"));
  CHECK_THROWS_AS(parse_mesh("zfem-mesh 1\n3 1\n0 0\n1 0\n0 inf\n3 0 1 2\n"), ParseError);
}

TEST_CASE("invalid cells are validation errors") {
  CHECK_THROWS_AS(parse_mesh(slurp(data_path("meshes/repeated_index.mesh"))), ValidationError);
  CHECK_THROWS_AS(parse_mesh("zfem-mesh 1\n3 1\n0 0\n1 0\n0 1\n3 0 1 5\n"), ValidationError);
  CHECK_THROWS_AS(parse_mesh("zfem-mesh 1\n3 1\n0 0\n1 0\n2 0\n3 0 1 2\n"), ValidationError);
  CHECK_THROWS_AS(read_mesh(data_path("meshes/does_not_exist.mesh")), IoError);
}

TEST_CASE("gallery polygons") {
  const std::vector<std::pair<std::string, std::size_t>> counts{
      {"triangle", 3}, {"regular", 9}, {"irregular", 4}, {"concave", 8}, {"star", 40}, {"hanging", 21}};
  REQUIRE(gallery_names().size() == counts.size());
  for (const auto& [name, nv] : counts) {
    const Polygon p = gallery(name);
    CHECK(p.size() == nv);
    CHECK(validate_mesh_assumptions(gallery_mesh(name), 0.1).pass);
  }
  const Polygon tri = gallery("triangle");
  CHECK(tri.vertices() == std::vector<Point2>{{0, 0}, {1, 0}, {0, 1}});
  CHECK_FALSE(gallery("concave").is_convex());
  CHECK_FALSE(gallery("star").is_convex());
  CHECK(gallery("irregular").is_convex());
  CHECK(gallery("regular").is_convex());

  // runs of three or more consecutive collinear vertices along the hexagon sides
  const Polygon hang = gallery("hanging");
  int runs = 0;
  bool in_run = false;
  for (std::size_t i = 0; i < hang.size(); ++i) {
    const Point2 a = hang.vertex(i + hang.size() - 1), b = hang.vertex(i), c = hang.vertex(i + 1);
    const bool collinear = std::abs(cross(b - a, c - b)) <= 1e-12 * hang.diameter() * hang.diameter();
    if (collinear && !in_run) ++runs;
    in_run = collinear;
  }
  CHECK(runs >= 3);
  CHECK_THROWS_AS(gallery("pentagon"), UnknownName);
}
