#include "zfem/meshgen.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "zfem/errors.hpp"

namespace zfem {

namespace {

void require_positive(int n, const char* what) {
  if (n < 1) throw ValidationError(std::string(what) + ": n must be at least 1, got " + std::to_string(n));
}

std::vector<Point2> grid_vertices(int n) {
  std::vector<Point2> v;
  v.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) v.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  }
  return v;
}

std::vector<std::vector<std::size_t>> grid_cells(int n) {
  std::vector<std::vector<std::size_t>> cells;
  auto id = [n](int i, int j) { return static_cast<std::size_t>(j) * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  }
  return cells;
}

// uniform on [0, 1) from the top 53 bits, identical on every platform
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Mesh gen_cartesian(int n) {
  require_positive(n, "gen_cartesian");
  return Mesh(grid_vertices(n), grid_cells(n));
}

Mesh gen_distorted_quads(int n, std::uint64_t seed, double amplitude) {
  require_positive(n, "gen_distorted_quads");
  if (!(amplitude >= 0.0 && amplitude < 0.5)) {
    throw ValidationError("gen_distorted_quads: amplitude must lie in [0, 0.5), got " + std::to_string(amplitude));
  }
  constexpr int kAttempts = 32;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
    std::vector<Point2> v = grid_vertices(n);
    const double a = amplitude / n;
    for (int j = 1; j < n; ++j) {
      for (int i = 1; i < n; ++i) {
        Point2& p = v[static_cast<std::size_t>(j) * (n + 1) + i];
        p.x += a * (2.0 * unit_draw(rng) - 1.0);
        p.y += a * (2.0 * unit_draw(rng) - 1.0);
      }
    }
    try {
      Mesh mesh(std::move(v), grid_cells(n));
      if (validate_mesh_assumptions(mesh, 0.1).pass) return mesh;
    } catch (const ValidationError&) {
    }
  }
  throw ValidationError("gen_distorted_quads: no valid mesh after " + std::to_string(kAttempts) + " draws");
}

Mesh gen_structured_concave(int n, double amplitude) {
  require_positive(n, "gen_structured_concave");
  if (!(amplitude > 0.0 && amplitude < 0.25)) {
    throw ValidationError("gen_structured_concave: amplitude must lie in (0, 0.25), got " + std::to_string(amplitude));
  }
  // points of the cut in one cell, left to right
  static constexpr double cut_x[6] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const double cut_y[6] = {0.5, 0.5 + amplitude, 0.5 - amplitude, 0.5 + amplitude, 0.5 - amplitude, 0.5};

  // vertex lattice: grid corners, the cut points, and mid-side points on vertical lines
  std::vector<Point2> v = grid_vertices(n);
  const double s = 1.0 / n;
  auto corner = [n](int i, int j) { return static_cast<std::size_t>(j) * (n + 1) + i; };
  std::vector<std::size_t> mid_side(static_cast<std::size_t>(n + 1) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mid_side[static_cast<std::size_t>(j) * (n + 1) + i] = v.size();
      v.push_back({i * s, (j + 0.5) * s});
    }
  }
  std::vector<std::vector<std::size_t>> cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::size_t> cut(6);
      cut[0] = mid_side[static_cast<std::size_t>(j) * (n + 1) + i];
      cut[5] = mid_side[static_cast<std::size_t>(j) * (n + 1) + i + 1];
      for (int m = 1; m < 5; ++m) {
        cut[m] = v.size();
        v.push_back({(i + cut_x[m]) * s, (j + cut_y[m]) * s});
      }
      std::vector<std::size_t> lower{corner(i, j), corner(i + 1, j)};
      for (int m = 5; m >= 0; --m) lower.push_back(cut[m]);
      std::vector<std::size_t> upper(cut.begin(), cut.end());
      upper.push_back(corner(i + 1, j + 1));
      upper.push_back(corner(i, j + 1));
      cells.push_back(std::move(lower));
      cells.push_back(std::move(upper));
    }
  }
  return Mesh(std::move(v), std::move(cells));
}

std::string format_mesh(const Mesh& mesh) {
  std::string out = "zfem-mesh 1\n";
  out += std::to_string(mesh.vertices().size()) + " " + std::to_string(mesh.num_cells()) + "\n";
  char buf[64];
  for (const Point2& p : mesh.vertices()) {
    auto r = std::to_chars(buf, buf + sizeof buf, p.x);
    out.append(buf, r.ptr);
    out += ' ';
    r = std::to_chars(buf, buf + sizeof buf, p.y);
    out.append(buf, r.ptr);
    out += '\n';
  }
  for (const auto& cell : mesh.cells()) {
    out += std::to_string(cell.size());
    for (std::size_t id : cell) out += " " + std::to_string(id);
    out += '\n';
  }
  return out;
}

namespace {

struct Token {
  std::string_view text;
  int column;
};

class LineReader {
public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next line split on blanks; throws at end of input.
  std::vector<Token> next(const char* expected) {
    if (pos_ >= text_.size()) throw ParseError(std::string("unexpected end of file, expected ") + expected, line_ + 1, 1);
    const std::size_t end = std::min(text_.find('\n', pos_), text_.size());
    std::string_view line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_;
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == ' ' || line[i] == '\t') {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
  }

  bool at_end() const {
    for (std::size_t i = pos_; i < text_.size(); ++i) {
      if (text_[i] != '\n' && text_[i] != '\r' && text_[i] != ' ' && text_[i] != '\t') return false;
    }
    return true;
  }
  int line() const { return line_; }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

template <class T>
T parse_number(const Token& tok, int line, const char* what) {
  T value{};
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(std::string("expected ") + what + ", got '" + std::string(tok.text) + "'", line, tok.column);
  }
  return value;
}

void expect_count(const std::vector<Token>& tokens, std::size_t count, int line, const char* what) {
  if (tokens.size() < count) {
    const int col = tokens.empty() ? 1 : tokens.back().column + static_cast<int>(tokens.back().text.size());
    throw ParseError(std::string("missing ") + what, line, col);
  }
  if (tokens.size() > count) throw ParseError("unexpected token '" + std::string(tokens[count].text) + "'", line, tokens[count].column);
}

}  // namespace

Mesh parse_mesh(std::string_view text) {
  LineReader reader(text);
  auto header = reader.next("header");
  if (header.size() != 2 || header[0].text != "zfem-mesh") {
    throw ParseError("expected header 'zfem-mesh 1'", reader.line(), header.empty() ? 1 : header[0].column);
  }
  if (header[1].text != "1") {
    throw ParseError("unsupported version '" + std::string(header[1].text) + "'", reader.line(), header[1].column);
  }
  auto counts = reader.next("vertex and cell counts");
  expect_count(counts, 2, reader.line(), "vertex and cell counts");
  const auto nv = parse_number<std::size_t>(counts[0], reader.line(), "vertex count");
  const auto nc = parse_number<std::size_t>(counts[1], reader.line(), "cell count");

  std::vector<Point2> vertices;
  vertices.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    auto tokens = reader.next("vertex coordinates");
    expect_count(tokens, 2, reader.line(), "vertex coordinates");
    Point2 p{parse_number<double>(tokens[0], reader.line(), "x coordinate"),
             parse_number<double>(tokens[1], reader.line(), "y coordinate")};
    if (!is_finite(p)) throw ParseError("non-finite coordinate", reader.line(), tokens[0].column);
    vertices.push_back(p);
  }
  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    auto tokens = reader.next("cell");
    if (tokens.empty()) throw ParseError("missing cell vertex count", reader.line(), 1);
    const auto m = parse_number<std::size_t>(tokens[0], reader.line(), "cell vertex count");
    expect_count(tokens, m + 1, reader.line(), "cell vertex indices");
    std::vector<std::size_t> cell;
    cell.reserve(m);
    for (std::size_t i = 1; i <= m; ++i) cell.push_back(parse_number<std::size_t>(tokens[i], reader.line(), "vertex index"));
    cells.push_back(std::move(cell));
  }
  if (!reader.at_end()) throw ParseError("unexpected content after the last cell", reader.line() + 1, 1);
  return Mesh(std::move(vertices), std::move(cells));
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mesh(buf.str());
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write mesh file '" + path + "'");
  out << format_mesh(mesh);
  if (!out) throw IoError("failed writing mesh file '" + path + "'");
}

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"triangle", "regular", "irregular", "concave", "star", "hanging"};
  return names;
}

Polygon gallery(const std::string& name) {
  if (name == "triangle") return Polygon({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  if (name == "regular") {
    // regular nonagon of radius 0.5 about (0.5, 0.5)
    return Polygon({
      {1.0, 0.5},
      {0.883022221559489, 0.8213938048432696},
      {0.5868240888334653, 0.9924038765061041},
      {0.2500000000000001, 0.9330127018922194},
      {0.03015368960704584, 0.6710100716628344},
      {0.030153689607045786, 0.32898992833716567},
      {0.24999999999999978, 0.06698729810778081},
      {0.586824088833465, 0.007596123493895934},
      {0.883022221559489, 0.1786061951567302}
    });
  }
  if (name == "irregular") return Polygon({{0.0, 0.0}, {1.0, 0.1}, {0.8, 0.9}, {0.1, 0.7}});
  if (name == "concave") {
    return Polygon({{0.0, 0.0}, {0.6, 0.1}, {1.0, 0.0}, {0.9, 0.5}, {1.0, 1.0}, {0.4, 0.8}, {0.0, 1.0}, {0.15, 0.45}});
  }
  if (name == "star") {
    // 20 spikes, radii 0.5 and 0.3 about (0.5, 0.5)
    return Polygon({
      {1.0, 0.5},
      {0.7963065021785414, 0.5469303395120693},
      {0.9755282581475768, 0.6545084971874737},
      {0.7673019572565103, 0.636197149921864},
      {0.9045084971874737, 0.7938926261462366},
      {0.7121320343559643, 0.7121320343559643},
      {0.7938926261462366, 0.9045084971874737},
      {0.636197149921864, 0.7673019572565103},
      {0.6545084971874737, 0.9755282581475768},
      {0.5469303395120693, 0.7963065021785414},
      {0.5, 1.0},
      {0.45306966048793085, 0.7963065021785414},
      {0.34549150281252633, 0.9755282581475768},
      {0.363802850078136, 0.7673019572565103},
      {0.2061073738537635, 0.9045084971874737},
      {0.2878679656440358, 0.7121320343559643},
      {0.09549150281252633, 0.7938926261462367},
      {0.23269804274348965, 0.636197149921864},
      {0.024471741852423234, 0.6545084971874737},
      {0.20369349782145874, 0.5469303395120693},
      {0.0, 0.5000000000000001},
      {0.20369349782145868, 0.4530696604879308},
      {0.024471741852423123, 0.34549150281252655},
      {0.23269804274348965, 0.363802850078136},
      {0.09549150281252622, 0.2061073738537635},
      {0.2878679656440357, 0.2878679656440358},
      {0.20610737385376338, 0.09549150281252633},
      {0.36380285007813595, 0.23269804274348965},
      {0.3454915028125262, 0.024471741852423234},
      {0.4530696604879307, 0.20369349782145874},
      {0.4999999999999999, 0.0},
      {0.5469303395120692, 0.20369349782145868},
      {0.6545084971874736, 0.02447174185242318},
      {0.6361971499218639, 0.2326980427434896},
      {0.7938926261462365, 0.09549150281252622},
      {0.7121320343559642, 0.2878679656440357},
      {0.9045084971874737, 0.20610737385376332},
      {0.7673019572565103, 0.36380285007813595},
      {0.9755282581475768, 0.34549150281252616},
      {0.7963065021785413, 0.4530696604879307}
    });
  }
  if (name == "hanging") {
    // regular hexagon of radius 0.5; edges 0, 2, 4 split at 1/4, 1/2, 3/4 and edges 1, 3, 5 at 1/2, 3/4
    return Polygon({
      {1.0, 0.5},
      {0.9375, 0.6082531754730548},
      {0.875, 0.7165063509461096},
      {0.8125, 0.8247595264191645},
      {0.75, 0.9330127018922193},
      {0.5, 0.9330127018922194},
      {0.3750000000000001, 0.9330127018922194},
      {0.2500000000000001, 0.9330127018922194},
      {0.18750000000000008, 0.8247595264191646},
      {0.12500000000000006, 0.7165063509461098},
      {0.06250000000000003, 0.6082531754730549},
      {0.0, 0.5000000000000001},
      {0.12499999999999989, 0.28349364905389046},
      {0.18749999999999983, 0.1752404735808356},
      {0.24999999999999978, 0.06698729810778081},
      {0.37499999999999983, 0.06698729810778078},
      {0.4999999999999999, 0.06698729810778076},
      {0.625, 0.06698729810778073},
      {0.75, 0.0669872981077807},
      {0.875, 0.28349364905389035},
      {0.9375, 0.3917468245269452}
    });
  }
  throw UnknownName("unknown gallery polygon '" + name + "'");
}

Mesh gallery_mesh(const std::string& name) {
  const Polygon p = gallery(name);
  std::vector<std::size_t> cell(p.size());
  for (std::size_t i = 0; i < cell.size(); ++i) cell[i] = i;
  return Mesh(p.vertices(), {cell});
}

}  // namespace zfem
