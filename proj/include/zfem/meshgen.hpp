#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "zfem/geometry.hpp"

namespace zfem {

/// n x n grid of squares on the unit square.
Mesh gen_cartesian(int n);

/// Cartesian grid whose interior vertices are moved by uniform noise in
/// [-a/n, a/n]^2 drawn from a seeded 64-bit Mersenne Twister. A draw whose
/// mesh fails validate_mesh_assumptions(rho = 0.1) is replaced by one from a
/// derived seed, at most 32 times.
Mesh gen_distorted_quads(int n, std::uint64_t seed, double amplitude = 0.2);

/// Unit square tiled by non-convex octagons: every grid cell is cut in two by
/// a zigzag through heights 0.5, 0.5 +- amplitude at x = 0, 0.2, ..., 1.
Mesh gen_structured_concave(int n, double amplitude = 0.1);

/// Text form:
///   zfem-mesh 1
///   <nv> <nc>
///   x y            (nv lines, shortest round-trip decimal)
///   m i1 ... im    (nc lines, 0-based counterclockwise)
std::string format_mesh(const Mesh& mesh);
/// Throws ParseError (with line and column) on malformed text and
/// ValidationError when the cells are not valid polygons.
Mesh parse_mesh(std::string_view text);

Mesh read_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, const std::string& path);

/// triangle, regular, irregular, concave, star, hanging.
const std::vector<std::string>& gallery_names();
/// Fixed test polygons; throws UnknownName.
Polygon gallery(const std::string& name);
/// The gallery polygon as a one-cell mesh.
Mesh gallery_mesh(const std::string& name);

}  // namespace zfem
