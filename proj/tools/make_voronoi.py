#!/usr/bin/env python3
"""Write clipped Voronoi meshes of the unit square in zfem-mesh format.

Seeds are drawn uniformly, relaxed with Lloyd steps and mirrored across
the four sides so that the cells of the original seeds tile the square
exactly. Edges shorter than a fraction of the mean seed spacing are collapsed.

    python3 tools/make_voronoi.py --cells 16 64 256 --seed 7 --out-dir data/meshes
"""

import argparse
import os

import numpy as np
from scipy.spatial import Voronoi


def mirrored(points):
    x, y = points[:, 0], points[:, 1]
    return np.vstack([
        points,
        np.column_stack([-x, y]),
        np.column_stack([2.0 - x, y]),
        np.column_stack([x, -y]),
        np.column_stack([x, 2.0 - y]),
    ])


def cell_loops(points):
    vor = Voronoi(mirrored(points))
    loops = []
    for i in range(len(points)):
        region = vor.regions[vor.point_region[i]]
        assert -1 not in region and region
        loops.append([vor.vertices[v] for v in region])
    return loops


def polygon_centroid(loop):
    p = np.asarray(loop)
    q = np.roll(p, -1, axis=0)
    cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
    area = 0.5 * cross.sum()
    cx = ((p[:, 0] + q[:, 0]) * cross).sum() / (6.0 * area)
    cy = ((p[:, 1] + q[:, 1]) * cross).sum() / (6.0 * area)
    return np.array([cx, cy])


def snap(value):
    for target in (0.0, 1.0):
        if abs(value - target) < 1e-9:
            return target
    return value


def build_mesh(n, rng, lloyd_steps, collapse):
    points = rng.uniform(0.0, 1.0, size=(n, 2))
    for _ in range(lloyd_steps):
        points = np.array([polygon_centroid(loop) for loop in cell_loops(points)])
    loops = cell_loops(points)

    # merge vertices closer than tol; boundary vertices are registered first so
    # that a collapsed edge never pulls a point off the square's sides
    tol = collapse / np.sqrt(n)
    loops = [[np.array([snap(p[0]), snap(p[1])]) for p in loop] for loop in loops]
    vertices = []

    def register(p):
        for j, q in enumerate(vertices):
            if np.hypot(*(p - q)) < tol:
                return j
        vertices.append(p)
        return len(vertices) - 1

    for loop in loops:
        for p in loop:
            if p[0] in (0.0, 1.0) or p[1] in (0.0, 1.0):
                register(p)
    cells = []
    for loop in loops:
        cell = []
        for p in loop:
            j = register(p)
            if not cell or cell[-1] != j:
                cell.append(j)
        while len(cell) > 1 and cell[0] == cell[-1]:
            cell.pop()
        cells.append(cell)

    # keep only vertices still referenced and orient cells counterclockwise
    used = sorted({v for c in cells for v in c})
    remap = {v: i for i, v in enumerate(used)}
    vertices = [vertices[v] for v in used]
    out_cells = []
    for c in cells:
        c = [remap[v] for v in c]
        pts = np.array([vertices[v] for v in c])
        q = np.roll(pts, -1, axis=0)
        if (pts[:, 0] * q[:, 1] - q[:, 0] * pts[:, 1]).sum() < 0:
            c.reverse()
        out_cells.append(c)
    return vertices, out_cells


def shortest(value):
    # same text as C++ std::to_chars: shortest round-trip, no trailing ".0"
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def write(path, vertices, cells):
    with open(path, "w") as f:
        f.write("zfem-mesh 1\n")
        f.write(f"{len(vertices)} {len(cells)}\n")
        for x, y in vertices:
            f.write(f"{shortest(x)} {shortest(y)}\n")
        for c in cells:
            f.write(" ".join([str(len(c))] + [str(v) for v in c]) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cells", type=int, nargs="+", default=[16, 64, 256])
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--lloyd", type=int, default=20)
    parser.add_argument("--collapse", type=float, default=0.15,
                        help="merge distance as a fraction of the mean seed spacing")
    parser.add_argument("--out-dir", default="data/meshes")
    args = parser.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    for level, n in enumerate(args.cells):
        rng = np.random.default_rng(args.seed + level)
        vertices, cells = build_mesh(n, rng, args.lloyd, args.collapse)
        path = os.path.join(args.out_dir, f"voronoi_{level}.mesh")
        write(path, vertices, cells)
        print(f"{path}: {len(vertices)} vertices, {len(cells)} cells")


if __name__ == "__main__":
    main()
