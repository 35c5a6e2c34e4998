"""Reference, hybrid, mirroring and multiple-mirroring dataset generators."""
from __future__ import annotations

import numpy as np
import triangle as tr
from scipy.stats import qmc

from ..mesh import Mesh, signed_area
from .core import merge_vertices, mirror_times, triangulate_complement

R0 = 0.25


def _check_level(n: int) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"level must be a non-negative integer, got {n!r}")
    return int(n)


# reference ------------------------------------------------------------------

def poisson_disk_points(r: float, seed: int = 0) -> np.ndarray:
    """Blue-noise points of the unit square with minimum spacing about r.

    Interior samples come from Bridson's dart throwing; the boundary is
    sampled uniformly at spacing r and interior samples closer than r/2 to
    it are discarded.
    """
    rng = np.random.default_rng(seed)
    inner = qmc.PoissonDisk(d=2, radius=r, seed=rng).fill_space()
    dist = np.minimum(np.minimum(inner[:, 0], 1 - inner[:, 0]), np.minimum(inner[:, 1], 1 - inner[:, 1]))
    inner = inner[dist >= r / 2]
    m = max(1, int(round(1.0 / r)))
    s = np.arange(m) / m
    z = np.zeros(m)
    ring = np.concatenate([
        np.column_stack([s, z]), np.column_stack([1 + z, s]),
        np.column_stack([1 - s, 1 + z]), np.column_stack([z, 1 - s]),
    ])
    return np.concatenate([ring, inner])


def gen_triangle(n: int, seed: int = 0) -> Mesh:
    n = _check_level(n)
    pts = poisson_disk_points(R0 / 2**n, seed=seed + n)
    out = tr.triangulate({"vertices": pts}, "Q")
    return Mesh.from_polygons(out["vertices"], out["triangles"], level=n)


# hybrid ---------------------------------------------------------------------

def maze_polygon(t: float) -> np.ndarray:
    """Ten-vertex spiral in the unit box with corridor width t (t < 1/3)."""
    return np.array([
        [0, 0], [1, 0], [1, 1], [0, 1], [0, 2 * t], [t, 2 * t],
        [t, 1 - t], [1 - t, 1 - t], [1 - t, t], [0, t],
    ], dtype=float)


def star_polygon(spikes: int, ratio: float, radius: float = 1.0, center=(0.0, 0.0)) -> np.ndarray:
    """2*spikes-gon alternating the outer radius and ``ratio`` times it."""
    th = np.pi * np.arange(2 * spikes) / spikes + np.pi / 2
    r = np.where(np.arange(2 * spikes) % 2 == 0, 1.0, ratio) * radius
    return np.column_stack([center[0] + r * np.cos(th), center[1] + r * np.sin(th)])


def _grid_placement(shape: np.ndarray, g: int, size: float):
    """Copies of a unit-box shape, scaled to ``size`` and centred in a g x g grid."""
    lo = shape.min(axis=0)
    span = (shape.max(axis=0) - lo).max()
    unit = (shape - lo) / span - 0.5 * (shape.max(axis=0) - lo) / span
    return [unit * size + (np.array([i, j]) + 0.5) / g for j in range(g) for i in range(g)]


def gen_maze(n: int, thickness0: float = 0.2) -> Mesh:
    n = _check_level(n)
    g = n + 1
    polys = _grid_placement(maze_polygon(thickness0 * 2.0**-n), g, 0.6 / g)
    area = signed_area(polys[0])
    return triangulate_complement(polys, max_area=area, level=n)


def gen_star(n: int) -> Mesh:
    n = _check_level(n)
    g = n + 1
    polys = _grid_placement(star_polygon(4 + 2 * n, 1.0 / (n + 2)), g, 0.6 / g)
    area = signed_area(polys[0])
    return triangulate_complement(polys, max_area=area, level=n)


# mirroring ------------------------------------------------------------------

def jenga_base(splits: int) -> Mesh:
    """Three horizontal bands; the middle one cut in two halves, then the
    left-most middle rectangle halved ``splits`` times."""
    xs = [0.0, 0.5, 1.0]
    for _ in range(splits):
        xs.insert(1, xs[1] / 2)
    xs = np.array(xs)
    m = len(xs)
    lo = np.column_stack([xs, np.full(m, 0.25)])
    hi = np.column_stack([xs, np.full(m, 0.75)])
    V = np.concatenate([lo, hi, [[0, 0], [1, 0], [1, 1], [0, 1]]])
    c0 = 2 * m
    L, H = np.arange(m), m + np.arange(m)
    elements = [[c0, c0 + 1] + L[::-1].tolist()]  # bottom bar, hanging nodes on top
    elements += [[L[i], L[i + 1], H[i + 1], H[i]] for i in range(m - 1)]
    elements.append(H.tolist() + [c0 + 2, c0 + 3])  # top bar, hanging nodes below
    return Mesh.from_polygons(V, elements)


def slices_base(npoints: int) -> Mesh:
    """Kites joining (0,0) and (1,1) through consecutive anti-diagonal points
    (2^-i, 1 - 2^-i), (1 - 2^-i, 2^-i) for i = 1..npoints."""
    ts = sorted({2.0**-i for i in range(1, npoints + 1)} | {1 - 2.0**-i for i in range(1, npoints + 1)})
    chain = [(1.0, 0.0)] + [(1 - t, t) for t in ts] + [(0.0, 1.0)]
    V = np.array([[0.0, 0.0], [1.0, 1.0]] + chain)
    elements = [[0, 2 + j, 1, 3 + j] for j in range(len(chain) - 1)]
    return Mesh.from_polygons(V, elements)


def ulike_base(m: int) -> Mesh:
    """m nested U polylines opening upwards, equispaced at s = 1/(2(m+1))."""
    s = 1.0 / (2 * (m + 1))
    V, elements = [], []

    def vid(p):
        V.append(p)
        return len(V) - 1

    for j in range(m):
        a, b = j * s, (j + 1) * s
        elements.append([
            vid((a, a)), vid((1 - a, a)), vid((1 - a, 1)), vid((1 - b, 1)),
            vid((1 - b, b)), vid((b, b)), vid((b, 1)), vid((a, 1)),
        ])
    c = m * s
    elements.append([vid((c, c)), vid((1 - c, c)), vid((1 - c, 1)), vid((c, 1))])
    W, els = merge_vertices(np.array(V, dtype=float), [np.array(e) for e in elements])
    return Mesh.from_polygons(W, els)


def gen_jenga(n: int, per_step: int = 1) -> Mesh:
    n = _check_level(n)
    mesh = mirror_times(jenga_base(per_step * n), n)
    return Mesh(mesh.vertices, mesh.elements, level=n)


def gen_slices(n: int, per_step: int = 1) -> Mesh:
    n = _check_level(n)
    mesh = mirror_times(slices_base(per_step * n + 2), n)
    return Mesh(mesh.vertices, mesh.elements, level=n)


def gen_ulike(n: int, per_step: int = 1) -> Mesh:
    n = _check_level(n)
    mesh = mirror_times(ulike_base(2 ** (per_step * n)), n)
    return Mesh(mesh.vertices, mesh.elements, level=n)


def gen_multiple(kind: str, n: int) -> Mesh:
    gens = {"jenga4": gen_jenga, "slices4": gen_slices, "ulike4": gen_ulike}
    if kind not in gens:
        raise ValueError(f"kind must be one of {sorted(gens)}")
    return gens[kind](n, per_step=4)
