"""Polygonal mesh data model, polygon primitives, validation and POLYMESH I/O.

All meshes live on the unit square.  Elements are counterclockwise vertex
cycles; consecutive collinear vertices (hanging nodes) are allowed and are
treated as genuine vertices everywhere downstream.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

COORD_TOL = 1e-12
AREA_TOL = 1e-9


class MeshError(ValueError):
    pass


class InvalidPolygonError(MeshError):
    pass


class OrientationError(MeshError):
    pass


class EmptyMeshError(MeshError):
    pass


class MeshParseError(MeshError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# --------------------------------------------------------------------------
# polygon primitives (P is an (n, 2) array of vertex coordinates)


def _as_polygon(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[1] != 2 or len(P) < 3:
        raise InvalidPolygonError("a polygon needs at least 3 vertices")
    return P


def signed_area(P) -> float:
    P = _as_polygon(P)
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def element_area(P) -> float:
    """Shoelace area of a counterclockwise polygon.

    Raises OrientationError for clockwise (or degenerate) input, so callers
    have to normalise orientation explicitly.
    """
    a = signed_area(P)
    if a <= 0.0:
        raise OrientationError(f"polygon is not counterclockwise (signed area {a:.3e})")
    return a


def element_diameter(P) -> float:
    # the sup over a polygon is attained at a pair of vertices
    P = _as_polygon(P)
    d = P[:, None, :] - P[None, :, :]
    return float(np.sqrt((d**2).sum(-1).max()))


def element_centroid(P) -> np.ndarray:
    P = _as_polygon(P)
    x, y = P[:, 0], P[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return np.array([cx, cy])


def edge_lengths(P) -> np.ndarray:
    P = _as_polygon(P)
    return np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1)


def perimeter(P) -> float:
    return float(edge_lengths(P).sum())


def _segments_cross(p1, p2, q1, q2, tol=1e-14) -> bool:
    """True when closed segments p1p2 and q1q2 share a point."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_seg(a, b, c):
        return (
            min(a[0], b[0]) - tol <= c[0] <= max(a[0], b[0]) + tol
            and min(a[1], b[1]) - tol <= c[1] <= max(a[1], b[1]) + tol
        )

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    scale = tol * max(1.0, abs(d1) + abs(d2) + abs(d3) + abs(d4))
    if ((d1 > scale and d2 < -scale) or (d1 < -scale and d2 > scale)) and (
        (d3 > scale and d4 < -scale) or (d3 < -scale and d4 > scale)
    ):
        return True
    if abs(d1) <= scale and on_seg(q1, q2, p1):
        return True
    if abs(d2) <= scale and on_seg(q1, q2, p2):
        return True
    if abs(d3) <= scale and on_seg(p1, p2, q1):
        return True
    if abs(d4) <= scale and on_seg(p1, p2, q2):
        return True
    return False


def is_simple(P) -> bool:
    """Check that no two non-adjacent edges of P touch and no vertex repeats."""
    P = _as_polygon(P)
    n = len(P)
    if np.any(np.all(np.abs(P - np.roll(P, -1, axis=0)) <= 0.0, axis=1)):
        return False
    # bounding-box prefilter, vectorised; exact test on the survivors only
    a, b = P, np.roll(P, -1, axis=0)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    ov = (lo[:, None, 0] <= hi[None, :, 0]) & (lo[None, :, 0] <= hi[:, None, 0])
    ov &= (lo[:, None, 1] <= hi[None, :, 1]) & (lo[None, :, 1] <= hi[:, None, 1])
    ii, jj = np.nonzero(np.triu(ov, 2))
    for i, j in zip(ii, jj):
        if i == 0 and j == n - 1:
            continue
        if _segments_cross(a[i], b[i], a[j], b[j]):
            return False
    # adjacent edges folding back onto each other
    d0 = b - a
    d1 = np.roll(d0, -1, axis=0)
    cross = d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0]
    dot = (d0 * d1).sum(1)
    fold = (np.abs(cross) <= 1e-14 * np.linalg.norm(d0, axis=1) * np.linalg.norm(d1, axis=1)) & (dot < 0)
    return not bool(fold.any())


# --------------------------------------------------------------------------
# mesh


def _on_unit_boundary(xy: np.ndarray, tol: float = COORD_TOL) -> np.ndarray:
    x, y = xy[:, 0], xy[:, 1]
    return (np.abs(x) <= tol) | (np.abs(x - 1) <= tol) | (np.abs(y) <= tol) | (np.abs(y - 1) <= tol)


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable polygonal mesh of the unit square.

    ``elements`` holds one integer array per element, counterclockwise.
    """

    vertices: np.ndarray
    elements: tuple
    level: int = 0
    boundary_vertex_flags: np.ndarray = field(default=None)

    def __post_init__(self):
        V = np.ascontiguousarray(self.vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2:
            raise MeshError("vertices must be an (n, 2) array")
        els = tuple(np.asarray(e, dtype=np.int64) for e in self.elements)
        V.setflags(write=False)
        for e in els:
            e.setflags(write=False)
        flags = self.boundary_vertex_flags
        flags = _on_unit_boundary(V) if flags is None else np.asarray(flags, dtype=bool)
        flags.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "boundary_vertex_flags", flags)

    @classmethod
    def from_polygons(cls, vertices, elements: Iterable[Sequence[int]], level: int = 0) -> "Mesh":
        """Build a mesh, flipping clockwise cycles and dropping unused vertices."""
        V = np.asarray(vertices, dtype=float)
        els = []
        for e in elements:
            e = np.asarray(e, dtype=np.int64)
            if signed_area(V[e]) < 0:
                e = e[::-1]
            els.append(e)
        used = np.zeros(len(V), dtype=bool)
        for e in els:
            used[e] = True
        if not used.all():
            remap = -np.ones(len(V), dtype=np.int64)
            remap[used] = np.arange(used.sum())
            V = V[used]
            els = [remap[e] for e in els]
        return cls(V, tuple(els), level=level)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def polygon(self, i: int) -> np.ndarray:
        return self.vertices[self.elements[i]]

    def polygons(self):
        return [self.vertices[e] for e in self.elements]

    def areas(self) -> np.ndarray:
        return np.array([signed_area(p) for p in self.polygons()])

    def diameters(self) -> np.ndarray:
        return np.array([element_diameter(p) for p in self.polygons()])

    def edges(self) -> np.ndarray:
        """Unique undirected edges as an (m, 2) array with sorted endpoints."""
        pairs = np.concatenate([np.stack([e, np.roll(e, -1)], axis=1) for e in self.elements])
        return np.unique(np.sort(pairs, axis=1), axis=0)

    def scaled(self, s: float) -> "Mesh":
        # used by scale-invariance checks; the result leaves the unit square
        return Mesh(self.vertices * s, self.elements, level=self.level,
                    boundary_vertex_flags=self.boundary_vertex_flags)


@dataclass
class Dataset:
    name: str
    meshes: list

    def __post_init__(self):
        sizes = [mesh_size(m) for m in self.meshes]
        if any(b >= a for a, b in zip(sizes, sizes[1:])):
            raise MeshError(f"dataset {self.name!r}: mesh sizes are not strictly decreasing")


def mesh_size(mesh: Mesh) -> float:
    if mesh.n_elements == 0:
        raise EmptyMeshError("mesh has no elements")
    return float(mesh.diameters().max())


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str  # 'polygon', 'orientation', 'self-intersection', 'overlap', 'conformity', 'coverage', 'bounds'
    message: str
    elements: tuple = ()


def _crossing_pairs(mesh: Mesh, candidates: set) -> list:
    """Pairs of distinct elements among ``candidates`` whose edges properly cross."""
    found = []
    cand = sorted(candidates)
    boxes = {i: (mesh.polygon(i).min(0), mesh.polygon(i).max(0)) for i in cand}
    for a_i, a in enumerate(cand):
        lo_a, hi_a = boxes[a]
        Pa = mesh.polygon(a)
        for b in cand[a_i + 1:]:
            lo_b, hi_b = boxes[b]
            if np.any(lo_a >= hi_b - 1e-12) or np.any(lo_b >= hi_a - 1e-12):
                continue
            Pb = mesh.polygon(b)
            hit = False
            for i in range(len(Pa)):
                p1, p2 = Pa[i], Pa[(i + 1) % len(Pa)]
                for j in range(len(Pb)):
                    q1, q2 = Pb[j], Pb[(j + 1) % len(Pb)]
                    if _proper_cross(p1, p2, q1, q2):
                        hit = True
                        break
                if hit:
                    break
            if hit or _strictly_inside(Pa, Pb) or _strictly_inside(Pb, Pa):
                found.append((a, b))
    return found


def _strictly_inside(Pa: np.ndarray, Pb: np.ndarray, tol: float = 1e-12) -> bool:
    """True when a vertex or edge midpoint of Pa lies strictly inside Pb."""
    from .geometry import boundary_distance, points_in_polygon

    probes = np.concatenate([Pa, 0.5 * (Pa + np.roll(Pa, -1, axis=0))])
    inside = points_in_polygon(probes, Pb) & (boundary_distance(probes, Pb) > tol)
    return bool(inside.any())


def _proper_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    eps = 1e-15
    return d1 * d2 < -eps and d3 * d4 < -eps


def validate(mesh: Mesh) -> list:
    """Return the list of violations; empty iff the mesh is a valid tiling.

    Coverage is checked by area bookkeeping.  Overlap and gaps are checked
    through edge matching: in a conforming mesh every interior directed edge
    appears once in each direction, which together with positive element
    areas forces every point of the square to be covered exactly once.
    Elements touching an unmatched edge are additionally tested pairwise for
    proper edge crossings.
    """
    out: list = []
    V = mesh.vertices
    nv = len(V)
    if mesh.n_elements == 0:
        return [Violation("polygon", "mesh has no elements")]
    if np.any(V < -COORD_TOL) or np.any(V > 1 + COORD_TOL):
        out.append(Violation("bounds", "vertex coordinates leave the unit square"))

    total = 0.0
    good = []
    for i, e in enumerate(mesh.elements):
        if len(e) < 3:
            out.append(Violation("polygon", f"element {i} has fewer than 3 vertices", (i,)))
            continue
        if e.min() < 0 or e.max() >= nv:
            out.append(Violation("polygon", f"element {i} references a missing vertex", (i,)))
            continue
        P = V[e]
        a = signed_area(P)
        if a <= 0:
            out.append(Violation("orientation", f"element {i} is not counterclockwise", (i,)))
        if not is_simple(P):
            out.append(Violation("self-intersection", f"element {i} is not a simple polygon", (i,)))
        total += abs(a)
        good.append(i)

    if abs(total - 1.0) > AREA_TOL:
        out.append(Violation("coverage", f"element areas sum to {total:.12g}, expected 1"))

    directed: dict = {}
    for i in good:
        e = mesh.elements[i]
        for a, b in zip(e, np.roll(e, -1)):
            directed.setdefault((int(a), int(b)), []).append(i)

    dup_pairs = set()
    for key, owners in directed.items():
        if len(owners) > 1:
            for x in range(len(owners)):
                for y in range(x + 1, len(owners)):
                    dup_pairs.add(tuple(sorted((owners[x], owners[y]))))
    suspicious = set()
    for (a, b), owners in directed.items():
        if (b, a) in directed:
            continue
        pa, pb = V[a], V[b]
        on_side = any(
            abs(pa[c] - s) <= COORD_TOL and abs(pb[c] - s) <= COORD_TOL for c in (0, 1) for s in (0.0, 1.0)
        )
        if not on_side:
            suspicious.update(owners)
            out.append(Violation("conformity", f"edge ({a}, {b}) has no matching neighbour edge", tuple(owners)))

    overlaps = set(dup_pairs)
    if suspicious:
        overlaps.update(_crossing_pairs(mesh, suspicious))
    for pair in sorted(overlaps):
        out.append(Violation("overlap", f"elements {pair[0]} and {pair[1]} overlap", pair))
    return out


# --------------------------------------------------------------------------
# POLYMESH text format


def save_mesh(mesh: Mesh, path) -> None:
    lines = ["POLYMESH 1", f"{mesh.n_vertices} {mesh.n_elements}"]
    lines += [f"{x:.17g} {y:.17g}" for x, y in mesh.vertices]
    lines += [" ".join([str(len(e))] + [str(int(i)) for i in e]) for e in mesh.elements]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_mesh(path, level: int = 0) -> Mesh:
    text = Path(path).read_text(encoding="utf-8")
    rows = [(no, ln.split("#", 1)[0].split()) for no, ln in enumerate(text.splitlines(), start=1)]
    rows = [(no, toks) for no, toks in rows if toks]
    if not rows or rows[0][1] != ["POLYMESH", "1"]:
        raise MeshParseError("missing 'POLYMESH 1' header", rows[0][0] if rows else 1)
    if len(rows) < 2 or len(rows[1][1]) != 2:
        raise MeshParseError("expected '<num_vertices> <num_elements>'", rows[1][0] if len(rows) > 1 else 2)
    try:
        nv, ne = (int(t) for t in rows[1][1])
    except ValueError:
        raise MeshParseError("counts must be integers", rows[1][0]) from None
    if ne == 0:
        raise MeshParseError("no elements", rows[1][0])
    if len(rows) < 2 + nv + ne:
        raise MeshParseError("file ends before all vertices and elements were read", rows[-1][0])
    verts = np.empty((nv, 2))
    for i in range(nv):
        no, toks = rows[2 + i]
        if len(toks) != 2:
            raise MeshParseError("a vertex line needs exactly two coordinates", no)
        try:
            verts[i] = [float(toks[0]), float(toks[1])]
        except ValueError:
            raise MeshParseError("bad vertex coordinate", no) from None
    elements = []
    for j in range(ne):
        no, toks = rows[2 + nv + j]
        try:
            ints = [int(t) for t in toks]
        except ValueError:
            raise MeshParseError("element indices must be integers", no) from None
        k, idx = ints[0], ints[1:]
        if k < 3 or len(idx) != k:
            raise MeshParseError(f"element declares {k} vertices but lists {len(idx)}", no)
        if min(idx) < 0 or max(idx) >= nv:
            raise MeshParseError("vertex index out of range", no)
        e = np.array(idx, dtype=np.int64)
        if signed_area(verts[e]) <= 0:
            raise MeshParseError("element is not counterclockwise", no)
        elements.append(e)
    if len(rows) > 2 + nv + ne:
        raise MeshParseError("unexpected trailing content", rows[2 + nv + ne][0])
    return Mesh(verts, tuple(elements), level=level)
