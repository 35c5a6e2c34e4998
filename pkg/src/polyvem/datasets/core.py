"""Mirroring, hanging-node insertion, scaling indicators and hybrid triangulation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import triangle as tr

from ..geometry import ear_clip
from ..geometry import points_in_polygon
from ..mesh import Mesh, is_simple, signed_area

SNAP = 1e-12


class GenerationError(RuntimeError):
    def __init__(self, message: str, polygon_id: int | None = None):
        if polygon_id is not None:
            message = f"polygon {polygon_id}: {message}"
        super().__init__(message)
        self.polygon_id = polygon_id


@dataclass(frozen=True)
class ScalingIndicators:
    A_n: float
    e_n: float


def scaling_indicators(mesh: Mesh) -> ScalingIndicators:
    areas = mesh.areas()
    E = mesh.edges()
    L = np.linalg.norm(mesh.vertices[E[:, 1]] - mesh.vertices[E[:, 0]], axis=1)
    return ScalingIndicators(float(areas.max() / areas.min()), float(L.max() / L.min()))


def merge_vertices(V: np.ndarray, elements, tol: float = SNAP):
    """Identify vertices whose coordinates agree on a ``tol`` grid."""
    keys = np.round(V / tol).astype(np.int64)
    _, first, inv = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inv = inv.ravel()
    return V[first], [inv[e] for e in elements]


def insert_hanging_nodes(V: np.ndarray, elements, axis: int, value: float, tol: float = SNAP):
    """Split every element edge lying on the line {x_axis = value} at the
    mesh vertices that sit strictly inside it."""
    on = np.flatnonzero(np.abs(V[:, axis] - value) <= tol)
    if len(on) == 0:
        return elements
    other = 1 - axis
    order = on[np.argsort(V[on, other])]
    coord = V[order, other]
    out = []
    for e in elements:
        e = np.asarray(e)
        flag = np.abs(V[e, axis] - value) <= tol
        if not (flag & np.roll(flag, -1)).any():
            out.append(e)
            continue
        new = []
        n = len(e)
        for i in range(n):
            a, b = e[i], e[(i + 1) % n]
            new.append(a)
            if flag[i] and flag[(i + 1) % n]:
                ca, cb = V[a, other], V[b, other]
                lo, hi = (ca, cb) if ca < cb else (cb, ca)
                i0 = np.searchsorted(coord, lo + tol, side="left")
                i1 = np.searchsorted(coord, hi - tol, side="right")
                mid = order[i0:i1]
                if ca > cb:
                    mid = mid[::-1]
                new.extend(mid.tolist())
        out.append(np.array(new, dtype=np.int64))
    return out


def mirror(mesh: Mesh) -> Mesh:
    """Tile four half-size copies of ``mesh`` into the unit square."""
    V = mesh.vertices
    nv = len(V)
    verts, els = [], []
    for c, off in enumerate(((0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5))):
        verts.append(V * 0.5 + np.array(off))
        els.extend(e + c * nv for e in mesh.elements)
    W, els = merge_vertices(np.concatenate(verts), els)
    els = insert_hanging_nodes(W, els, 0, 0.5)
    els = insert_hanging_nodes(W, els, 1, 0.5)
    return Mesh(W, tuple(els), level=mesh.level + 1)


def mirror_times(mesh: Mesh, n: int) -> Mesh:
    for _ in range(n):
        mesh = mirror(mesh)
    return mesh


def _interior_point(P: np.ndarray) -> np.ndarray:
    tris = ear_clip(P)
    areas = [abs(signed_area(P[t])) for t in tris]
    return P[tris[int(np.argmax(areas))]].mean(axis=0)


def _split_long_edges(P: np.ndarray, max_len: float) -> np.ndarray:
    out = []
    for a, b in zip(P, np.roll(P, -1, axis=0)):
        m = max(1, int(np.ceil(np.linalg.norm(b - a) / max_len)))
        out.extend(a + (b - a) * (j / m) for j in range(m))
    return np.array(out)


def _check_polygons(polys) -> None:
    boxes = []
    for i, P in enumerate(polys):
        if len(P) < 3 or not is_simple(P):
            raise GenerationError("polygon is not simple", i)
        if P.min() <= SNAP or P.max() >= 1 - SNAP:
            raise GenerationError("polygon must lie strictly inside the unit square", i)
        boxes.append((P.min(0), P.max(0)))
    for i, P in enumerate(polys):
        for j in range(i + 1, len(polys)):
            Q = polys[j]
            if np.any(boxes[i][0] > boxes[j][1]) or np.any(boxes[j][0] > boxes[i][1]):
                continue
            if points_in_polygon(P, Q).any() or points_in_polygon(Q, P).any() or _edges_cross(P, Q):
                raise GenerationError(f"polygon overlaps polygon {j}", i)


def _edges_cross(P: np.ndarray, Q: np.ndarray) -> bool:
    a, b = P, np.roll(P, -1, axis=0)
    c, d = Q, np.roll(Q, -1, axis=0)

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    A, B = a[:, None], b[:, None]
    C, D = c[None], d[None]
    d1, d2 = orient(C, D, A), orient(C, D, B)
    d3, d4 = orient(A, B, C), orient(A, B, D)
    return bool(np.any((d1 * d2 <= 0) & (d3 * d4 <= 0)))


def triangulate_complement(
    polygons,
    max_area: float,
    min_angle: float = 30.0,
    max_edge: float | None = None,
    level: int = 0,
) -> Mesh:
    """Mesh the unit square: the given polygons are kept as elements and the
    rest is filled with quality triangles.  Polygon edges that the triangulator
    splits come back as hanging nodes of the polygon."""
    polys = [np.asarray(P, dtype=float) for P in polygons]
    if max_edge is not None:
        polys = [_split_long_edges(P, max_edge) for P in polys]
    corners = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    pts = [corners]
    segs = [np.array([[0, 1], [1, 2], [2, 3], [3, 0]])]
    marks = [np.ones(4, dtype=np.int32)]
    holes = []
    base = 4
    _check_polygons(polys)
    for i, P in enumerate(polys):
        if signed_area(P) <= 0:
            P = P[::-1]
            polys[i] = P
        n = len(P)
        pts.append(P)
        idx = base + np.arange(n)
        segs.append(np.stack([idx, np.roll(idx, -1)], axis=1))
        marks.append(np.full(n, i + 2, dtype=np.int32))
        try:
            holes.append(_interior_point(P))
        except ValueError as exc:
            raise GenerationError(f"cannot triangulate the polygon interior: {exc}", i) from None
        base += n
    data = {
        "vertices": np.concatenate(pts),
        "segments": np.concatenate(segs),
        "segment_markers": np.concatenate(marks)[:, None],
    }
    if holes:
        data["holes"] = np.array(holes)
    try:
        out = tr.triangulate(data, f"pq{min_angle:g}a{max_area:.17g}")
    except Exception as exc:  # the C library reports failures as generic errors
        raise GenerationError(f"triangulation failed: {exc}") from None
    V = out["vertices"]
    elements = [t for t in out["triangles"]]
    seg, smark = out["segments"], out["segment_markers"].ravel()
    for i, P in enumerate(polys):
        ids = np.unique(seg[smark == i + 2])
        if len(ids) < len(P):
            raise GenerationError("polygon boundary lost during triangulation", i)
        elements.append(_order_along(P, V, ids, i))
    mesh = Mesh.from_polygons(V, elements, level=level)
    return mesh


def _order_along(P: np.ndarray, V: np.ndarray, ids: np.ndarray, pid: int) -> np.ndarray:
    """Sort boundary vertex ids by arclength position along polygon P."""
    Q = np.roll(P, -1, axis=0)
    D = Q - P
    L2 = (D**2).sum(1)
    X = V[ids]
    # parameter and distance of every vertex against every edge
    t = ((X[:, None, :] - P[None]) * D[None]).sum(-1) / L2[None]
    tc = np.clip(t, 0.0, 1.0)
    proj = P[None] + tc[..., None] * D[None]
    dist = np.linalg.norm(X[:, None, :] - proj, axis=-1)
    e = dist.argmin(axis=1)
    if dist[np.arange(len(ids)), e].max() > 1e-9:
        raise GenerationError("triangulator moved a polygon vertex", pid)
    pos = e + tc[np.arange(len(ids)), e]
    pos = np.where(pos >= len(P) - 1e-12, 0.0, pos)
    return ids[np.argsort(pos, kind="stable")]

