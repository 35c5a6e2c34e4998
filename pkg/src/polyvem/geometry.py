"""Computational-geometry kernels used by the quality metrics and the solver."""
from __future__ import annotations

import math
import random

import numpy as np
from scipy.optimize import linprog

from .mesh import signed_area

KERNEL_TOL = 1e-12


# --------------------------------------------------------------------------
# point location / distances


def points_in_polygon(points, P) -> np.ndarray:
    """Even-odd crossing test, vectorised over ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    P = np.asarray(P, dtype=float)
    x, y = pts[:, 0:1], pts[:, 1:2]
    x0, y0 = P[:, 0], P[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    straddle = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    hits = straddle & (x < xint)
    return (hits.sum(axis=1) % 2).astype(bool)


def boundary_distance(points, P) -> np.ndarray:
    """Unsigned distance from each point to the polygon boundary."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = np.asarray(P, dtype=float)
    b = np.roll(a, -1, axis=0)
    d = b - a
    dd = (d**2).sum(1)
    rel = pts[:, None, :] - a[None, :, :]
    t = np.clip((rel * d[None]).sum(-1) / dd[None], 0.0, 1.0)
    proj = a[None] + t[..., None] * d[None]
    return np.sqrt(((pts[:, None, :] - proj) ** 2).sum(-1)).min(axis=1)


def signed_boundary_distance(points, P) -> np.ndarray:
    dist = boundary_distance(points, P)
    return np.where(points_in_polygon(points, P), dist, -dist)


# --------------------------------------------------------------------------
# triangulation of simple polygons


def ear_clip(P) -> np.ndarray:
    """Triangulate a simple CCW polygon, returning an (n-2, 3) index array.

    Collinear (hanging) vertices are handled: they are never clipped as ears
    while a convex vertex remains, so every output triangle has positive area.
    """
    P = np.asarray(P, dtype=float)
    n = len(P)
    if n == 3:
        return np.array([[0, 1, 2]])
    scale = max(np.ptp(P[:, 0]), np.ptp(P[:, 1])) ** 2
    eps = 1e-14 * scale
    idx = list(range(n))
    tris = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def blocked(a, b, c, others):
        # a point on or inside the candidate ear blocks it
        Q = P[others]
        c1 = (b[0] - a[0]) * (Q[:, 1] - a[1]) - (b[1] - a[1]) * (Q[:, 0] - a[0])
        c2 = (c[0] - b[0]) * (Q[:, 1] - b[1]) - (c[1] - b[1]) * (Q[:, 0] - b[0])
        c3 = (a[0] - c[0]) * (Q[:, 1] - c[1]) - (a[1] - c[1]) * (Q[:, 0] - c[0])
        return bool(np.any((c1 >= -eps) & (c2 >= -eps) & (c3 >= -eps)))

    guard = 0
    start = 0
    while len(idx) > 3:
        m = len(idx)
        clipped = False
        arr = np.array(idx)
        for step in range(m):
            i = (start + step) % m
            ip, ic, inx = idx[i - 1], idx[i], idx[(i + 1) % m]
            a, b, c = P[ip], P[ic], P[inx]
            if cross(a, b, c) <= eps:
                continue
            mask = (arr != ip) & (arr != ic) & (arr != inx)
            if not blocked(a, b, c, arr[mask]):
                tris.append((ip, ic, inx))
                idx.pop(i)
                start = max(i - 1, 0)
                clipped = True
                break
        if not clipped:
            # only degenerate (collinear) corners left: drop a flat vertex
            for i in range(m):
                a, b, c = P[idx[i - 1]], P[idx[i]], P[idx[(i + 1) % m]]
                if abs(cross(a, b, c)) <= eps:
                    idx.pop(i)
                    clipped = True
                    break
        guard += 1
        if not clipped or guard > 4 * n * n:
            raise ValueError("ear clipping failed; polygon is not simple")
    a, b, c = (P[i] for i in idx)
    if cross(a, b, c) > eps:
        tris.append(tuple(idx))
    return np.array(tris, dtype=np.int64)


# --------------------------------------------------------------------------
# minimum enclosing circle (Welzl, iterative move-to-front form)


def _circle2(a, b):
    c = (a + b) / 2.0
    return c, math.dist(a, c)


def _circle3(a, b, c):
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    if d == 0.0:
        return None
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = np.array([a[0] + ux, a[1] + uy])
    r = max(math.dist(center, a), math.dist(center, b), math.dist(center, c))
    return center, r


def _triangle_mec(T):
    """Circumcircle for acute triangles, else the longest-edge circle."""
    a, b, c = T
    L2 = np.array([((b - c) ** 2).sum(), ((c - a) ** 2).sum(), ((a - b) ** 2).sum()])
    i = int(np.argmax(L2))
    if L2[i] >= L2.sum() - L2[i]:  # right or obtuse at the vertex opposite edge i
        p, q = np.delete(T, i, axis=0)
        return (p + q) / 2, float(np.sqrt(L2[i])) / 2
    circ = _circle3(a, b, c)
    if circ is None:
        return None
    return np.asarray(circ[0], dtype=float), float(circ[1])


def _inside(circle, p, tol):
    return math.dist(circle[0], p) <= circle[1] + tol


def min_enclosing_circle(points, seed: int = 0):
    """Smallest circle containing all ``points``; returns (center, radius)."""
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.size == 0:
        raise ValueError("need at least one point")
    if len(arr) == 3:
        c = _triangle_mec(arr)
        if c is not None:
            return c
    pts = list(arr)
    pts = list({(float(p[0]), float(p[1])) for p in pts})
    pts.sort()
    random.Random(seed).shuffle(pts)
    pts = [np.array(p) for p in pts]
    span = max(np.ptp([p[0] for p in pts]), np.ptp([p[1] for p in pts]), 1e-300)
    tol = 1e-13 * span

    circ = (pts[0], 0.0)
    for i in range(1, len(pts)):
        p = pts[i]
        if _inside(circ, p, tol):
            continue
        circ = (p, 0.0)
        for j in range(i):
            q = pts[j]
            if _inside(circ, q, tol):
                continue
            circ = _circle2(p, q)
            for k in range(j):
                s = pts[k]
                if _inside(circ, s, tol):
                    continue
                c3 = _circle3(p, q, s)
                if c3 is None:
                    # collinear: the farthest pair spans the circle
                    cands = [_circle2(p, q), _circle2(p, s), _circle2(q, s)]
                    c3 = max(cands, key=lambda c: c[1])
                circ = c3
    return np.asarray(circ[0], dtype=float), float(circ[1])


# --------------------------------------------------------------------------
# kernel (visibility core) and Chebyshev centre


def _clip_halfplane(poly: np.ndarray, a: np.ndarray, d: np.ndarray, tol: float) -> np.ndarray:
    """Keep the part of convex ``poly`` to the left of the line a + t d."""
    if len(poly) == 0:
        return poly
    rel = poly - a
    s = d[0] * rel[:, 1] - d[1] * rel[:, 0]
    inside = s >= -tol
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    out = []
    m = len(poly)
    for i in range(m):
        j = (i + 1) % m
        pi, pj = poly[i], poly[j]
        si, sj = s[i], s[j]
        if inside[i]:
            out.append(pi)
        if inside[i] != inside[j]:
            t = si / (si - sj)
            out.append(pi + t * (pj - pi))
    res = np.array(out) if out else poly[:0]
    if len(res):
        keep = np.ones(len(res), dtype=bool)
        diff = np.linalg.norm(res - np.roll(res, -1, axis=0), axis=1)
        keep[diff <= tol] = False
        if keep.sum() < len(res):
            res = res[keep] if keep.any() else res[:1]
    return res


def polygon_kernel(P, tol: float = KERNEL_TOL) -> np.ndarray:
    """Kernel of a simple CCW polygon as a convex CCW vertex array.

    Returns an empty (0, 2) array when the polygon is not star-shaped.  The
    bounding box is clipped against the inner half-plane of every edge.
    """
    P = np.asarray(P, dtype=float)
    lo, hi = P.min(0), P.max(0)
    scale = float(np.max(hi - lo))
    box = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    kern = box
    Q = np.roll(P, -1, axis=0)
    for a, b in zip(P, Q):
        d = b - a
        L = math.hypot(d[0], d[1])
        if L == 0.0:
            continue
        kern = _clip_halfplane(kern, a, d / L, tol * scale)
        if len(kern) == 0:
            break
    if len(kern) < 3 or signed_area(kern) <= (tol * scale) ** 2:
        return np.zeros((0, 2))
    return kern


def _incircle(P):
    L = np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1)
    # incenter weights are the opposite edge lengths
    w = np.array([L[1], L[2], L[0]])
    center = (w[:, None] * P).sum(0) / w.sum()
    return center, 2.0 * abs(signed_area(P)) / L.sum()


def chebyshev_center(C):
    """Largest disk inside convex CCW polygon C, via a 3-variable LP."""
    C = np.asarray(C, dtype=float)
    if len(C) < 3:
        return np.full(2, np.nan), 0.0
    if len(C) == 3:
        return _incircle(C)
    d = np.roll(C, -1, axis=0) - C
    L = np.linalg.norm(d, axis=1)
    keep = L > 0
    C, d, L = C[keep], d[keep], L[keep]
    # inner side is the left; outward unit normal n = (dy, -dx)/L; n.x + r <= n.a
    n = np.stack([d[:, 1], -d[:, 0]], axis=1) / L[:, None]
    b = (n * C).sum(1)
    shift = C.mean(0)
    A_ub = np.hstack([n, np.ones((len(n), 1))])
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=A_ub, b_ub=b - n @ shift,
                  bounds=[(None, None), (None, None), (0, None)], method="highs")
    if res.status != 0:
        return np.full(2, np.nan), 0.0
    return res.x[:2] + shift, float(res.x[2])


def _is_convex(P, tol=1e-12) -> bool:
    d0 = np.roll(P, -1, axis=0) - P
    d1 = np.roll(d0, -1, axis=0)
    cr = d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0]
    scale = np.linalg.norm(d0, axis=1) * np.linalg.norm(d1, axis=1)
    return bool(np.all(cr >= -tol * scale))


def max_inscribed_circle(P, rtol: float = 1e-7, beam: int = 512):
    """Largest disk contained in a simple polygon.

    Triangles use the incircle formula and convex polygons the Chebyshev LP.
    Non-convex polygons go through a grid-seeded branch-and-bound on the
    distance-to-boundary function: a square cell of half-size s centred at c
    cannot contain a point deeper than dist(c) + s*sqrt(2), so cells are
    refined until no cell can beat the incumbent by more than rtol * h_P.
    """
    P = np.asarray(P, dtype=float)
    if len(P) == 3:
        return _incircle(P)
    if _is_convex(P):
        return chebyshev_center(P)

    lo, hi = P.min(0), P.max(0)
    span = hi - lo
    h = float(np.linalg.norm(span))
    eps = rtol * h
    ng = 64
    cell = float(span.max()) / ng
    xs = lo[0] + cell * (np.arange(int(np.ceil(span[0] / cell)) + 1) + 0.5)
    ys = lo[1] + cell * (np.arange(int(np.ceil(span[1] / cell)) + 1) + 0.5)
    X, Y = np.meshgrid(xs, ys)
    centers = np.column_stack([X.ravel(), Y.ravel()])
    half = cell / 2.0

    vals = signed_boundary_distance(centers, P)
    best_i = int(np.argmax(vals))
    best_c, best_v = centers[best_i].copy(), float(vals[best_i])
    while len(centers):
        bound = vals + half * math.sqrt(2.0)
        keep = bound > best_v + eps
        centers, bound = centers[keep], bound[keep]
        if not len(centers):
            break
        if len(centers) > beam:
            # corridors of constant width give a ridge of maxima; any ridge point will do
            centers = centers[np.argsort(bound)[-beam:]]
        half /= 2.0
        offs = np.array([[-1, -1], [1, -1], [-1, 1], [1, 1]]) * half
        centers = (centers[:, None, :] + offs[None]).reshape(-1, 2)
        vals = signed_boundary_distance(centers, P)
        i = int(np.argmax(vals))
        if vals[i] > best_v:
            best_v, best_c = float(vals[i]), centers[i].copy()
        if half < 1e-3 * eps:
            break
    return best_c, best_v


# --------------------------------------------------------------------------
# quadrature over polygons (for non-polynomial integrands)


def polygon_quadrature(P, order: int):
    """Points and weights integrating exactly degree ``order`` polynomials on P."""
    from .vem.quadrature import triangle_rule

    P = np.asarray(P, dtype=float)
    tris = ear_clip(P)
    ref_pts, ref_w = triangle_rule(order)
    a, b, c = P[tris[:, 0]], P[tris[:, 1]], P[tris[:, 2]]
    e1, e2 = b - a, c - a
    det = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    pts = a[:, None, :] + ref_pts[None, :, 0:1] * e1[:, None, :] + ref_pts[None, :, 1:2] * e2[:, None, :]
    return pts.reshape(-1, 2), (det[:, None] * ref_w[None, :]).ravel()
