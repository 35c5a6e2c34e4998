import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import qmc

from polyvem.datasets.generators import maze_polygon, star_polygon
from polyvem.geometry import (
    boundary_distance, chebyshev_center, ear_clip, max_inscribed_circle, min_enclosing_circle,
    points_in_polygon, polygon_kernel, polygon_quadrature,
)
from polyvem.mesh import signed_area

from ._helpers import L_SHAPE, UNIT_SQUARE, random_simple_polygon, regular_polygon


# oracles ----------------------------------------------------------------------

def mec_oracle(pts) -> float:
    """Smallest circle through 2 or 3 of the points that contains all of them."""
    pts = np.asarray(pts, dtype=float)
    best = math.inf
    cands = []
    for i, j in itertools.combinations(range(len(pts)), 2):
        c = (pts[i] + pts[j]) / 2
        cands.append((c, np.linalg.norm(pts[i] - c)))
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        a, b, c = pts[i], pts[j], pts[k]
        M = 2 * np.array([b - a, c - a])
        if abs(np.linalg.det(M)) < 1e-14:
            continue
        ctr = np.linalg.solve(M, [b @ b - a @ a, c @ c - a @ a])
        cands.append((ctr, np.linalg.norm(a - ctr)))
    for c, r in cands:
        if r < best and np.all(np.linalg.norm(pts - c, axis=1) <= r * (1 + 1e-12) + 1e-15):
            best = r
    return best


def in_all_inner_halfplanes(x, P) -> np.ndarray:
    """Kernel membership: left of (or on) every edge line."""
    a = P
    d = np.roll(P, -1, axis=0) - P
    rel = x[:, None, :] - a[None]
    cr = d[None, :, 0] * rel[..., 1] - d[None, :, 1] * rel[..., 0]
    return np.all(cr >= 0, axis=1)


def sees_boundary(x, P, per_edge=16) -> bool:
    """Literal visibility: segments from x to dense boundary samples stay inside P."""
    t = np.linspace(0, 1, per_edge, endpoint=False)
    Q = np.roll(P, -1, axis=0)
    targets = (P[:, None, :] + t[None, :, None] * (Q - P)[:, None, :]).reshape(-1, 2)
    for p in targets:
        s = np.linspace(0, 1, 64)[1:-1, None]
        seg = x + s * (p - x)
        if not points_in_polygon(seg, P).all():
            return False
    return True


def mc_kernel_area(P, m=17, seed=7) -> float:
    lo, hi = P.min(0), P.max(0)
    pts = qmc.Sobol(2, scramble=True, seed=seed).random_base2(m)
    pts = lo + pts * (hi - lo)
    inside = in_all_inner_halfplanes(pts, P) & points_in_polygon(pts, P)
    return inside.mean() * np.prod(hi - lo)


def depth_grid_oracle(P, n=1000) -> float:
    lo, hi = P.min(0), P.max(0)
    xs = np.linspace(lo[0], hi[0], n)
    ys = np.linspace(lo[1], hi[1], n)
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    best = 0.0
    for chunk in np.array_split(pts, 20):
        ins = points_in_polygon(chunk, P)
        if ins.any():
            best = max(best, boundary_distance(chunk[ins], P).max())
    return best


# minimum enclosing circle --------------------------------------------------------

def test_mec_unit_square():
    c, r = min_enclosing_circle(UNIT_SQUARE)
    assert np.allclose(c, [0.5, 0.5], atol=1e-15)
    assert r == pytest.approx(math.sqrt(2) / 2, abs=1e-15)


def test_mec_skinny_triangle_uses_longest_edge():
    P = np.array([[0, 0], [2, 0], [1, 0.1]])
    c, r = min_enclosing_circle(P)
    assert r == pytest.approx(mec_oracle(P), abs=1e-12)
    assert r == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(c, [1, 0])


def test_mec_repeated_segment():
    pts = np.array([[0, 0], [1, 0]] * 5, dtype=float)
    assert min_enclosing_circle(pts)[1] == pytest.approx(0.5, abs=1e-15)


def test_mec_matches_oracle_on_random_polygons(rng):
    worst = 0.0
    for _ in range(100):
        P = random_simple_polygon(rng)
        worst = max(worst, abs(min_enclosing_circle(P)[1] - mec_oracle(P)))
    assert worst <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=12))
def test_mec_contains_every_point(points):
    pts = np.array(points)
    c, r = min_enclosing_circle(pts)
    assert np.all(np.linalg.norm(pts - c, axis=1) <= r * (1 + 1e-9) + 1e-12)


def test_mec_order_independent(rng):
    P = random_simple_polygon(rng)
    r0 = min_enclosing_circle(P)[1]
    for _ in range(5):
        assert min_enclosing_circle(rng.permutation(P))[1] == pytest.approx(r0, abs=1e-14)


# maximum inscribed circle ------------------------------------------------------------

def test_ic_unit_square():
    assert max_inscribed_circle(UNIT_SQUARE)[1] == pytest.approx(0.5, abs=1e-6)


def test_ic_rectangle():
    R = np.array([[0, 0], [2, 0], [2, 1], [0, 1]], dtype=float)
    assert max_inscribed_circle(R)[1] == pytest.approx(0.5, abs=1e-6)


def test_ic_l_shape_matches_dense_grid():
    r = max_inscribed_circle(L_SHAPE)[1]
    assert r == pytest.approx(2 - math.sqrt(2), abs=1e-6 * math.sqrt(8))
    grid = depth_grid_oracle(L_SHAPE)
    assert grid <= r + 1e-9
    assert r - grid < 2 * 2 / 999


def test_ic_circle_lies_inside(rng):
    for _ in range(20):
        P = random_simple_polygon(rng)
        c, r = max_inscribed_circle(P)
        assert points_in_polygon(c[None], P)[0]
        assert boundary_distance(c[None], P)[0] == pytest.approx(r, abs=1e-12)


def test_ic_not_below_grid_oracle(rng):
    for _ in range(5):
        P = random_simple_polygon(rng)
        assert max_inscribed_circle(P)[1] >= depth_grid_oracle(P, 300) - 1e-9


# kernel ------------------------------------------------------------------------------

def test_kernel_of_convex_is_itself():
    H = regular_polygon(6)
    assert signed_area(polygon_kernel(H)) == pytest.approx(signed_area(H), rel=1e-12)


def test_kernel_l_shape():
    K = polygon_kernel(L_SHAPE)
    assert signed_area(K) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.sort(K, axis=0).min(0), [0, 0]) and np.allclose(K.max(0), [1, 1])


def test_kernel_empty_for_maze():
    assert len(polygon_kernel(maze_polygon(0.2))) == 0


def test_kernel_inside_polygon(rng):
    for _ in range(30):
        P = random_simple_polygon(rng)
        K = polygon_kernel(P)
        shrink = K.mean(0) + (1 - 1e-9) * (K - K.mean(0))
        assert points_in_polygon(shrink, P).all()


def test_kernel_matches_monte_carlo(rng):
    worst = 0.0
    for _ in range(100):
        P = random_simple_polygon(rng)
        ke = signed_area(polygon_kernel(P))
        worst = max(worst, abs(ke - mc_kernel_area(P)) / ke)
    assert worst < 1e-2


def test_halfplane_membership_is_visibility(rng):
    # validates the Monte-Carlo oracle against literal line-of-sight checks
    for P in (L_SHAPE, star_polygon(5, 0.4), random_simple_polygon(rng)):
        lo, hi = P.min(0), P.max(0)
        pts = lo + rng.random((60, 2)) * (hi - lo)
        pts = pts[points_in_polygon(pts, P)]
        for x in pts:
            assert in_all_inner_halfplanes(x[None], P)[0] == sees_boundary(x, P)


# chebyshev centre, ear clipping, quadrature -----------------------------------------------

def test_chebyshev_center_square():
    c, r = chebyshev_center(UNIT_SQUARE)
    assert np.allclose(c, [0.5, 0.5]) and r == pytest.approx(0.5)


def test_chebyshev_center_triangle_is_incircle():
    T = np.array([[0, 0], [3, 0], [0, 4]], dtype=float)
    assert chebyshev_center(T)[1] == pytest.approx(1.0)


def test_ear_clip_covers_area(rng):
    for P in (L_SHAPE, maze_polygon(0.1), star_polygon(12, 0.2), random_simple_polygon(rng)):
        tris = ear_clip(P)
        assert len(tris) == len(P) - 2
        areas = [signed_area(P[t]) for t in tris]
        assert min(areas) > 0
        assert sum(areas) == pytest.approx(signed_area(P), rel=1e-12)


def test_ear_clip_collinear_vertices():
    P = np.array([[0, 0], [0.5, 0], [1, 0], [1, 1], [0.5, 1], [0, 1]], dtype=float)
    tris = ear_clip(P)
    assert min(signed_area(P[t]) for t in tris) > 0


@pytest.mark.parametrize("order", [1, 2, 4, 6, 8])
def test_polygon_quadrature_exact(order):
    pts, w = polygon_quadrature(L_SHAPE, order)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            # exact integral over the L-shape = [0,2]x[0,1] + [0,1]x[1,2]
            exact = (2 ** (a + 1) / (a + 1)) / (b + 1) + (1 / (a + 1)) * (2 ** (b + 1) - 1) / (b + 1)
            assert (w * pts[:, 0] ** a * pts[:, 1] ** b).sum() == pytest.approx(exact, rel=1e-12)
