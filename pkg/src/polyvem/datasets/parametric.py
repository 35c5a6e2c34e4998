"""Parametric polygons deformed by t in [0, 1], each embedded in a triangulated square."""
from __future__ import annotations

import numpy as np

from ..mesh import Mesh, signed_area
from .core import triangulate_complement
from .generators import maze_polygon, star_polygon

CLASSES = ("maze", "star", "comb", "zeta", "u-like", "n-sides", "convexity", "isotropy")
T_VALUES = tuple(np.round(np.linspace(0.0, 1.0, 21), 10))
COMPLEMENT_AREA = 0.004


def _comb(t: float) -> np.ndarray:
    teeth = 5
    depth = 0.05 + 0.75 * t
    w = 1.0 / (2 * teeth - 1)
    pts = [(0.0, 0.0), (1.0, 0.0)]
    # walk the top from right to left, dropping into a notch between teeth
    for i in range(teeth - 1, -1, -1):
        x0, x1 = 2 * i * w, (2 * i + 1) * w
        pts += [(x1, 1.0), (x0, 1.0)]
        if i > 0:
            pts += [(x0, 1.0 - depth), (x0 - w, 1.0 - depth)]
    return np.array(pts)


def _zeta(t: float) -> np.ndarray:
    w = 0.3 - 0.25 * t
    band = 0.35 - 0.3 * t
    return np.array([
        [0, 0], [1, 0], [1, w], [band, w], [1, 1 - w],
        [1, 1], [0, 1], [0, 1 - w], [1 - band, 1 - w], [0, w],
    ], dtype=float)


def _ulike(t: float) -> np.ndarray:
    a = 0.3 - 0.27 * t
    return np.array([
        [0, 0], [1, 0], [1, 1], [1 - a, 1], [1 - a, a], [a, a], [a, 1], [0, 1],
    ], dtype=float)


def _nsides(t: float) -> np.ndarray:
    n = 4 + int(round(40 * t))
    th = 2 * np.pi * np.arange(n) / n + np.pi / n
    return np.column_stack([np.cos(th), np.sin(th)])


def _convexity(t: float) -> np.ndarray:
    return np.array([[0, 0], [1, 0], [1, 1], [0.5, 1.2 - 1.1 * t], [0, 1]], dtype=float)


def _isotropy(t: float) -> np.ndarray:
    h = 1.0 - 0.97 * t
    return np.array([[0, 0], [1, 0], [1, h], [0, h]], dtype=float)


_SHAPES = {
    "maze": lambda t: maze_polygon(0.3 - 0.27 * t),
    "star": lambda t: star_polygon(8, 1.0 - 0.9 * t),
    "comb": _comb,
    "zeta": _zeta,
    "u-like": _ulike,
    "n-sides": _nsides,
    "convexity": _convexity,
    "isotropy": _isotropy,
}


def parametric_polygon(cls: str, t: float) -> np.ndarray:
    """The deformed polygon, scaled uniformly into [0.25, 0.75]^2 and centred."""
    if cls not in _SHAPES:
        raise ValueError(f"unknown class {cls!r}; choose from {CLASSES}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"deformation parameter t must lie in [0, 1], got {t}")
    P = np.asarray(_SHAPES[cls](float(t)), dtype=float)
    if signed_area(P) < 0:
        P = P[::-1]
    lo, hi = P.min(0), P.max(0)
    scale = 0.5 / (hi - lo).max()
    return (P - (lo + hi) / 2) * scale + 0.5


def gen_parametric(cls: str, t: float, max_area: float = COMPLEMENT_AREA) -> Mesh:
    """Mesh with the polygon as its last element and triangles elsewhere."""
    return triangulate_complement([parametric_polygon(cls, t)], max_area=max_area)


def parametric_sweep(classes=CLASSES, ts=T_VALUES):
    for cls in classes:
        for t in ts:
            yield cls, float(t), gen_parametric(cls, float(t))
