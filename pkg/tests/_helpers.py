import numpy as np

from polyvem.mesh import Mesh

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
L_SHAPE = np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], dtype=float)
UNIT_TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def grid_mesh(m: int) -> Mesh:
    """m x m uniform square grid of the unit square."""
    s = np.linspace(0.0, 1.0, m + 1)
    X, Y = np.meshgrid(s, s)
    V = np.column_stack([X.ravel(), Y.ravel()])
    idx = lambda i, j: j * (m + 1) + i  # noqa: E731
    els = [[idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)] for j in range(m) for i in range(m)]
    return Mesh.from_polygons(V, els)


def regular_polygon(n: int, r: float = 1.0, center=(0.0, 0.0)) -> np.ndarray:
    th = 2 * np.pi * np.arange(n) / n
    return np.column_stack([center[0] + r * np.cos(th), center[1] + r * np.sin(th)])


def random_simple_polygon(rng, max_vertices: int = 10) -> np.ndarray:
    """Simple polygon with vertices at increasing polar angles and random radii.

    Gaps below pi keep the origin in the kernel; the polygon is usually non-convex.
    """
    n = int(rng.integers(3, max_vertices + 1))
    th = np.sort(rng.uniform(0, 2 * np.pi, n))
    while np.diff(np.r_[th, th[0] + 2 * np.pi]).max() >= np.pi:
        th = np.sort(rng.uniform(0, 2 * np.pi, n))
    r = rng.uniform(0.2, 1.0, n)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])

