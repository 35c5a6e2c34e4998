"""Scaled monomials ((x - x_P)/h_P)^a ((y - y_P)/h_P)^b and their polygon moments."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..mesh import element_centroid, element_diameter
from .quadrature import gauss_legendre


@lru_cache(maxsize=None)
def monomial_exponents(k: int) -> tuple:
    """Exponents ordered by degree: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ..."""
    return tuple((d - i, i) for d in range(k + 1) for i in range(d + 1))


def dim_pk(k: int) -> int:
    return (k + 1) * (k + 2) // 2 if k >= 0 else 0


@dataclass(frozen=True)
class ScaledMonomialBasis:
    center: np.ndarray
    h: float
    k: int

    @classmethod
    def for_polygon(cls, P, k: int) -> "ScaledMonomialBasis":
        return cls(element_centroid(P), element_diameter(P), k)

    @property
    def exponents(self):
        return monomial_exponents(self.k)

    @property
    def size(self) -> int:
        return dim_pk(self.k)

    def values(self, pts) -> np.ndarray:
        """(npts, n_k) monomial values."""
        X = (np.atleast_2d(pts) - self.center) / self.h
        e = np.array(self.exponents)
        return X[:, 0:1] ** e[None, :, 0] * X[:, 1:2] ** e[None, :, 1]

    def gradients(self, pts) -> np.ndarray:
        """(npts, n_k, 2) monomial gradients."""
        X = (np.atleast_2d(pts) - self.center) / self.h
        e = np.array(self.exponents)
        a, b = e[:, 0], e[:, 1]
        x, y = X[:, 0:1], X[:, 1:2]
        with np.errstate(divide="ignore", invalid="ignore"):
            gx = np.where(a > 0, a * x ** np.maximum(a - 1, 0), 0.0) * y**b
            gy = np.where(b > 0, b * y ** np.maximum(b - 1, 0), 0.0) * x**a
        return np.stack([gx, gy], axis=-1) / self.h


def raw_moments(P, center, h, max_deg: int) -> dict:
    """Integrals over P of X^a Y^b, X = (x - cx)/h, for a + b <= max_deg.

    Uses the divergence theorem on homogeneous polynomials: for q homogeneous
    of degree d, div(X q) = (d + 2) q, and X.n is constant along each edge,
    so the area integral reduces to exact Gauss-Legendre edge integrals.
    Valid for any simple polygon, convex or not.
    """
    P = (np.asarray(P, dtype=float) - center) / h
    Q = np.roll(P, -1, axis=0)
    d = Q - P
    # X.n * |E| on each edge (outward normal of a CCW polygon is (dy, -dx)/|E|)
    xn_len = P[:, 0] * d[:, 1] - P[:, 1] * d[:, 0]
    npts = max_deg // 2 + 1
    t, w = gauss_legendre(npts)
    s = (t + 1) / 2
    pts = P[:, None, :] + s[None, :, None] * d[:, None, :]  # (edges, npts, 2)
    X, Y = pts[..., 0], pts[..., 1]
    out = {}
    for deg in range(max_deg + 1):
        for j in range(deg + 1):
            a, b = deg - j, j
            edge_int = ((X**a) * (Y**b) * (w / 2)[None, :]).sum(1)  # per unit edge parameter
            out[(a, b)] = (xn_len * edge_int).sum() / (deg + 2) * h * h
    return out


def polygon_monomial_moments(P, k: int, basis: ScaledMonomialBasis | None = None) -> np.ndarray:
    """Matrix H[i, j] = integral over P of m_i m_j for the degree-k scaled monomials."""
    basis = basis or ScaledMonomialBasis.for_polygon(P, k)
    raw = raw_moments(P, basis.center, basis.h, 2 * k)
    e = basis.exponents
    n = len(e)
    H = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            H[i, j] = H[j, i] = raw[(e[i][0] + e[j][0], e[i][1] + e[j][1])]
    return H

