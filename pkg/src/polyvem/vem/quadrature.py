"""One-dimensional and triangle quadrature rules."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as leg


@lru_cache(maxsize=None)
def gauss_lobatto(k: int):
    """(k+1)-point Gauss-Lobatto rule on [-1, 1], exact up to degree 2k-1.

    Interior nodes are the roots of P_k'; weights are 2 / (k(k+1) P_k(x)^2).
    """
    if k < 1:
        raise ValueError("Gauss-Lobatto needs k >= 1")
    ck = np.zeros(k + 1)
    ck[k] = 1.0
    inner = np.sort(leg.legroots(leg.legder(ck))) if k > 1 else np.zeros(0)
    x = np.concatenate([[-1.0], inner, [1.0]])
    w = 2.0 / (k * (k + 1) * leg.legval(x, ck) ** 2)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = leg.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def triangle_rule(order: int):
    """Collapsed (Duffy) Gauss rule on the reference triangle (0,0),(1,0),(0,1).

    Exact for polynomials of total degree <= order.
    """
    m = order // 2 + 2
    x, w = gauss_legendre(m)
    u = (x + 1) / 2
    wu = w / 2
    U, Vv = np.meshgrid(u, u, indexing="ij")
    WU, WV = np.meshgrid(wu, wu, indexing="ij")
    xi = U.ravel()
    eta = (Vv * (1 - U)).ravel()
    wt = (WU * WV * (1 - U)).ravel()
    pts = np.column_stack([xi, eta])
    pts.setflags(write=False)
    wt.setflags(write=False)
    return pts, wt
