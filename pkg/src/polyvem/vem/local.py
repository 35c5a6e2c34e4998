"""Element-level virtual element matrices for the enhanced conforming space.

Local DOF ordering for an element with n vertices and order k:

* ``0 .. n-1``                 vertex values (D1)
* ``n + e*(k-1) + j``          value at the j-th interior Gauss-Lobatto node of
                                edge e (from vertex e to vertex e+1)     (D2)
* ``n*k + b``                  scaled moment (1/|P|) int v m_b, |b| <= k-2  (D3)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from ..geometry import polygon_quadrature
from ..mesh import element_centroid, element_diameter, signed_area
from .basis import ScaledMonomialBasis, dim_pk, monomial_exponents, polygon_monomial_moments
from .quadrature import gauss_legendre, gauss_lobatto

STABILIZATIONS = ("d-recipe", "dofi-dofi", "trace")


class ElementConditioningError(ArithmeticError):
    def __init__(self, message: str, cond: float):
        super().__init__(message)
        self.cond = cond


def n_local_dofs(n_vertices: int, k: int) -> int:
    return n_vertices * k + k * (k - 1) // 2


@lru_cache(maxsize=None)
def _edge_dof_table(n: int, k: int) -> np.ndarray:
    """(n, k+1) local DOF index of every Gauss-Lobatto node of every edge."""
    tab = np.empty((n, k + 1), dtype=np.int64)
    for e in range(n):
        tab[e, 0] = e
        tab[e, 1:k] = n + e * (k - 1) + np.arange(k - 1)
        tab[e, k] = (e + 1) % n
    tab.setflags(write=False)
    return tab


@lru_cache(maxsize=None)
def _lobatto_edge_stiffness(k: int) -> np.ndarray:
    """int_{-1}^{1} l_i' l_j' for the Lagrange basis on the Gauss-Lobatto nodes."""
    x, _ = gauss_lobatto(k)
    V = np.vander(x, k + 1, increasing=True)
    coef = np.linalg.inv(V)  # column j: monomial coefficients of l_j
    dcoef = coef[1:] * np.arange(1, k + 1)[:, None]
    tq, wq = gauss_legendre(k + 1)
    dl = np.vander(tq, k, increasing=True) @ dcoef  # (nq, k+1)
    return dl.T @ (wq[:, None] * dl)


@dataclass
class VemLocalData:
    """Per-element VEM matrices.

    ``pi_nabla`` and ``pi_zero`` are the (n_k x N_dofs) coefficient matrices
    of the elliptic and L2 projections in the scaled-monomial basis, so the
    projector identities read ``pi_nabla @ D == I``.
    """

    k: int
    vertices: np.ndarray
    area: float
    basis: ScaledMonomialBasis
    D: np.ndarray
    B: np.ndarray
    G: np.ndarray
    H: np.ndarray
    C: np.ndarray
    pi_nabla: np.ndarray
    pi_zero: np.ndarray
    boundary_nodes: np.ndarray
    edge_lengths: np.ndarray = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def ndofs(self) -> int:
        return self.D.shape[0]

    @property
    def n_moments(self) -> int:
        return dim_pk(self.k - 2)

    @cached_property
    def consistency(self) -> np.ndarray:
        """A^P_ij = a^P(Pi phi_i, Pi phi_j)."""
        Gt = self.G.copy()
        Gt[0] = 0.0
        K = self.pi_nabla.T @ Gt @ self.pi_nabla
        return 0.5 * (K + K.T)

    @cached_property
    def pi_nabla_dofs(self) -> np.ndarray:
        """Pi-nabla expressed back in DOF space, D @ pi_nabla."""
        return self.D @ self.pi_nabla

    def stiffness(self, scheme: str = "d-recipe") -> np.ndarray:
        R = np.eye(self.ndofs) - self.pi_nabla_dofs
        S = stabilization(self, scheme)
        K = self.consistency + R.T @ S @ R
        return 0.5 * (K + K.T)

    @cached_property
    def cond_G(self) -> float:
        return float(np.linalg.cond(self.G))

    @cached_property
    def cond_H(self) -> float:
        return float(np.linalg.cond(self.H))

    @property
    def pi_nabla_discrepancy(self) -> float:
        return float(np.abs(self.pi_nabla @ self.D - np.eye(self.D.shape[1])).max())

    @property
    def pi_zero_discrepancy(self) -> float:
        return float(np.abs(self.pi_zero @ self.D - np.eye(self.D.shape[1])).max())


def build_local(P, k: int, max_cond: float | None = 1e30) -> VemLocalData:
    """Assemble D, B, G, H and both projectors for polygon P (CCW) and order k."""
    if k < 1:
        raise ValueError("order k must be >= 1")
    P = np.asarray(P, dtype=float)
    n = len(P)
    area = signed_area(P)
    basis = ScaledMonomialBasis(element_centroid(P), element_diameter(P), k)
    h = basis.h
    exps = monomial_exponents(k)
    nk = len(exps)
    nm = dim_pk(k - 2)
    nb = n * k
    N = nb + nm

    # Gauss-Lobatto nodes along every edge
    x_gl, w_gl = gauss_lobatto(k)
    s = (x_gl + 1.0) / 2.0
    Q = np.roll(P, -1, axis=0)
    d = Q - P
    L = np.hypot(d[:, 0], d[:, 1])
    normals = np.stack([d[:, 1], -d[:, 0]], axis=1) / L[:, None]
    pts = P[:, None, :] + s[None, :, None] * d[:, None, :]  # (n, k+1, 2)
    table = _edge_dof_table(n, k)

    boundary_nodes = np.empty((nb, 2))
    boundary_nodes[:n] = P
    if k > 1:
        boundary_nodes[n:] = pts[:, 1:k, :].reshape(-1, 2)

    H = polygon_monomial_moments(P, k, basis)

    D = np.empty((N, nk))
    D[:nb] = basis.values(boundary_nodes)
    if nm:
        D[nb:] = H[:nm] / area

    # B = int grad m_a . grad phi_i, via integration by parts
    B = np.zeros((nk, N))
    grads = basis.gradients(pts.reshape(-1, 2)).reshape(n, k + 1, nk, 2)
    gn = (grads * normals[:, None, None, :]).sum(-1)  # (n, k+1, nk)
    wts = (w_gl[None, :] * L[:, None] / 2.0)  # (n, k+1)
    contrib = (gn * wts[..., None]).reshape(-1, nk)
    np.add.at(B.T, table.ravel(), contrib)
    if nm:
        index = {e: i for i, e in enumerate(exps)}
        for r, (a, b) in enumerate(exps):
            if a >= 2:
                B[r, nb + index[(a - 2, b)]] -= a * (a - 1) * area / h**2
            if b >= 2:
                B[r, nb + index[(a, b - 2)]] -= b * (b - 1) * area / h**2
    # constant part fixed by the boundary mean of the projection
    B[0] = 0.0
    np.add.at(B[0], table.ravel(), (wts / L.sum()).ravel())

    G = B @ D
    try:
        pi_nabla = np.linalg.solve(G, B)
    except np.linalg.LinAlgError as exc:
        raise ElementConditioningError(f"singular G matrix: {exc}", float("inf")) from None
    if max_cond is not None or not np.all(np.isfinite(pi_nabla)):
        cg = float(np.linalg.cond(G))
        if not np.isfinite(cg) or (max_cond is not None and cg > max_cond) or not np.all(np.isfinite(pi_nabla)):
            raise ElementConditioningError(f"G is ill conditioned (cond = {cg:.3e})", cg)

    # L2 projection: low moments from D3, degrees k-1 and k from Pi-nabla
    C = H @ pi_nabla
    if nm:
        C[:nm] = 0.0
        C[np.arange(nm), nb + np.arange(nm)] = area
    pi_zero = np.linalg.solve(H, C)

    data = VemLocalData(
        k=k, vertices=P, area=area, basis=basis, D=D, B=B, G=G, H=H, C=C,
        pi_nabla=pi_nabla, pi_zero=pi_zero, boundary_nodes=boundary_nodes, edge_lengths=L,
    )
    return data


def stabilization(data: VemLocalData, scheme: str = "d-recipe") -> np.ndarray:
    """Stabilisation matrix S; the stiffness applies it to (I - Pi) images."""
    N = data.ndofs
    if scheme == "dofi-dofi":
        return np.eye(N)
    if scheme == "d-recipe":
        diag = np.diag(data.consistency).copy()
        floor = max(np.trace(data.consistency) / N * 1e-10, np.finfo(float).tiny)
        return np.diag(np.maximum(diag, floor))
    if scheme == "trace":
        k, n = data.k, data.n_vertices
        S = np.zeros((N, N))
        Kref = _lobatto_edge_stiffness(k)
        table = _edge_dof_table(n, k)
        h = data.basis.h
        for e in range(n):
            ix = table[e]
            S[np.ix_(ix, ix)] += (2.0 * h / data.edge_lengths[e]) * Kref
        nm = data.n_moments
        if nm:
            # the boundary form does not see the interior moments
            S[n * k:, n * k:] += np.eye(nm)
        return S
    raise ValueError(f"unknown stabilization {scheme!r}; choose from {STABILIZATIONS}")


def local_load(data: VemLocalData, f, quad_order: int | None = None) -> np.ndarray:
    """(f, Pi0 phi_i)_P for every local basis function."""
    order = 2 * data.k + 2 if quad_order is None else quad_order
    pts, w = polygon_quadrature(data.vertices, order)
    fv = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float)
    if fv.ndim == 0:
        fv = np.full(len(w), float(fv))
    b = data.basis.values(pts).T @ (w * fv)
    return data.pi_zero.T @ b


def local_interpolant(data: VemLocalData, u, quad_order: int | None = None) -> np.ndarray:
    """DOF values of u: point values at vertices/Lobatto nodes, scaled moments."""
    nb = len(data.boundary_nodes)
    out = np.empty(data.ndofs)
    bn = data.boundary_nodes
    out[:nb] = u(bn[:, 0], bn[:, 1])
    if data.n_moments:
        order = 2 * data.k + 2 if quad_order is None else quad_order
        pts, w = polygon_quadrature(data.vertices, order)
        uv = u(pts[:, 0], pts[:, 1])
        m = data.basis.values(pts)[:, : data.n_moments]
        out[nb:] = m.T @ (w * uv) / data.area
    return out
