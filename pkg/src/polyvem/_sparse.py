"""Zero-fill incomplete Cholesky, triangular solves and the 1-norm estimator."""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, splu


class FactorizationError(ArithmeticError):
    pass


@numba.njit(cache=True)
def _ic0_kernel(indptr, indices, data, n):
    # in-place on a lower-triangular CSR copy with sorted columns (diagonal last)
    for i in range(n):
        r0, r1 = indptr[i], indptr[i + 1]
        for p in range(r0, r1):
            j = indices[p]
            s = data[p]
            # dot of row i and row j over shared columns < j
            a, b = r0, indptr[j]
            be = indptr[j + 1] - 1
            while a < p and b < be:
                ca, cb = indices[a], indices[b]
                if ca == cb:
                    s -= data[a] * data[b]
                    a += 1
                    b += 1
                elif ca < cb:
                    a += 1
                else:
                    b += 1
            if j < i:
                data[p] = s / data[indptr[j + 1] - 1]
            else:
                if s <= 0.0:
                    return i
                data[p] = np.sqrt(s)
    return -1


@numba.njit(cache=True)
def _lower_solve(indptr, indices, data, y):
    n = len(y)
    x = y.copy()
    for i in range(n):
        s = x[i]
        r1 = indptr[i + 1] - 1
        for p in range(indptr[i], r1):
            s -= data[p] * x[indices[p]]
        x[i] = s / data[r1]
    return x


@numba.njit(cache=True)
def _upper_solve(indptr, indices, data, y):
    # solves L^T x = y using the rows of L
    n = len(y)
    x = y.copy()
    for i in range(n - 1, -1, -1):
        r1 = indptr[i + 1] - 1
        x[i] /= data[r1]
        xi = x[i]
        for p in range(indptr[i], r1):
            x[indices[p]] -= data[p] * xi
    return x


@dataclass
class IC0Factor:
    """A + shift*I ~= L L^T with the sparsity of tril(A)."""

    L: sp.csr_matrix
    shift: float
    retries: int

    def solve_lower(self, y):
        L = self.L
        return _lower_solve(L.indptr, L.indices, L.data, np.ascontiguousarray(y, dtype=float))

    def solve_upper(self, y):
        L = self.L
        return _upper_solve(L.indptr, L.indices, L.data, np.ascontiguousarray(y, dtype=float))

    def solve(self, y):
        return self.solve_upper(self.solve_lower(y))

    def as_preconditioner(self) -> LinearOperator:
        n = self.L.shape[0]
        return LinearOperator((n, n), matvec=self.solve, dtype=float)


def ic0(A, alpha0: float = 1e-3, max_retries: int = 40) -> IC0Factor:
    """Incomplete Cholesky with zero fill; negative pivots trigger a diagonal shift.

    The shift is alpha*trace(A)/n with alpha starting at ``alpha0`` and doubling.
    """
    A = sp.csr_matrix(A, dtype=float)
    n = A.shape[0]
    base = sp.tril(A, format="lil")
    base.setdiag(A.diagonal())  # stores the diagonal even where it is zero
    base = base.tocsr()
    base.sort_indices()
    scale = abs(A.diagonal()).sum() / max(n, 1) or 1.0
    shift, alpha = 0.0, alpha0
    for attempt in range(max_retries + 1):
        M = base if shift == 0.0 else (base + shift * sp.eye(n, format="csr")).tocsr()
        M.sort_indices()
        L = M.copy()
        L.data = L.data.astype(float).copy()
        last = L.indices[L.indptr[1:] - 1]
        if np.any(last != np.arange(n)):
            raise FactorizationError("diagonal entry missing from the pattern")
        bad = _ic0_kernel(L.indptr, L.indices, L.data, n)
        if bad < 0:
            return IC0Factor(L, shift, attempt)
        shift = alpha * scale
        alpha *= 2.0
    raise FactorizationError(f"IC(0) broke down after {max_retries} shifts (pivot {bad})")


def norm1_estimate(matvec, rmatvec, n: int, itmax: int = 5) -> float:
    """Lower bound on ||M||_1 from the Hager/Higham iteration.

    Only products with M and M^T are needed. The result includes Higham's
    alternating-sign test vector, so it never exceeds the true norm.
    """
    if n == 1:
        return float(abs(matvec(np.ones(1))[0]))
    x = np.full(n, 1.0 / n)
    y = matvec(x)
    est = np.abs(y).sum()
    xi = np.sign(y)
    xi[xi == 0] = 1.0
    j_old = -1
    for it in range(itmax):
        z = rmatvec(xi)
        j = int(np.argmax(np.abs(z)))
        if j == j_old or (it > 0 and np.abs(z).max() <= z @ x):
            break
        x = np.zeros(n)
        x[j] = 1.0
        y = matvec(x)
        new = np.abs(y).sum()
        s = np.sign(y)
        s[s == 0] = 1.0
        if new <= est or np.array_equal(s, xi):
            est = max(est, new)
            break
        est, xi, j_old = new, s, j
    alt = (1.0 + np.arange(n) / max(n - 1, 1)) * (-1.0) ** np.arange(n)
    alt_est = 2.0 * np.abs(matvec(alt)).sum() / (3.0 * n)
    return float(max(est, alt_est))


def cond1_estimate(A) -> float:
    """||A||_1 (exact) times an estimate of ||A^{-1}||_1; a lower bound on cond_1(A)."""
    A = sp.csc_matrix(A, dtype=float)
    n = A.shape[0]
    try:
        lu = splu(A)
    except RuntimeError as exc:
        raise FactorizationError(f"LU factorization failed: {exc}") from None
    inv_norm = norm1_estimate(lu.solve, lambda v: lu.solve(v, trans="T"), n)
    a_norm = float(abs(A).sum(axis=0).max())
    return a_norm * inv_norm
