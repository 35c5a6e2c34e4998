"""Global assembly, Dirichlet lifting and the linear solve."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu

from .._sparse import ic0
from ..mesh import Mesh
from .dofs import DofMap
from .local import STABILIZATIONS, build_local, local_interpolant, local_load

DIRECT_LIMIT = 20_000


class SolverError(RuntimeError):
    def __init__(self, message: str, residuals=()):
        super().__init__(message)
        self.residuals = list(residuals)


@dataclass
class SolverConfig:
    k: int = 1
    stabilization: str = "d-recipe"
    solver: str = "auto"  # auto | direct | cg
    cg_tol: float = 1e-12

    def __post_init__(self):
        self.k = int(self.k)
        self.cg_tol = float(self.cg_tol)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.stabilization not in STABILIZATIONS:
            raise ValueError(f"stabilization must be one of {STABILIZATIONS}")
        if self.solver not in ("auto", "direct", "cg"):
            raise ValueError("solver must be auto, direct or cg")

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "SolverConfig":
        known = {f.name for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in known:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            values[key] = val
        return cls(**values)

    @classmethod
    def load(cls, path) -> "SolverConfig":
        return cls.from_text(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


@dataclass
class Problem:
    """-Laplace(u) = f in the unit square, u = g on the boundary (g defaults to u)."""

    f: Callable
    u: Callable | None = None
    g: Callable | None = None
    name: str = "custom"

    @property
    def boundary(self) -> Callable:
        if self.g is not None:
            return self.g
        if self.u is not None:
            return self.u
        return lambda x, y: np.zeros_like(np.asarray(x, dtype=float))


@dataclass
class Assembly:
    mesh: Mesh
    k: int
    stabilization: str
    dofmap: DofMap
    local: list
    K: sp.csr_matrix

    @property
    def ndofs(self) -> int:
        return self.dofmap.ndofs

    def energy(self, v) -> float:
        """a_h(v, v) with the assembled stiffness."""
        return float(v @ (self.K @ v))

    def reduced_matrix(self) -> sp.csr_matrix:
        I = self.dofmap.interior
        return self.K[I][:, I].tocsr()


@dataclass
class Solution:
    assembly: Assembly
    uh: np.ndarray
    load: np.ndarray
    method: str
    iterations: int = 0
    residuals: list = field(default_factory=list)


def build_all_local(mesh: Mesh, k: int) -> list:
    return [build_local(P, k) for P in mesh.polygons()]


def _scatter(dofmap: DofMap, blocks) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for loc, Ke in zip(dofmap.element_dofs, blocks):
        n = len(loc)
        rows.append(np.repeat(loc, n))
        cols.append(np.tile(loc, n))
        vals.append(Ke.ravel())
    N = dofmap.ndofs
    K = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N)
    ).tocsr()
    K.sum_duplicates()
    return K


def assemble(mesh: Mesh, k: int, stabilization: str = "d-recipe", local: list | None = None) -> Assembly:
    dofmap = DofMap.build(mesh, k)
    local = build_all_local(mesh, k) if local is None else local
    K = _scatter(dofmap, (d.stiffness(stabilization) for d in local))
    K = (K + K.T) * 0.5
    return Assembly(mesh, k, stabilization, dofmap, local, K.tocsr())


def assemble_load(assembly: Assembly, f) -> np.ndarray:
    F = np.zeros(assembly.ndofs)
    for loc, d in zip(assembly.dofmap.element_dofs, assembly.local):
        np.add.at(F, loc, local_load(d, f))
    return F


def interpolate(u, mesh: Mesh, k: int, local: list | None = None, dofmap: DofMap | None = None) -> np.ndarray:
    """Global DOF vector of the virtual interpolant of u."""
    dofmap = dofmap or DofMap.build(mesh, k)
    local = build_all_local(mesh, k) if local is None else local
    out = np.empty(dofmap.ndofs)
    for loc, d in zip(dofmap.element_dofs, local):
        out[loc] = local_interpolant(d, u)
    return out


def _boundary_values(assembly: Assembly, g) -> np.ndarray:
    """Exact DOF values of g on boundary vertices and boundary edge nodes."""
    out = np.zeros(assembly.ndofs)
    bmask = assembly.dofmap.boundary
    for loc, d in zip(assembly.dofmap.element_dofs, assembly.local):
        nb = len(d.boundary_nodes)
        sel = bmask[loc[:nb]]
        if sel.any():
            pts = d.boundary_nodes[sel]
            out[loc[:nb][sel]] = g(pts[:, 0], pts[:, 1])
    return out


def solve_linear(A: sp.csr_matrix, b: np.ndarray, method: str = "auto", tol: float = 1e-12):
    n = A.shape[0]
    if n == 0:
        return np.zeros(0), "direct", 0, []
    if method == "direct" or (method == "auto" and n <= DIRECT_LIMIT):
        try:
            x = splu(A.tocsc()).solve(b)
        except RuntimeError as exc:
            raise SolverError(f"sparse factorization failed: {exc}") from None
        if not np.all(np.isfinite(x)):
            raise SolverError("direct solve produced non-finite values")
        return x, "direct", 0, []
    M = ic0(A).as_preconditioner()
    bnorm = np.linalg.norm(b) or 1.0
    history = []

    def track(xk):
        history.append(float(np.linalg.norm(b - A @ xk) / bnorm))

    x, info = cg(A, b, rtol=tol, atol=0.0, maxiter=10 * n, M=M, callback=track)
    if info != 0:
        raise SolverError(f"CG did not converge in {10 * n} iterations", history)
    # scipy stops silently on breakdown; trust only the true residual
    final = float(np.linalg.norm(b - A @ x) / bnorm)
    if final > 100 * tol:
        raise SolverError(f"CG stalled at relative residual {final:.3e}", history + [final])
    return x, "cg", len(history), history


def assemble_and_solve(mesh: Mesh, problem: Problem, config: SolverConfig | None = None, **overrides) -> Solution:
    config = config or SolverConfig(**overrides)
    assembly = assemble(mesh, config.k, config.stabilization)
    F = assemble_load(assembly, problem.f)
    g = _boundary_values(assembly, problem.boundary)
    I = assembly.dofmap.interior
    rhs = F - assembly.K @ g
    A = assembly.reduced_matrix()
    xI, method, its, hist = solve_linear(A, rhs[I], config.solver, config.cg_tol)
    uh = g.copy()
    uh[I] = xI
    return Solution(assembly, uh, F, method, its, hist)
