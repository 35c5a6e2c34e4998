"""Error indexes, conditioning diagnostics and solve reports."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ._sparse import FactorizationError, IC0Factor, cond1_estimate, ic0, norm1_estimate
from .geometry import polygon_quadrature
from .mesh import Mesh
from .vem.local import VemLocalData
from .vem.solver import Assembly, Problem, SolverConfig, assemble_and_solve, interpolate

__all__ = [
    "SolveReport", "ElementDiagnostics", "UndefinedIndexError", "FactorizationError",
    "ground_truth", "perf1_energy", "perf2_linf", "perf3_l2", "cond1_estimate",
    "ic0_precondition", "preconditioned_cond1", "element_diagnostics", "evaluate",
]


class UndefinedIndexError(ZeroDivisionError):
    pass


# ground truths ---------------------------------------------------------------

def _u1(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y) / (2 * np.pi**2)


def _f1(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def _franke_terms(x, y):
    """(coefficient * exp(-q), grad q, laplacian q) for the four bumps."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    X1, Y1 = 9 * x - 2, 9 * y - 2
    X2 = 9 * x + 1
    X3, Y3 = 9 * x - 7, 9 * y - 3
    X4, Y4 = 9 * x - 4, 9 * y - 7
    one = np.ones_like(x)
    return [
        (0.75 * np.exp(-(X1**2 + Y1**2) / 4), (4.5 * X1, 4.5 * Y1), 81.0),
        (0.75 * np.exp(-(X2**2 / 49 + (9 * y + 1) / 10)), (18 * X2 / 49, 0.9 * one), 162.0 / 49),
        (0.5 * np.exp(-(X3**2 + Y3**2) / 4), (4.5 * X3, 4.5 * Y3), 81.0),
        (0.2 * np.exp(-(X4**2 + Y4**2)), (18 * X4, 18 * Y4), 324.0),
    ]


def franke(x, y):
    return sum(t[0] for t in _franke_terms(x, y))


def franke_source(x, y):
    """-Laplace of the Franke function: -c e^{-q} (|grad q|^2 - Laplace q) summed."""
    return sum(-e * (gx**2 + gy**2 - lap) for e, (gx, gy), lap in _franke_terms(x, y))


def ground_truth(test_id: str) -> Problem:
    """Manufactured problem ``test1`` (sine bump) or ``test2`` (Franke function)."""
    if test_id == "test1":
        return Problem(f=_f1, u=_u1, name="test1")
    if test_id == "test2":
        return Problem(f=franke_source, u=franke, name="test2")
    raise ValueError(f"unknown test {test_id!r}; expected test1 or test2")


# error indexes ---------------------------------------------------------------

def perf1_energy(assembly: Assembly, uh, uI) -> float:
    den = assembly.energy(uI)
    if den <= 0:
        raise UndefinedIndexError("a_h(u_I, u_I) vanishes")
    e = np.asarray(uh) - np.asarray(uI)
    return math.sqrt(max(assembly.energy(e), 0.0) / den)


def perf2_linf(uh, u_dofs) -> float:
    den = np.abs(u_dofs).max()
    if den == 0:
        raise UndefinedIndexError("all DOFs of u vanish")
    return float(np.abs(np.asarray(uh) - u_dofs).max() / den)


def l2_projection(data: VemLocalData, u) -> np.ndarray:
    """Monomial coefficients of the L2 projection of u onto P_k(P)."""
    pts, w = polygon_quadrature(data.vertices, 2 * data.k + 2)
    m = data.basis.values(pts)
    return np.linalg.solve(data.H, m.T @ (w * u(pts[:, 0], pts[:, 1])))


def perf3_l2(assembly: Assembly, uh, u) -> float:
    """||Pi0 u_h - Pi0 u|| / ||Pi0 u|| with element mass matrices."""
    num = den = 0.0
    for loc, d in zip(assembly.dofmap.element_dofs, assembly.local):
        cu = l2_projection(d, u)
        diff = d.pi_zero @ uh[loc] - cu
        num += diff @ d.H @ diff
        den += cu @ d.H @ cu
    if den <= 0:
        raise UndefinedIndexError("the projection of u vanishes")
    return math.sqrt(max(num, 0.0) / den)


# conditioning ----------------------------------------------------------------

def ic0_precondition(A) -> IC0Factor:
    return ic0(A)


def preconditioned_cond1(A, factor: IC0Factor | None = None) -> float:
    """Estimated cond_1 of L^{-1} A L^{-T} for the IC(0) factor L."""
    A = sp.csr_matrix(A, dtype=float)
    n = A.shape[0]
    factor = factor or ic0(A)
    lu = splu(A.tocsc())

    def fwd(v):  # L^{-1} A L^{-T} v
        return factor.solve_lower(A @ factor.solve_upper(v))

    def inv(v):  # L^T A^{-1} L v
        return factor.L.T @ lu.solve(factor.L @ v)

    return norm1_estimate(fwd, fwd, n) * norm1_estimate(inv, inv, n)


class ElementDiagnostics(NamedTuple):
    max_cond_G: float
    max_cond_H: float
    max_pi_nabla_discrepancy: float
    max_pi0_discrepancy: float


def element_diagnostics(mesh: Mesh | None, k: int, local: list | None = None) -> ElementDiagnostics:
    from .vem.solver import build_all_local

    local = build_all_local(mesh, k) if local is None else local
    return ElementDiagnostics(
        max(d.cond_G for d in local),
        max(d.cond_H for d in local),
        max(d.pi_nabla_discrepancy for d in local),
        max(d.pi_zero_discrepancy for d in local),
    )


# reports ---------------------------------------------------------------------

@dataclass
class SolveReport:
    dataset: str
    level: int
    k: int
    scheme: str
    dof_count: int
    h_max: float
    h_av: float
    rel_h1_energy: float
    rel_linf_dofs: float
    rel_l2: float
    cond1_stiffness: float
    cond1_preconditioned: float
    err_const: float
    aubin_nitsche: float
    precond_effectiveness: float
    max_cond_G: float
    max_cond_H: float
    max_pi_nabla_discrepancy: float
    max_pi0_discrepancy: float
    ic0_shifts: int = 0

    @property
    def indexes(self) -> dict:
        vals = (
            self.rel_h1_energy, self.rel_linf_dofs, self.rel_l2, self.cond1_stiffness,
            self.cond1_preconditioned, self.err_const, self.aubin_nitsche, self.precond_effectiveness,
        )
        return {f"P{i}": v for i, v in enumerate(vals, 1)}

    CSV_HEADER = (
        "dataset", "level", "k", "scheme", "dofs", "h_max", "h_av",
        "P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8",
        "log10_condG", "log10_condH", "log10_piN_disc", "log10_pi0_disc",
    )

    def csv_row(self) -> list:
        def lg(v):
            return math.log10(v) if v > 0 else float("-inf")

        return [
            self.dataset, self.level, self.k, self.scheme, self.dof_count,
            repr(self.h_max), repr(self.h_av),
            *(repr(float(v)) for v in self.indexes.values()),
            *(f"{lg(v):.6f}" for v in (
                self.max_cond_G, self.max_cond_H,
                self.max_pi_nabla_discrepancy, self.max_pi0_discrepancy,
            )),
        ]

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


def evaluate(
    mesh: Mesh,
    k: int,
    problem: Problem | str = "test1",
    scheme: str = "d-recipe",
    dataset: str = "",
    conditioning: bool = True,
    solver: str = "auto",
    cg_tol: float = 1e-12,
) -> SolveReport:
    """Solve on ``mesh`` and compute every index against the exact solution."""
    if isinstance(problem, str):
        problem = ground_truth(problem)
    if problem.u is None:
        raise ValueError("the problem needs an exact solution to evaluate errors")
    sol = assemble_and_solve(mesh, problem, SolverConfig(k=k, stabilization=scheme, solver=solver, cg_tol=cg_tol))
    asm = sol.assembly
    uI = interpolate(problem.u, mesh, k, asm.local, asm.dofmap)
    p1 = perf1_energy(asm, sol.uh, uI)
    p2 = perf2_linf(sol.uh, uI)
    p3 = perf3_l2(asm, sol.uh, problem.u)
    diam = mesh.diameters()
    h_av = float(diam.mean())
    p4 = p5 = float("nan")
    shifts = 0
    if conditioning:
        A = asm.reduced_matrix()
        p4 = cond1_estimate(A)
        fac = ic0(A)
        shifts = fac.retries
        p5 = preconditioned_cond1(A, fac)
    diag = element_diagnostics(mesh, k, asm.local)
    return SolveReport(
        dataset=dataset, level=mesh.level, k=k, scheme=scheme, dof_count=asm.ndofs,
        h_max=float(diam.max()), h_av=h_av,
        rel_h1_energy=p1, rel_linf_dofs=p2, rel_l2=p3,
        cond1_stiffness=p4, cond1_preconditioned=p5,
        err_const=p1 / h_av**k,
        aubin_nitsche=p2 / (h_av * p1) if p1 > 0 else float("inf"),
        precond_effectiveness=p5 / p4,
        max_cond_G=diag.max_cond_G, max_cond_H=diag.max_cond_H,
        max_pi_nabla_discrepancy=diag.max_pi_nabla_discrepancy,
        max_pi0_discrepancy=diag.max_pi0_discrepancy,
        ic0_shifts=shifts,
    )
