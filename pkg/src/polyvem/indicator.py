"""Geometry-only mesh quality indicator built from four per-element scores."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mesh import EmptyMeshError, Mesh, element_diameter, signed_area
from .metrics import kernel_area

COLLINEAR_TOL = 1e-9


def rho1(P) -> float:
    """Kernel area over polygon area."""
    P = np.asarray(P, dtype=float)
    return min(kernel_area(P) / signed_area(P), 1.0)


def rho2(P) -> float:
    P = np.asarray(P, dtype=float)
    root = math.sqrt(signed_area(P))
    emin = float(np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1).min())
    return min(root, emin) / max(root, element_diameter(P))


def rho3(P) -> float:
    return 3.0 / len(P)


def collinear_runs(P, tol: float = COLLINEAR_TOL) -> list:
    """Group boundary edges into maximal runs of consecutive collinear edges.

    Returns a list of arrays of edge lengths, one per run.
    """
    P = np.asarray(P, dtype=float)
    d = np.roll(P, -1, axis=0) - P
    L = np.linalg.norm(d, axis=1)
    nxt = np.roll(d, -1, axis=0)
    cross = d[:, 0] * nxt[:, 1] - d[:, 1] * nxt[:, 0]
    dot = (d * nxt).sum(1)
    # same[i]: edge i continues straight into edge i+1
    same = (np.abs(cross) <= tol * L * np.roll(L, -1)) & (dot > 0)
    n = len(P)
    if same.all():
        return [L]
    start = (int(np.flatnonzero(~same)[0]) + 1) % n
    runs, cur = [], []
    for s in range(n):
        i = (start + s) % n
        cur.append(L[i])
        if not same[i]:
            runs.append(np.array(cur))
            cur = []
    if cur:
        runs.append(np.array(cur))
    return runs


def rho4(P) -> float:
    """Worst min/max edge-length ratio over the collinear sub-meshes of the boundary."""
    return float(min(r.min() / r.max() for r in collinear_runs(P)))


def element_scores(P) -> tuple:
    return rho1(P), rho2(P), rho3(P), rho4(P)


@dataclass
class QualityReport:
    scores: np.ndarray  # (n_elements, 4)
    rho: float
    level: int = 0

    @property
    def means(self) -> np.ndarray:
        return self.scores.mean(axis=0)


def combine(scores) -> float:
    s = np.asarray(scores, dtype=float).reshape(-1, 4)
    if len(s) == 0:
        raise EmptyMeshError("mesh has no elements")
    r1 = s[:, 0]
    per = r1 * (s[:, 1] + s[:, 2] + s[:, 3]) / 3.0
    return float(math.sqrt(per.mean()))


def quality_report(mesh: Mesh) -> QualityReport:
    if mesh.n_elements == 0:
        raise EmptyMeshError("mesh has no elements")
    scores = np.array([element_scores(P) for P in mesh.polygons()])
    return QualityReport(scores, combine(scores), mesh.level)


def rho_mesh(mesh: Mesh) -> float:
    return quality_report(mesh).rho


INDICATOR_HEADER = ("dataset", "level", "rho1_mean", "rho2_mean", "rho3_mean", "rho4_mean", "rho")


def indicator_row(dataset: str, report: QualityReport) -> list:
    return [dataset, report.level, *(repr(float(v)) for v in report.means), repr(report.rho)]


def write_indicator_csv(path, rows) -> None:
    """``rows`` are (dataset, QualityReport) pairs."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(INDICATOR_HEADER)
        for name, rep in rows:
            w.writerow(indicator_row(name, rep))
