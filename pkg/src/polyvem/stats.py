"""Spearman rank correlation between mesh metrics and performance indexes."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HIGH = 0.9
LOW = 0.03


class UndefinedCorrelationError(ValueError):
    pass


def average_ranks(x) -> np.ndarray:
    """1-based ranks with ties sharing the mean of their positions."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and xs[j + 1] == xs[i]:
            j += 1
        ranks[order[i: j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D vectors of equal length")
    if len(x) < 3:
        raise ValueError("need at least 3 observations")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise UndefinedCorrelationError("non-finite observations")
    rx, ry = average_ranks(x), average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    den = np.sqrt((rx @ rx) * (ry @ ry))
    if den == 0:
        raise UndefinedCorrelationError("correlation undefined for a constant vector")
    return float(np.clip((rx @ ry) / den, -1.0, 1.0))


@dataclass
class CorrelationMatrix:
    rows: list  # (metric, aggregation) labels
    columns: list  # performance index labels
    values: np.ndarray  # NaN where undefined

    @property
    def high(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.abs(self.values) > HIGH

    @property
    def low(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.abs(self.values) < LOW

    def get(self, row, column) -> float:
        return float(self.values[self.rows.index(row), self.columns.index(column)])

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["metric", "aggregation", *self.columns])
            for label, vals in zip(self.rows, self.values):
                w.writerow([*label, *("" if np.isnan(v) else f"{v:.6f}" for v in vals)])


def _as_mapping(obj) -> dict:
    if isinstance(obj, dict):
        return obj
    if hasattr(obj, "indexes"):
        return obj.indexes
    # iterable of MeshMetric records
    return {(m.metric, m.aggregation): m.value for m in obj}


def correlation_study(runs, min_runs: int = 10) -> CorrelationMatrix:
    """Spearman matrix of every metric/aggregation pair against every index.

    ``runs`` is a sequence of (metrics, performance) pairs; metrics is a
    mapping (metric, aggregation) -> value or a list of MeshMetric records,
    performance a mapping label -> value or a SolveReport.
    """
    runs = list(runs)
    if len(runs) < min_runs:
        raise ValueError(f"need at least {min_runs} runs, got {len(runs)}")
    mets = [_as_mapping(m) for m, _ in runs]
    perfs = [_as_mapping(p) for _, p in runs]
    rows = list(mets[0].keys())
    cols = list(perfs[0].keys())
    M = np.array([[m[r] for r in rows] for m in mets], dtype=float)
    P = np.array([[p[c] for c in cols] for p in perfs], dtype=float)
    out = np.full((len(rows), len(cols)), np.nan)
    for i in range(len(rows)):
        for j in range(len(cols)):
            try:
                out[i, j] = spearman(M[:, i], P[:, j])
            except UndefinedCorrelationError:
                pass
    if np.isnan(out).all():
        raise UndefinedCorrelationError("every column is constant; no correlation is defined")
    return CorrelationMatrix(rows, cols, out)
