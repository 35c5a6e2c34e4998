"""Fourteen polygon quality metrics and their mesh-level aggregations."""
from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from .geometry import chebyshev_center, max_inscribed_circle, min_enclosing_circle, polygon_kernel
from .mesh import Mesh, edge_lengths, signed_area

METRICS = ("cc", "ic", "cr", "ar", "ke", "kar", "apr", "se", "er", "mpd", "ma", "mxa", "ns", "sr")
AGGREGATIONS = ("average", "l2", "max", "min", "worst")

# direction in which each metric gets worse
WORST_MIN = frozenset({"ic", "cr", "ar", "ke", "kar", "apr", "se", "er", "mpd", "ma", "sr"})
WORST_MAX = frozenset({"cc", "mxa", "ns"})


@dataclass(frozen=True)
class PolygonMetrics:
    cc: float
    ic: float
    cr: float
    ar: float
    ke: float
    kar: float
    apr: float
    se: float
    er: float
    mpd: float
    ma: float
    mxa: float
    ns: int
    sr: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class MeshMetric:
    metric: str
    aggregation: str
    value: float


def interior_angles(P) -> np.ndarray:
    """Interior angles of a CCW polygon; reflex angles exceed pi, hanging nodes give pi."""
    P = np.asarray(P, dtype=float)
    d_in = P - np.roll(P, 1, axis=0)
    d_out = np.roll(P, -1, axis=0) - P
    cross = d_in[:, 0] * d_out[:, 1] - d_in[:, 1] * d_out[:, 0]
    dot = (d_in * d_out).sum(1)
    return np.pi - np.arctan2(cross, dot)


def min_vertex_distance(P) -> float:
    P = np.asarray(P, dtype=float)
    D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
    return float(D[np.triu_indices(len(P), 1)].min())


def simple_metrics(P) -> tuple:
    """(AR, APR, SE, ER, MPD, MA, MXA, NS)."""
    P = np.asarray(P, dtype=float)
    area = signed_area(P)
    L = edge_lengths(P)
    ang = interior_angles(P)
    return (
        area,
        2.0 * math.pi * area / L.sum() ** 2,
        float(L.min()),
        float(L.min() / L.max()),
        min_vertex_distance(P),
        float(ang.min()),
        float(ang.max()),
        len(P),
    )


def kernel_area(P) -> float:
    K = polygon_kernel(P)
    return signed_area(K) if len(K) else 0.0


def shape_regularity(P, kernel=None, cc: float | None = None) -> float:
    """Chebyshev radius of the kernel over the circumradius; 0 if not star-shaped."""
    K = polygon_kernel(P) if kernel is None else kernel
    if len(K) < 3:
        return 0.0
    if cc is None:
        cc = min_enclosing_circle(P)[1]
    return chebyshev_center(K)[1] / cc


def polygon_metrics(P) -> PolygonMetrics:
    P = np.asarray(P, dtype=float)
    cc = min_enclosing_circle(P)[1]
    ic = max_inscribed_circle(P)[1]
    K = polygon_kernel(P)
    ke = signed_area(K) if len(K) else 0.0
    ar, apr, se, er, mpd, ma, mxa, ns = simple_metrics(P)
    return PolygonMetrics(
        cc=cc, ic=ic, cr=ic / cc, ar=ar, ke=ke, kar=min(ke / ar, 1.0), apr=apr,
        se=se, er=er, mpd=mpd, ma=ma, mxa=mxa, ns=ns,
        sr=shape_regularity(P, K, cc),
    )


def mesh_metrics(mesh: Mesh) -> list:
    return [polygon_metrics(P) for P in mesh.polygons()]


def metric_table(records) -> dict:
    """Column view: metric name -> per-element array."""
    arr = np.array([astuple(r) for r in records], dtype=float).reshape(-1, len(METRICS))
    return {name: arr[:, i] for i, name in enumerate(METRICS)}


def aggregate(values, strategy: str, metric: str | None = None) -> float:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot aggregate an empty vector")
    if strategy == "average":
        return float(v.mean())
    if strategy == "l2":
        return float(np.sqrt((v**2).sum()))
    if strategy == "max":
        return float(v.max())
    if strategy == "min":
        return float(v.min())
    if strategy == "worst":
        if metric is None:
            raise ValueError("worst aggregation needs the metric name")
        if metric in WORST_MIN:
            return float(v.min())
        if metric in WORST_MAX:
            return float(v.max())
        raise ValueError(f"unknown metric {metric!r}")
    raise ValueError(f"unknown aggregation {strategy!r}; choose from {AGGREGATIONS}")


def aggregate_all(records) -> list:
    table = metric_table(records)
    return [
        MeshMetric(m, s, aggregate(table[m], s, m)) for m in METRICS for s in AGGREGATIONS
    ]


def write_metrics_csv(records, path) -> None:
    """Per-element rows, then one summary row per (metric, aggregation)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "element", *METRICS])
        for i, r in enumerate(records):
            w.writerow(["element", i, *(repr(float(x)) if n != "ns" else x for n, x in r.as_dict().items())])
        w.writerow(["row", "metric", "aggregation", "value"])
        for mm in aggregate_all(records):
            w.writerow(["summary", mm.metric, mm.aggregation, repr(mm.value)])


def read_metrics_summary(path) -> dict:
    """(metric, aggregation) -> value from the summary section of a metrics CSV."""
    out = {}
    with Path(path).open(newline="") as fh:
        for row in csv.reader(fh):
            if row and row[0] == "summary":
                out[(row[1], row[2])] = float(row[3])
    if not out:
        raise ValueError(f"{path}: no summary rows")
    return out
