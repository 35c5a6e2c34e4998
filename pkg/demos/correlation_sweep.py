"""Which polygon metric predicts the error constant?

Runs the k=1 solver over part of the parametric polygon family and ranks
every (metric, aggregation) pair by its Spearman correlation with the error
constant P6 = P1 / h_av.

    python3 demos/correlation_sweep.py
"""
import numpy as np

from polyvem.datasets import CLASSES, T_VALUES, gen_parametric
from polyvem.metrics import aggregate_all, mesh_metrics
from polyvem.perf import evaluate
from polyvem.stats import correlation_study

classes = CLASSES[:4]
runs = []
for cls in classes:
    for t in T_VALUES[::2]:
        mesh = gen_parametric(cls, t)
        runs.append((aggregate_all(mesh_metrics(mesh)), evaluate(mesh, 1, "test1", conditioning=False)))

cm = correlation_study(runs)
col = cm.columns.index("P6")
vals = cm.values[:, col]
# cells are undefined (NaN) for metrics that never vary across the sweep
defined = np.flatnonzero(~np.isnan(vals))
order = defined[np.argsort(-np.abs(vals[defined]))]
print(f"{len(runs)} meshes from classes {', '.join(classes)}")
print("strongest predictors of P6:")
for i in order[:6]:
    metric, agg = cm.rows[i]
    print(f"  {agg:>7s} {metric.upper():4s} {vals[i]:+.3f}")
print("weakest:")
for i in order[::-1][:3]:
    metric, agg = cm.rows[i]
    print(f"  {agg:>7s} {metric.upper():4s} {vals[i]:+.3f}")
