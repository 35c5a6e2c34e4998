"""Tour of the refinement datasets through geometry alone.

For each dataset we build a few levels, then print the worst-case value of
some polygon metrics next to the quality indicator. Nothing is solved here:
the indicator only needs the mesh.

    python3 demos/mesh_quality_tour.py
"""
from polyvem.datasets import BASE_IDS, generate, scaling_indicators
from polyvem.indicator import quality_report
from polyvem.metrics import aggregate_all, mesh_metrics
from polyvem.report import markdown_table

LEVELS = (0, 1, 2)

rows = []
for name in BASE_IDS:
    for n in LEVELS:
        mesh = generate(name, n)
        agg = {(m.metric, m.aggregation): m.value for m in aggregate_all(mesh_metrics(mesh))}
        ind = scaling_indicators(mesh)
        rep = quality_report(mesh)
        rows.append([
            name, n, mesh.n_elements,
            f"{agg[('kar', 'min')]:.3f}", f"{agg[('er', 'min')]:.2e}", int(agg[("ns", "max")]),
            f"{ind.A_n:.1f}", f"{ind.e_n:.1f}", f"{rep.rho:.3f}",
        ])

print(markdown_table(
    ["dataset", "level", "elements", "min KAR", "min ER", "max NS", "A_n", "e_n", "rho"], rows))

# Triangles stay put as the mesh refines; the mirrored datasets drift down
# because their shortest edges shrink faster than the elements do.
