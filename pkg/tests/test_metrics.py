import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyvem.datasets.generators import maze_polygon, star_polygon
from polyvem.metrics import (
    AGGREGATIONS, METRICS, WORST_MAX, WORST_MIN, aggregate, aggregate_all, interior_angles, mesh_metrics,
    metric_table, polygon_metrics, read_metrics_summary, shape_regularity, simple_metrics, write_metrics_csv,
)

from ._helpers import L_SHAPE, UNIT_SQUARE, grid_mesh, random_simple_polygon, regular_polygon


def test_unit_square_simple_metrics():
    ar, apr, se, er, mpd, ma, mxa, ns = simple_metrics(UNIT_SQUARE)
    assert ar == 1.0
    assert apr == pytest.approx(math.pi / 8)
    assert se == er == mpd == 1.0
    assert ma == pytest.approx(math.pi / 2) and mxa == pytest.approx(math.pi / 2)
    assert ns == 4


def test_l_shape_simple_metrics():
    *_, mxa, ns = simple_metrics(L_SHAPE)
    assert mxa == pytest.approx(3 * math.pi / 2)
    assert ns == 6


def test_kite_min_point_distance_below_shortest_edge():
    eps = 1e-3
    kite = np.array([[0, 0], [1, -eps], [2, 0], [1, eps]])
    _, _, se, _, mpd, *_ = simple_metrics(kite)
    assert mpd == pytest.approx(2 * eps)
    assert se == pytest.approx(math.hypot(1, eps))
    assert mpd < se


def test_hanging_vertex_angle_is_pi():
    P = np.array([[0, 0], [0.5, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert interior_angles(P)[1] == pytest.approx(math.pi)
    assert simple_metrics(P)[6] == pytest.approx(math.pi)


def test_shape_regularity_examples():
    assert shape_regularity(UNIT_SQUARE) == pytest.approx(1 / math.sqrt(2), rel=1e-9)
    assert shape_regularity(maze_polygon(0.2)) == 0.0
    # kernel of L is the unit square (Chebyshev radius 1/2); CC(L) passes through (2,0),(0,2),(0,0)
    assert shape_regularity(L_SHAPE) == pytest.approx(0.5 / math.sqrt(2), rel=1e-9)


def test_l_shape_full_record():
    m = polygon_metrics(L_SHAPE)
    assert m.ke == pytest.approx(1.0)
    assert m.kar == pytest.approx(1 / 3)
    assert m.ic == pytest.approx(2 - math.sqrt(2), abs=1e-6)
    assert m.cc == pytest.approx(math.sqrt(2))


def test_convex_kernel_area_equals_area():
    for n in (3, 5, 8):
        m = polygon_metrics(regular_polygon(n))
        assert m.ke == pytest.approx(m.ar, rel=1e-12)
        assert m.kar == pytest.approx(1.0)


def test_maze_kernel_is_empty():
    m = polygon_metrics(maze_polygon(0.15))
    assert m.ke == 0.0 and m.kar == 0.0 and m.sr == 0.0


def _check_invariants(m):
    assert 0 < m.ic <= m.cc
    assert 0 < m.cr <= 1
    assert 0 <= m.ke <= m.ar * (1 + 1e-12)
    assert 0 <= m.kar <= 1
    assert 0 < m.apr <= 0.5
    assert 0 < m.mpd <= m.se * (1 + 1e-12)
    assert 0 < m.er <= 1
    assert 0 < m.ma <= m.mxa < 2 * math.pi
    assert m.ns >= 3
    assert 0 <= m.sr <= m.cr * (1 + 1e-9)


def test_record_invariants(rng):
    shapes = [L_SHAPE, UNIT_SQUARE, maze_polygon(0.1), star_polygon(6, 0.3)]
    shapes += [random_simple_polygon(rng) for _ in range(40)]
    for P in shapes:
        _check_invariants(polygon_metrics(P))


SCALE_INVARIANT = ("cr", "kar", "apr", "er", "ma", "mxa", "ns", "sr")


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), s=st.sampled_from([0.5, 2.0, 10.0]))
def test_scale_invariance_and_covariance(seed, s):
    P = random_simple_polygon(np.random.default_rng(seed))
    a, b = polygon_metrics(P).as_dict(), polygon_metrics(s * P).as_dict()
    for k in SCALE_INVARIANT:
        assert b[k] == pytest.approx(a[k], rel=1e-10, abs=1e-14)
    for k in ("cc", "se", "mpd"):
        assert b[k] == pytest.approx(s * a[k], rel=1e-10)
    assert b["ic"] == pytest.approx(s * a["ic"], rel=1e-6)
    for k in ("ar", "ke"):
        assert b[k] == pytest.approx(s * s * a[k], rel=1e-10)


def test_aggregate_examples():
    assert aggregate([1, 1, 1, 1], "average") == 1.0
    assert aggregate([3, 4], "l2") == 5.0
    assert aggregate([0.3, 0.1, 0.7], "worst", "sr") == 0.1
    assert aggregate([3, 9, 4], "worst", "ns") == 9


def test_aggregate_errors():
    with pytest.raises(ValueError):
        aggregate([], "average")
    with pytest.raises(ValueError):
        aggregate([1.0], "median")
    with pytest.raises(ValueError):
        aggregate([1.0], "worst")


def test_worst_directions_cover_all_metrics():
    assert WORST_MIN | WORST_MAX == set(METRICS)
    assert not WORST_MIN & WORST_MAX


def test_mesh_aggregation_grid():
    recs = mesh_metrics(grid_mesh(3))
    table = metric_table(recs)
    assert np.allclose(table["ar"], 1 / 9)
    agg = {(m.metric, m.aggregation): m.value for m in aggregate_all(recs)}
    assert len(agg) == len(METRICS) * len(AGGREGATIONS)
    assert agg[("ns", "max")] == 4
    assert agg[("ar", "l2")] == pytest.approx(math.sqrt(9) / 9)


def test_metrics_csv_layout(tmp_path):
    recs = mesh_metrics(grid_mesh(2))
    path = tmp_path / "m.csv"
    write_metrics_csv(recs, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["row", "element", *METRICS]
    assert sum(r[0] == "element" for r in rows) == 4
    assert sum(r[0] == "summary" for r in rows) == len(METRICS) * len(AGGREGATIONS)
    summary = read_metrics_summary(path)
    assert summary[("cc", "average")] == pytest.approx(math.sqrt(2) / 4)


def test_polygon_metrics_regular_hexagon():
    m = polygon_metrics(regular_polygon(6))
    assert m.cc == pytest.approx(1.0)
    assert m.ic == pytest.approx(math.sqrt(3) / 2, abs=1e-6)
    assert m.ma == pytest.approx(2 * math.pi / 3)
