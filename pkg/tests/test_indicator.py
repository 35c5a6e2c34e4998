import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyvem.datasets import generate
from polyvem.datasets.generators import maze_polygon, star_polygon
from polyvem.indicator import (
    INDICATOR_HEADER, collinear_runs, combine, quality_report, rho1, rho2, rho3, rho4, rho_mesh,
    write_indicator_csv,
)
from polyvem.mesh import EmptyMeshError, Mesh

from ._helpers import L_SHAPE, UNIT_SQUARE, UNIT_TRIANGLE, random_simple_polygon, regular_polygon

TOP_BAR = np.array([[0, 0.75], [0.5, 0.75], [0.75, 0.75], [1, 0.75], [1, 1], [0, 1]])


def test_rho1_examples():
    assert rho1(regular_polygon(7)) == pytest.approx(1.0)
    assert rho1(maze_polygon(0.2)) == 0.0
    assert rho1(L_SHAPE) == pytest.approx(1 / 3)


def test_rho2_examples():
    assert rho2(UNIT_SQUARE) == pytest.approx(1 / math.sqrt(2))
    assert rho2(2 * UNIT_SQUARE) == pytest.approx(rho2(UNIT_SQUARE), rel=1e-15)


def test_rho2_decays_on_jenga_top_bar():
    vals = []
    for n in range(5):
        m = generate("jenga", n)
        vals.append(min(rho2(P) for P in m.polygons()))
    # shortest sub-edge halves once splitting starts at level 1
    assert vals[1] == pytest.approx(vals[0])
    for a, b in zip(vals[1:], vals[2:]):
        assert b == pytest.approx(a / 2)


def test_rho3_examples():
    assert rho3(UNIT_TRIANGLE) == 1.0
    assert rho3(regular_polygon(6)) == 0.5
    assert rho3(star_polygon(12, 0.4)) == 1 / 8


def test_rho4_examples():
    assert rho4(UNIT_SQUARE) == 1.0
    assert rho4(regular_polygon(9)) == pytest.approx(1.0)
    assert rho4(TOP_BAR) == pytest.approx(0.5)
    runs = collinear_runs(TOP_BAR)
    assert sorted(len(r) for r in runs) == [1, 1, 1, 3]


def test_collinear_runs_wrap_around():
    # the split edge straddles the starting vertex
    P = np.array([[0.5, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
    runs = collinear_runs(P)
    assert len(runs) == 4
    assert sorted(np.round(r.sum(), 12) for r in runs) == [1, 1, 1, 1]
    assert rho4(P) == 1.0


def test_rho4_ignores_reversal():
    # a zero-width spike doubles back along the same line: not one sub-mesh
    P = np.array([[0, 0], [1, 0], [1, 1], [0.5, 1], [0.5, 0.5], [0.5, 1], [0, 1]], dtype=float)
    assert len(collinear_runs(P)) >= 5


def test_unit_square_mesh_value():
    assert rho_mesh(Mesh(UNIT_SQUARE, ([0, 1, 2, 3],))) == pytest.approx(0.905006, abs=1e-6)
    assert rho_mesh(Mesh(UNIT_SQUARE, ([0, 1, 2, 3],))) == pytest.approx(
        math.sqrt((1 / math.sqrt(2) + 0.75 + 1) / 3))


def test_only_non_star_elements_gives_zero():
    assert combine([[0.0, 0.4, 0.3, 1.0], [0.0, 0.9, 1.0, 0.5]]) == 0.0
    assert combine([[0.0, 0.4, 0.3, 1.0], [0.1, 0.9, 1.0, 0.5]]) > 0.0
    with pytest.raises(EmptyMeshError):
        combine(np.zeros((0, 4)))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 5000), s=st.sampled_from([0.1, 2.0, 7.5]))
def test_scores_bounded_and_scale_invariant(seed, s):
    P = random_simple_polygon(np.random.default_rng(seed))
    a, b = np.array([rho1(P), rho2(P), rho3(P), rho4(P)]), np.array([rho1(s * P), rho2(s * P), rho3(s * P), rho4(s * P)])
    assert np.all((a >= 0) & (a <= 1))
    assert np.allclose(a, b, rtol=1e-9, atol=1e-12)


def test_mesh_indicator_scale_invariant_and_pure():
    m = generate("star", 1)
    scaled = m.scaled(3.0)
    assert rho_mesh(scaled) == pytest.approx(rho_mesh(m), rel=1e-10)
    assert rho_mesh(m) == rho_mesh(m)


def test_triangle_dataset_near_constant_and_highest():
    tri = [rho_mesh(generate("triangle", n)) for n in range(3)]
    assert max(tri) - min(tri) < 0.05
    for other in ("jenga", "slices", "ulike", "maze"):
        assert rho_mesh(generate(other, 2)) < tri[2]


def test_indicator_csv(tmp_path):
    rows = [(name, quality_report(generate(name, 0))) for name in ("triangle", "jenga")]
    path = tmp_path / "ind.csv"
    write_indicator_csv(path, rows)
    data = list(csv.reader(path.open()))
    assert tuple(data[0]) == INDICATOR_HEADER
    assert data[2][0] == "jenga" and float(data[2][-1]) == rows[1][1].rho
