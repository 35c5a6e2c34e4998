import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyvem.datasets.generators import jenga_base
from polyvem.mesh import (
    Dataset, EmptyMeshError, InvalidPolygonError, Mesh, MeshError, MeshParseError, OrientationError,
    edge_lengths, element_area, element_diameter, is_simple, load_mesh, mesh_size, save_mesh, validate,
)

from ._helpers import L_SHAPE, UNIT_SQUARE, UNIT_TRIANGLE, grid_mesh, random_simple_polygon


def test_diameter_examples():
    assert element_diameter(UNIT_SQUARE) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert element_diameter(UNIT_TRIANGLE) == pytest.approx(math.sqrt(2), abs=1e-15)
    needle = np.array([[0, 0], [1, 0], [0.5, 1e-9]])
    assert element_diameter(needle) == pytest.approx(1.0, abs=1e-15)


def test_diameter_needs_three_vertices():
    with pytest.raises(InvalidPolygonError):
        element_diameter(np.array([[0.0, 0.0], [1.0, 0.0]]))


def test_area_examples():
    assert element_area(UNIT_SQUARE) == 1.0
    assert element_area(UNIT_TRIANGLE) == 0.5
    assert element_area(L_SHAPE) == 3.0


def test_area_rejects_clockwise():
    with pytest.raises(OrientationError):
        element_area(UNIT_SQUARE[::-1])


def test_mesh_size_examples():
    assert mesh_size(grid_mesh(1)) == pytest.approx(math.sqrt(2))
    assert mesh_size(grid_mesh(2)) == pytest.approx(math.sqrt(2) / 2)
    assert mesh_size(jenga_base(0)) == pytest.approx(math.sqrt(1 + 1 / 16))


def test_mesh_size_empty():
    with pytest.raises(EmptyMeshError):
        mesh_size(Mesh(np.zeros((0, 2)), ()))


def test_diameter_dominates_edges(rng):
    for _ in range(50):
        P = random_simple_polygon(rng)
        assert element_diameter(P) >= edge_lengths(P).max() - 1e-15
    T = rng.random((3, 2))
    assert element_diameter(T) == pytest.approx(edge_lengths(T).max(), rel=1e-15)


def test_validate_grid_is_clean():
    assert validate(grid_mesh(2)) == []


def test_validate_detects_overlap():
    V = np.array(UNIT_SQUARE)
    mesh = Mesh(V, ([0, 1, 2, 3], [0, 1, 2, 3]))
    kinds = [v.kind for v in validate(mesh)]
    assert kinds.count("overlap") == 1


def test_validate_detects_shifted_overlap():
    # half-overlapping squares with no shared edge
    V = np.array([[0, 0], [0.6, 0], [0.6, 1], [0, 1], [0.4, 0], [1, 0], [1, 1], [0.4, 1]], dtype=float)
    mesh = Mesh(V, ([0, 1, 2, 3], [4, 5, 6, 7]))
    assert any(v.kind == "overlap" for v in validate(mesh))


def test_validate_detects_bowtie():
    V = np.array([[0, 0], [1, 1], [1, 0], [0, 1]], dtype=float)
    mesh = Mesh(V, ([0, 1, 2, 3],))
    assert any(v.kind == "self-intersection" for v in validate(mesh))


def test_validate_detects_gap():
    g = grid_mesh(2)
    mesh = Mesh(g.vertices, g.elements[:3])
    kinds = {v.kind for v in validate(mesh)}
    assert {"coverage", "conformity"} <= kinds


def test_validate_accepts_hanging_nodes():
    assert validate(jenga_base(3)) == []


def test_is_simple():
    assert is_simple(L_SHAPE)
    assert not is_simple(np.array([[0, 0], [1, 1], [1, 0], [0, 1]], dtype=float))


def test_from_polygons_normalizes_orientation():
    mesh = Mesh.from_polygons(UNIT_SQUARE, [[3, 2, 1, 0]])
    assert element_area(mesh.polygon(0)) == 1.0


def test_mesh_is_immutable():
    mesh = grid_mesh(2)
    with pytest.raises(ValueError):
        mesh.vertices[0, 0] = 5.0
    with pytest.raises(AttributeError):
        mesh.level = 3


def test_boundary_flags():
    mesh = grid_mesh(2)
    center = np.flatnonzero(np.all(np.isclose(mesh.vertices, 0.5), axis=1))
    assert mesh.boundary_vertex_flags.sum() == 8
    assert not mesh.boundary_vertex_flags[center].any()


def test_dataset_requires_decreasing_size():
    Dataset("grid", [grid_mesh(1), grid_mesh(2), grid_mesh(4)])
    with pytest.raises(MeshError):
        Dataset("grid", [grid_mesh(2), grid_mesh(2)])


# file format -----------------------------------------------------------------

def test_roundtrip_is_bit_exact(tmp_path, rng):
    g = grid_mesh(2)
    V = g.vertices + rng.uniform(-1e-3, 1e-3, g.vertices.shape) * (~g.boundary_vertex_flags[:, None])
    mesh = Mesh(V, g.elements)
    path = tmp_path / "m.poly"
    save_mesh(mesh, path)
    back = load_mesh(path)
    assert np.array_equal(back.vertices, mesh.vertices)
    assert all(np.array_equal(a, b) for a, b in zip(back.elements, mesh.elements))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=2, max_size=2))
def test_roundtrip_arbitrary_coordinates(tmp_path_factory, xy):
    V = np.array([[0, 0], [1, 0], [1, 1], [0, 1], xy], dtype=float)
    mesh = Mesh(V, ([0, 1, 2, 3],))
    path = tmp_path_factory.mktemp("rt") / "m.poly"
    save_mesh(mesh, path)
    assert np.array_equal(load_mesh(path).vertices, V)


def _write(tmp_path, text):
    p = tmp_path / "bad.poly"
    p.write_text(text)
    return p


def test_parse_index_out_of_range(tmp_path):
    p = _write(tmp_path, "POLYMESH 1\n3 1\n0 0\n1 0\n0 1\n3 0 1 3\n")
    with pytest.raises(MeshParseError, match="line 6"):
        load_mesh(p)


def test_parse_no_elements(tmp_path):
    p = _write(tmp_path, "POLYMESH 1\n3 0\n0 0\n1 0\n0 1\n")
    with pytest.raises(MeshParseError, match="no elements"):
        load_mesh(p)


def test_parse_bad_header(tmp_path):
    with pytest.raises(MeshParseError, match="line 1"):
        load_mesh(_write(tmp_path, "MESH\n"))


def test_parse_clockwise_element(tmp_path):
    p = _write(tmp_path, "POLYMESH 1\n3 1\n0 0\n1 0\n0 1\n3 0 2 1\n")
    with pytest.raises(MeshParseError, match="counterclockwise"):
        load_mesh(p)


def test_parse_ignores_comments(tmp_path):
    p = _write(tmp_path, "POLYMESH 1 # header\n3 1\n0 0  # a\n1 0\n0 1\n\n3 0 1 2\n")
    assert load_mesh(p).n_elements == 1
