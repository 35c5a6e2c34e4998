"""Dataset generators addressed by string id."""
from __future__ import annotations

from ..mesh import Dataset, Mesh
from .core import GenerationError, ScalingIndicators, mirror, mirror_times, scaling_indicators
from .generators import (
    gen_jenga, gen_maze, gen_multiple, gen_slices, gen_star, gen_triangle, gen_ulike,
)
from .parametric import CLASSES, T_VALUES, gen_parametric, parametric_polygon, parametric_sweep

BASE_IDS = ("triangle", "maze", "star", "jenga", "slices", "ulike", "jenga4", "slices4", "ulike4")
PARAMETRIC_IDS = tuple(f"parametric:{c}" for c in CLASSES)
DATASET_IDS = BASE_IDS + PARAMETRIC_IDS


def generate(dataset_id: str, n: int, seed: int = 0) -> Mesh:
    """Level ``n`` of a dataset.

    For ``parametric:<class>`` the level indexes the deformation grid,
    t = n / 20, so n runs over 0..20.
    """
    if dataset_id == "triangle":
        return gen_triangle(n, seed=seed)
    simple = {"maze": gen_maze, "star": gen_star, "jenga": gen_jenga, "slices": gen_slices, "ulike": gen_ulike}
    if dataset_id in simple:
        return simple[dataset_id](n)
    if dataset_id in ("jenga4", "slices4", "ulike4"):
        return gen_multiple(dataset_id, n)
    if dataset_id.startswith("parametric:"):
        cls = dataset_id.split(":", 1)[1]
        if int(n) != n or not 0 <= n < len(T_VALUES):
            raise ValueError(f"parametric level must be in 0..{len(T_VALUES) - 1}, got {n!r}")
        mesh = gen_parametric(cls, float(T_VALUES[int(n)]))
        return Mesh(mesh.vertices, mesh.elements, level=int(n))
    raise ValueError(f"unknown dataset {dataset_id!r}; choose from {', '.join(DATASET_IDS)}")


def make_dataset(dataset_id: str, levels, seed: int = 0) -> Dataset:
    """Ordered meshes of a refinement dataset; checks that mesh size decreases."""
    if dataset_id.startswith("parametric:"):
        raise ValueError("the parametric family is a sweep, not a refinement dataset")
    return Dataset(dataset_id, [generate(dataset_id, n, seed) for n in levels])


__all__ = [
    "BASE_IDS", "CLASSES", "DATASET_IDS", "GenerationError", "PARAMETRIC_IDS", "ScalingIndicators",
    "T_VALUES", "gen_jenga", "gen_maze", "gen_multiple", "gen_parametric", "gen_slices", "gen_star",
    "gen_triangle", "gen_ulike", "generate", "make_dataset", "mirror", "mirror_times",
    "parametric_polygon", "parametric_sweep", "scaling_indicators",
]
