"""Global numbering of vertex, edge and moment degrees of freedom."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..mesh import Mesh
from .basis import dim_pk


@dataclass(frozen=True)
class DofMap:
    """Global DOF layout.

    Vertex DOFs come first (index = vertex id), then k-1 DOFs per edge, stored
    from the lower to the higher vertex id, then dim P_{k-2} moments per element.
    """

    k: int
    n_vertices: int
    edges: np.ndarray  # (E, 2), sorted pairs
    element_dofs: tuple  # per element, global index of each local DOF
    boundary: np.ndarray  # bool mask over all DOFs
    boundary_edges: np.ndarray  # bool mask over edges

    @property
    def ndofs(self) -> int:
        return len(self.boundary)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    def edge_dofs(self, eid) -> np.ndarray:
        eid = np.asarray(eid)
        return self.n_vertices + eid[..., None] * (self.k - 1) + np.arange(self.k - 1)

    @classmethod
    def build(cls, mesh: Mesh, k: int) -> "DofMap":
        nv = mesh.n_vertices
        nm = dim_pk(k - 2)
        edge_id: dict = {}
        owners: list = []
        elem_edges = []
        for cyc in mesh.elements:
            ids = []
            for a, b in zip(cyc, np.roll(cyc, -1)):
                key = (a, b) if a < b else (b, a)
                e = edge_id.get(key)
                if e is None:
                    e = edge_id[key] = len(owners)
                    owners.append(0)
                owners[e] += 1
                ids.append(e)
            elem_edges.append(ids)
        E = len(owners)
        edges = np.array(list(edge_id.keys()), dtype=np.int64).reshape(E, 2)
        n_total = nv + E * (k - 1) + nm * mesh.n_elements
        mom0 = nv + E * (k - 1)

        element_dofs = []
        for el, (cyc, ids) in enumerate(zip(mesh.elements, elem_edges)):
            n = len(cyc)
            loc = np.empty(n * k + nm, dtype=np.int64)
            loc[:n] = cyc
            if k > 1:
                for e, (a, eid) in enumerate(zip(cyc, ids)):
                    g = nv + eid * (k - 1) + np.arange(k - 1)
                    if a != edges[eid, 0]:
                        g = g[::-1]
                    loc[n + e * (k - 1): n + (e + 1) * (k - 1)] = g
            loc[n * k:] = mom0 + el * nm + np.arange(nm)
            loc.setflags(write=False)
            element_dofs.append(loc)

        bedges = np.array(owners) == 1
        boundary = np.zeros(n_total, dtype=bool)
        boundary[edges[bedges].ravel()] = True
        if k > 1:
            boundary[(nv + np.flatnonzero(bedges)[:, None] * (k - 1) + np.arange(k - 1)).ravel()] = True
        return cls(k, nv, edges, tuple(element_dofs), boundary, bedges)
