from dataclasses import dataclass

import numpy as np

from maps.triangulation import Triangulation
from percolation.coloring import BoundaryCondition, Coloring, as_triangulation


@dataclass(frozen=True, eq=False)
class InterfacePath:
    """
    Percolation interface from boundary edge e to boundary edge e'.

    `half_edges` lists every crossed edge once, oriented red → blue in the
    direction of travel: the first is boundary edge e entering the map, the
    last is boundary edge e' leaving it. `left` and `right` are the red and
    blue vertices met on either side.
    """

    e:          int
    e_end:      int
    half_edges: np.ndarray
    left:       np.ndarray
    right:      np.ndarray

    def __len__(self):
        return int(self.half_edges.shape[0])

    def to_json(self) -> dict:
        return {
            "e":          self.e,
            "e_end":      self.e_end,
            "half_edges": self.half_edges.tolist(),
            "left":       self.left.tolist(),
            "right":      self.right.tolist(),
        }


def trace_interface(tri: Triangulation, inner_red: np.ndarray, e: int, e_end: int) -> np.ndarray:
    """Crossed half-edges from e to e' under the (e, e')-boundary condition."""
    ell = tri.boundary_length
    red = np.concatenate([BoundaryCondition.arc_pair(e, e_end).boundary_red(ell), inner_red])
    b = tri.boundary_half_edges
    exit_edge = int(tri.twin[b[e_end % ell]])
    h = int(b[e % ell])
    path = [h]
    nxt_of, prev_of, twin, dest = tri.next, tri.prev, tri.twin, tri.dest
    for _ in range(tri.n_half_edges):
        nxt = nxt_of[h]
        h = int(twin[nxt if red[dest[nxt]] else prev_of[h]])
        path.append(h)
        if h == exit_edge:
            return np.array(path, dtype=np.int64)
    raise RuntimeError(f"interface from {e} to {e_end} did not close; the map is not a disk triangulation")


def interface(target, e: int, e_end: int, coloring: Coloring) -> InterfacePath:
    """The unique red-left / blue-right edge path from e to e' (the coloring's own boundary is overridden)."""
    tri = as_triangulation(target)
    if e % tri.boundary_length == e_end % tri.boundary_length:
        raise ValueError(f"interface endpoints must be distinct boundary edges, got {e} twice")
    path = trace_interface(tri, coloring.inner_red, e, e_end)
    return InterfacePath(
        e=int(e),
        e_end=int(e_end),
        half_edges=path,
        left=tri.origin[path],
        right=tri.dest[path],
    )
