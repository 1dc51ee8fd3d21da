"""
Loop changes caused by flipping one vertex, and ε-pivotal points.

Loops are compared by their crossed half-edges, so a loop whose curve is
untouched by the flip is never part of the difference. Only loops that
cross an edge at v can change; a vertex whose neighbours show fewer than
four colour changes around it therefore has at most two.
"""

from dataclasses import dataclass

import numpy as np

from maps.triangulation import Triangulation
from percolation.coloring import Coloring, as_triangulation
from percolation.loops import Loop, LoopEnsemble, loop_ensemble
from state.errors import BoundaryVertex

AREA_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SymmetricDifference:
    vertex:  int
    removed: tuple[Loop, ...]   # in Γ(M, ω) but not in Γ(M, ω_v)
    added:   tuple[Loop, ...]   # in Γ(M, ω_v) but not in Γ(M, ω)

    @property
    def loops(self) -> tuple[Loop, ...]:
        return self.removed + self.added

    @property
    def keys(self) -> frozenset:
        return frozenset(loop.key for loop in self.loops)

    @property
    def areas(self) -> np.ndarray:
        return np.array([loop.area for loop in self.loops], dtype=np.float64)

    def __len__(self):
        return len(self.removed) + len(self.added)

    def count_at_least(self, eps: float) -> int:
        # the same loop summed from ω and from ω_v may differ in the last bits
        return int(np.count_nonzero(self.areas >= eps * (1 - AREA_RTOL)))

    def to_json(self) -> dict:
        return {
            "vertex":  self.vertex,
            "removed": [loop.to_json() for loop in self.removed],
            "added":   [loop.to_json() for loop in self.added],
        }


def _check_inner(tri: Triangulation, v: int) -> None:
    if not tri.boundary_length <= v < tri.n_vertices:
        raise BoundaryVertex(
            f"vertex {v} is not inner (inner ids are {tri.boundary_length}..{tri.n_vertices - 1}); "
            "boundary colors are fixed by the boundary condition"
        )


def neighbour_changes(tri: Triangulation, red: np.ndarray, v: int) -> int:
    """Colour changes around v, reading its neighbours counterclockwise."""
    ring = red[tri.neighbors_ccw(v)]
    return int(np.count_nonzero(ring != np.roll(ring, 1)))


def _loop_of(ensemble: LoopEnsemble, v: int) -> Loop:
    cluster = ensemble.cluster_of[v]
    return next(loop for loop in ensemble.loops if loop.cluster == cluster)


def loop_symmetric_difference(
    target,
    coloring: Coloring,
    v: int,
    area=None,
    before: LoopEnsemble | None = None,
) -> SymmetricDifference:
    """
    𝓛_v = Γ(M, ω) Δ Γ(M, ω_v). `before` may carry a precomputed Γ(M, ω)
    under the same `area` weights.
    """
    tri = as_triangulation(target)
    _check_inner(tri, v)
    red = coloring.red
    ring = red[tri.neighbors_ccw(v)]
    flipped = coloring.flipped(v)

    # v inside a monochromatic neighbourhood: the flip only adds the singleton loop around v
    if np.all(ring == red[v]):
        after = loop_ensemble(tri, flipped, area)
        return SymmetricDifference(v, (), (_loop_of(after, v),))
    # v is a singleton cluster: the flip only removes its loop
    if np.all(ring != red[v]):
        if before is None:
            before = loop_ensemble(tri, coloring, area)
        return SymmetricDifference(v, (_loop_of(before, v),), ())

    if before is None:
        before = loop_ensemble(tri, coloring, area)
    after = loop_ensemble(tri, flipped, area)
    old, new = before.by_key(), after.by_key()
    removed = tuple(old[k] for k in sorted(old.keys() - new.keys(), key=min))
    added = tuple(new[k] for k in sorted(new.keys() - old.keys(), key=min))
    return SymmetricDifference(v, removed, added)


def is_eps_pivotal(target, coloring: Coloring, v: int, eps: float, area=None, before: LoopEnsemble | None = None) -> bool:
    """At least three loops of 𝓛_v have area ≥ ε."""
    if eps < 0:
        raise ValueError(f"ε must be nonnegative, got {eps}")
    tri = as_triangulation(target)
    _check_inner(tri, v)
    if neighbour_changes(tri, coloring.red, v) < 4:
        return False
    return loop_symmetric_difference(tri, coloring, v, area, before).count_at_least(eps) >= 3


def eps_pivotal_mask(target, coloring: Coloring, eps: float, area=None, verbose: bool = False) -> np.ndarray:
    """Boolean mask over vertices of the ε-pivotal inner vertices."""
    if eps < 0:
        raise ValueError(f"ε must be nonnegative, got {eps}")
    tri = as_triangulation(target)
    before = loop_ensemble(tri, coloring, area)
    mask = np.zeros(tri.n_vertices, dtype=bool)
    checked = 0
    for v in tri.inner_vertices:
        v = int(v)
        if neighbour_changes(tri, coloring.red, v) < 4:
            continue
        checked += 1
        mask[v] = loop_symmetric_difference(tri, coloring, v, area, before).count_at_least(eps) >= 3
    if verbose:
        print(f"[eps_pivotal_mask] ε={eps} candidates={checked} pivotal={int(mask.sum())}")
    return mask
