"""
Red/blue site colorings and Bernoulli-½ sampling.

Colorings are stored as one boolean `red` array over all vertices
(boundary vertices 0..ℓ-1 first). The boundary condition records how the
boundary part was fixed; it must agree with the array.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from maps.triangulation import MarkedTriangulation, Triangulation, edge_arc
from state.errors import BoundaryConditionMismatch
from state.schema import BoundaryKind, Color


def as_triangulation(target) -> Triangulation:
    """Accept a Triangulation, a MarkedTriangulation or a LatticeDomain."""
    if isinstance(target, Triangulation):
        return target
    if isinstance(target, MarkedTriangulation):
        return target.map
    tri = getattr(target, "triangulation", None)
    if isinstance(tri, Triangulation):
        return tri
    raise TypeError(f"expected a map or a lattice domain, got {type(target).__name__}")


@dataclass(frozen=True)
class BoundaryCondition:
    kind:   BoundaryKind
    arcs:   tuple[int, int] | None = None   # (e, e') for ARC_PAIR
    colors: tuple[bool, ...] | None = None  # red flags for EXPLICIT

    @classmethod
    def blue(cls) -> "BoundaryCondition":
        return cls(BoundaryKind.MONOCHROMATIC_BLUE)

    @classmethod
    def red(cls) -> "BoundaryCondition":
        return cls(BoundaryKind.MONOCHROMATIC_RED)

    @classmethod
    def arc_pair(cls, e: int, e_end: int) -> "BoundaryCondition":
        return cls(BoundaryKind.ARC_PAIR, arcs=(int(e), int(e_end)))

    @classmethod
    def explicit(cls, red_flags) -> "BoundaryCondition":
        return cls(BoundaryKind.EXPLICIT, colors=tuple(bool(x) for x in red_flags))

    @property
    def is_monochromatic(self) -> bool:
        return self.kind in (BoundaryKind.MONOCHROMATIC_BLUE, BoundaryKind.MONOCHROMATIC_RED)

    @property
    def monochromatic_color(self) -> Color:
        if not self.is_monochromatic:
            raise BoundaryConditionMismatch(f"boundary condition {self.kind.value} is not monochromatic")
        return Color.RED if self.kind is BoundaryKind.MONOCHROMATIC_RED else Color.BLUE

    def boundary_red(self, ell: int) -> np.ndarray:
        """Red flags of boundary vertices 0..ℓ-1."""
        if self.kind is BoundaryKind.MONOCHROMATIC_BLUE:
            return np.zeros(ell, dtype=bool)
        if self.kind is BoundaryKind.MONOCHROMATIC_RED:
            return np.ones(ell, dtype=bool)
        if self.kind is BoundaryKind.ARC_PAIR:
            e, e_end = self.arcs
            red = np.ones(ell, dtype=bool)
            red[edge_arc(ell, e, e_end)] = False
            return red
        if self.colors is None or len(self.colors) != ell:
            raise BoundaryConditionMismatch(
                f"explicit boundary condition needs {ell} colors, got "
                f"{0 if self.colors is None else len(self.colors)}"
            )
        return np.array(self.colors, dtype=bool)

    def to_json(self) -> dict:
        data = {"kind": self.kind.value}
        if self.arcs is not None:
            data["arcs"] = list(self.arcs)
        if self.colors is not None:
            data["red"] = [int(x) for x in self.colors]
        return data


@dataclass(frozen=True, eq=False)
class Coloring:
    red:                np.ndarray
    boundary_condition: BoundaryCondition
    boundary_length:    int

    def __post_init__(self):
        red = np.array(self.red, dtype=bool)
        red.setflags(write=False)
        object.__setattr__(self, "red", red)
        expected = self.boundary_condition.boundary_red(self.boundary_length)
        if np.any(red[: self.boundary_length] != expected):
            raise BoundaryConditionMismatch(
                f"boundary colors disagree with the {self.boundary_condition.kind.value} condition"
            )

    @classmethod
    def from_inner(cls, inner_red, boundary_condition: BoundaryCondition, boundary_length: int) -> "Coloring":
        boundary = boundary_condition.boundary_red(boundary_length)
        return cls(np.concatenate([boundary, np.asarray(inner_red, dtype=bool)]), boundary_condition, boundary_length)

    @property
    def blue(self) -> np.ndarray:
        return ~self.red

    @property
    def inner_red(self) -> np.ndarray:
        return self.red[self.boundary_length:]

    def color(self, v: int) -> Color:
        return Color.RED if self.red[v] else Color.BLUE

    def flipped(self, v: int) -> "Coloring":
        """ω_v: the coloring with inner vertex v recolored."""
        red = self.red.copy()
        red[v] = not red[v]
        return Coloring(red, self.boundary_condition, self.boundary_length)

    def with_boundary(self, boundary_condition: BoundaryCondition) -> "Coloring":
        """Same inner colors under another boundary condition."""
        return Coloring.from_inner(self.inner_red, boundary_condition, self.boundary_length)

    def swapped(self) -> "Coloring":
        """Global color swap; monochromatic and explicit conditions swap with it."""
        bc = self.boundary_condition
        if bc.kind is BoundaryKind.MONOCHROMATIC_BLUE:
            bc = BoundaryCondition.red()
        elif bc.kind is BoundaryKind.MONOCHROMATIC_RED:
            bc = BoundaryCondition.blue()
        else:
            bc = BoundaryCondition.explicit(~self.red[: self.boundary_length])
        return Coloring(~self.red, bc, self.boundary_length)

    def __eq__(self, other):
        if not isinstance(other, Coloring):
            return NotImplemented
        return (
            self.boundary_length == other.boundary_length
            and self.boundary_condition == other.boundary_condition
            and np.array_equal(self.red, other.red)
        )

    def __hash__(self):
        return hash((self.boundary_length, self.boundary_condition, self.red.tobytes()))

    def to_json(self) -> dict:
        return {
            "boundary_condition": self.boundary_condition.to_json(),
            "red": self.red.astype(int).tolist(),
        }


def sample_percolation(target, boundary_condition: BoundaryCondition | None, rng: np.random.Generator) -> Coloring:
    """
    Inner vertices i.i.d. red/blue with probability ½. With
    `boundary_condition=None` the boundary is sampled the same way and
    recorded as an explicit condition (all sites Bernoulli-½).
    """
    tri = as_triangulation(target)
    ell = tri.boundary_length
    if boundary_condition is None:
        bits = rng.random(tri.n_vertices) < 0.5
        return Coloring(bits, BoundaryCondition.explicit(bits[:ell]), ell)
    inner = rng.random(tri.n_inner) < 0.5
    return Coloring.from_inner(inner, boundary_condition, ell)


def monochromatic_clusters(tri: Triangulation, red: np.ndarray) -> tuple[int, np.ndarray]:
    """Connected components of the graph keeping only same-colored edges."""
    red = np.asarray(red, dtype=bool)
    adj = tri.adjacency.tocoo()
    keep = red[adj.row] == red[adj.col]
    same = sp.coo_matrix((adj.data[keep], (adj.row[keep], adj.col[keep])), shape=adj.shape)
    return connected_components(same, directed=False)
