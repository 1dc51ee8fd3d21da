"""
Loop ensembles Γ(M, ω) of colorings with monochromatic boundary.

A loop is stored as the cyclic sequence of primal half-edges it crosses,
each oriented from its red endpoint to its blue endpoint; the loop enters
face(h) through h. Walking the loop therefore keeps red on the left.
Crossing half-edge h into its face with third vertex x, the loop leaves
through next(h) when x is red and through prev(h) when x is blue.

Loops are in bijection with the non-root edges of the cluster tree (root:
the cluster holding the boundary). The region of a loop is the vertex set
of the subtree hanging below it, i.e. the enclosed cluster together with
everything it surrounds.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components

from maps.triangulation import Triangulation
from percolation.coloring import BoundaryCondition, Coloring, as_triangulation, monochromatic_clusters
from state.errors import BoundaryConditionMismatch, InconsistentLoops
from state.schema import AtomicMeasure, Color


def vertex_weights(tri: Triangulation, area=None) -> np.ndarray:
    """Per-vertex area weights: unit counting by default, or a dense array / vertex-located AtomicMeasure."""
    if area is None:
        return np.ones(tri.n_vertices, dtype=np.float64)
    if isinstance(area, AtomicMeasure):
        return area.per_vertex(tri.n_vertices)
    weights = np.asarray(area, dtype=np.float64)
    if weights.shape != (tri.n_vertices,):
        raise ValueError(f"area weights need shape ({tri.n_vertices},), got {weights.shape}")
    return weights


def crossing_successor(tri: Triangulation, red: np.ndarray, half_edges: np.ndarray) -> np.ndarray:
    """Next crossed half-edge after each red→blue half-edge in `half_edges`."""
    h = np.asarray(half_edges, dtype=np.int64)
    nxt = tri.next[h]
    third = tri.dest[nxt]
    leave = np.where(red[third], nxt, tri.prev[h])
    return tri.twin[leave]


@dataclass(frozen=True, eq=False)
class Loop:
    half_edges: np.ndarray   # crossed half-edges in traversal order, starting at the smallest id
    cluster:    int          # cluster enclosed by the loop
    color:      Color        # color of the enclosed cluster
    region:     np.ndarray   # reg(ℓ), sorted vertex ids
    area:       float
    parent:     int          # index of the enclosing loop, -1 if none

    @cached_property
    def key(self) -> frozenset:
        return frozenset(int(h) for h in self.half_edges)

    def __len__(self):
        return int(self.half_edges.shape[0])

    def to_json(self) -> dict:
        return {
            "half_edges": self.half_edges.tolist(),
            "color":      self.color.value,
            "region":     self.region.tolist(),
            "area":       self.area,
            "parent":     self.parent,
        }


@dataclass(frozen=True, eq=False)
class LoopEnsemble:
    loops:          tuple[Loop, ...]
    boundary_color: Color
    n_clusters:     int
    cluster_of:     np.ndarray

    def __len__(self):
        return len(self.loops)

    def __iter__(self):
        return iter(self.loops)

    def __getitem__(self, index) -> Loop:
        return self.loops[index]

    @cached_property
    def keys(self) -> frozenset:
        return frozenset(loop.key for loop in self.loops)

    @property
    def areas(self) -> np.ndarray:
        return np.array([loop.area for loop in self.loops], dtype=np.float64)

    def by_key(self) -> dict[frozenset, Loop]:
        return {loop.key: loop for loop in self.loops}

    def to_json(self) -> dict:
        return {
            "boundary_color": self.boundary_color.value,
            "n_clusters":     self.n_clusters,
            "loops":          [loop.to_json() for loop in self.loops],
        }


def _cycles(tri: Triangulation, red: np.ndarray) -> list[np.ndarray]:
    crossed = np.flatnonzero(red[tri.origin] & ~red[tri.dest])
    if crossed.size == 0:
        return []
    succ = crossing_successor(tri, red, crossed)
    position = np.full(tri.n_half_edges, -1, dtype=np.int64)
    position[crossed] = np.arange(crossed.size)
    perm = position[succ]
    if np.any(perm < 0):
        raise RuntimeError("loop left the set of crossed half-edges; is the boundary monochromatic?")

    graph = sp.coo_matrix((np.ones(crossed.size), (np.arange(crossed.size), perm)), shape=(crossed.size,) * 2)
    count, label = connected_components(graph, directed=False)
    starts = np.full(count, crossed.size, dtype=np.int64)
    np.minimum.at(starts, label, np.arange(crossed.size))

    cycles = []
    for k in np.sort(starts):
        sequence = [k]
        j = perm[k]
        while j != k:
            sequence.append(j)
            j = perm[j]
        cycles.append(crossed[sequence])
    return cycles


def loop_ensemble(target, coloring: Coloring, area=None) -> LoopEnsemble:
    """Γ(M, ω) with region and area of every loop; `area` weights vertices (unit counting by default)."""
    tri = as_triangulation(target)
    bc = coloring.boundary_condition
    if not bc.is_monochromatic:
        raise BoundaryConditionMismatch(
            f"loop ensembles need a monochromatic boundary, got {bc.kind.value}"
        )
    red = coloring.red
    weights = vertex_weights(tri, area)
    n_clusters, cluster_of = monochromatic_clusters(tri, red)
    cycles = _cycles(tri, red)
    if len(cycles) != n_clusters - 1:
        raise RuntimeError(f"{len(cycles)} loops for {n_clusters} clusters; map is not a disk triangulation")

    # cluster tree: one edge per loop, rooted at the boundary cluster
    reps = np.array([c[0] for c in cycles], dtype=np.int64)
    red_side = cluster_of[tri.origin[reps]]
    blue_side = cluster_of[tri.dest[reps]]
    tree = sp.coo_matrix(
        (np.ones(len(cycles)), (red_side, blue_side)), shape=(n_clusters, n_clusters)
    )
    root = int(cluster_of[0])
    order, parent = breadth_first_order(tree, root, directed=False, return_predecessors=True)

    depth = np.zeros(n_clusters, dtype=np.int64)
    for c in order[1:]:
        depth[c] = depth[parent[c]] + 1
    child = np.where(depth[red_side] > depth[blue_side], red_side, blue_side)
    loop_of_cluster = np.full(n_clusters, -1, dtype=np.int64)
    loop_of_cluster[child] = np.arange(len(cycles))

    # Euler tour numbering so that every subtree is a contiguous range
    children: list[list[int]] = [[] for _ in range(n_clusters)]
    for c in order[1:]:
        children[parent[c]].append(int(c))
    tin = np.zeros(n_clusters, dtype=np.int64)
    tout = np.zeros(n_clusters, dtype=np.int64)
    clock, stack = 0, [(root, False)]
    while stack:
        c, done = stack.pop()
        if done:
            tout[c] = clock
            continue
        tin[c] = clock
        clock += 1
        stack.append((c, True))
        stack.extend((k, False) for k in reversed(children[c]))

    vertex_tin = tin[cluster_of]
    by_tin = np.argsort(vertex_tin, kind="stable")
    sorted_tin = vertex_tin[by_tin]
    cumulative = np.concatenate([[0.0], np.cumsum(weights[by_tin])])

    loops = []
    for index, cycle in enumerate(cycles):
        c = int(child[index])
        lo, hi = np.searchsorted(sorted_tin, [tin[c], tout[c]], side="left")
        above = loop_of_cluster[parent[c]] if parent[c] != root else -1
        loops.append(Loop(
            half_edges=cycle,
            cluster=c,
            color=Color.RED if c == red_side[index] else Color.BLUE,
            region=np.sort(by_tin[lo:hi]),
            area=float(cumulative[hi] - cumulative[lo]),
            parent=int(above),
        ))
    return LoopEnsemble(tuple(loops), bc.monochromatic_color, int(n_clusters), cluster_of)


def coloring_from_loops(target, loops, boundary_color: Color = Color.BLUE) -> Coloring:
    """
    Rebuild ω from Γ(M, ω): an edge is bichromatic iff some loop crosses it,
    and every crossed half-edge points red → blue.
    """
    tri = as_triangulation(target)
    groups = loops.loops if isinstance(loops, LoopEnsemble) else loops
    crossed = np.zeros(tri.n_half_edges, dtype=bool)
    for loop in groups:
        half_edges = loop.half_edges if isinstance(loop, Loop) else np.fromiter(loop, dtype=np.int64)
        crossed[half_edges] = True
    cut = crossed | crossed[tri.twin]

    boundary_red = Color(boundary_color) is Color.RED
    adj = tri.adjacency
    order, parent = breadth_first_order(adj, 0, directed=False, return_predecessors=True)
    if order.shape[0] != tri.n_vertices:
        raise InconsistentLoops("map is disconnected")

    # parallel edges are summed; any cut copy flips, the final check catches disagreement
    pair_cut = sp.csr_matrix((cut.astype(np.int64), (tri.origin, tri.dest)), shape=adj.shape)
    flips = np.asarray(pair_cut[parent[order[1:]], order[1:]]).ravel() > 0
    red = np.zeros(tri.n_vertices, dtype=bool)
    red[0] = boundary_red
    for v, flip in zip(order[1:], flips):
        red[v] = red[parent[v]] ^ flip
    if np.any((red[tri.origin] != red[tri.dest]) != cut):
        raise InconsistentLoops("loop set does not separate a consistent two-coloring")
    if np.any(crossed & ~(red[tri.origin] & ~red[tri.dest])):
        raise InconsistentLoops("a loop crosses an edge with blue on its left")
    bc = BoundaryCondition.red() if boundary_red else BoundaryCondition.blue()
    if np.any(red[: tri.boundary_length] != boundary_red):
        raise InconsistentLoops("loops cross the boundary")
    return Coloring(red, bc, tri.boundary_length)
