"""
Crossing events E_a, E_b, E_c and quad crossings.

E_a(v) asks for a simple path from (c, a) to (a, b) whose other vertices
are inner and blue, with v on it or on the same side as edge a. The
outermost such path is read off the interface from c to b: its blue
right-hand vertices form a walk from c+1 to b, and the stretch between
the last visit to (c, a) and the next visit to (a, b), loop-erased, is
that path. The a-side is the set of faces reachable from the inner face
of edge a without crossing the walk. When the stretch is edge a itself
the a-side is empty and only a, a+1 qualify.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from lattice.domain import LatticeDomain, Quad
from maps.triangulation import MarkedTriangulation, Triangulation, edge_arc
from percolation.coloring import Coloring, monochromatic_clusters, sample_percolation
from percolation.interface import trace_interface


@dataclass(frozen=True, eq=False)
class CrossingFlags:
    E_a: np.ndarray
    E_b: np.ndarray
    E_c: np.ndarray

    def as_array(self) -> np.ndarray:
        """(V, 3) boolean array, columns a, b, c."""
        return np.column_stack([self.E_a, self.E_b, self.E_c])


def side_vertices(tri: Triangulation, start_face: int, blocked_edges) -> np.ndarray:
    """Vertices of the inner faces reachable from `start_face` without crossing `blocked_edges`."""
    dual = tri.dual_edges
    open_ = ~np.isin(dual[:, 0], np.asarray(list(blocked_edges), dtype=np.int64))
    graph = sp.coo_matrix(
        (np.ones(int(open_.sum())), (dual[open_, 1], dual[open_, 2])),
        shape=(tri.n_faces, tri.n_faces),
    )
    _, label = connected_components(graph, directed=False)
    inside = label[tri.face] == label[start_face]
    return np.unique(tri.origin[inside])


def loop_erase(walk) -> list[int]:
    path: list[int] = []
    where: dict[int, int] = {}
    for v in walk:
        v = int(v)
        if v in where:
            for dropped in path[where[v] + 1:]:
                del where[dropped]
            del path[where[v] + 1:]
        else:
            where[v] = len(path)
            path.append(v)
    return path


def event_mask(tri: Triangulation, inner_red: np.ndarray, a: int, b: int, c: int) -> np.ndarray:
    """E_a(v) for every vertex v, for marked edges (a, b, c)."""
    ell = tri.boundary_length
    path = trace_interface(tri, inner_red, c, b)
    beta = tri.dest[path]

    in_ca = np.zeros(tri.n_vertices, dtype=bool)
    in_ab = np.zeros(tri.n_vertices, dtype=bool)
    in_ca[edge_arc(ell, c, a)] = True
    in_ab[edge_arc(ell, a, b)] = True
    i0 = int(np.flatnonzero(in_ca[beta])[-1])
    i1 = i0 + 1 + int(np.flatnonzero(in_ab[beta[i0 + 1:]])[0])

    steps = np.arange(i0, i1)
    moved = steps[beta[steps + 1] != beta[steps]]
    walk_edges = tri.edge_of[tri.next[path[moved]]]

    mask = np.zeros(tri.n_vertices, dtype=bool)
    mask[loop_erase(beta[i0:i1 + 1])] = True
    root_edge = tri.boundary_half_edges[a]
    if tri.edge_of[root_edge] not in walk_edges:
        mask[side_vertices(tri, int(tri.face[root_edge]), walk_edges)] = True
    return mask


def crossing_flags(marked: MarkedTriangulation, coloring: Coloring) -> CrossingFlags:
    """E_a, E_b, E_c at every vertex; the boundary colors of `coloring` are ignored."""
    tri, inner = marked.map, coloring.inner_red
    a, b, c = marked.a, marked.b, marked.c
    return CrossingFlags(
        E_a=event_mask(tri, inner, a, b, c),
        E_b=event_mask(tri, inner, b, c, a),
        E_c=event_mask(tri, inner, c, a, b),
    )


def quad_crossing(domain: LatticeDomain, coloring: Coloring, quad: Quad) -> bool:
    """ω(Q): some red cluster meets both ∂₁Q and ∂₃Q."""
    red = coloring.red
    _, cluster = monochromatic_clusters(domain.triangulation, red)
    side1, side3 = quad.side(1), quad.side(3)
    first = set(cluster[side1[red[side1]]].tolist())
    return any(int(k) in first for k in cluster[side3[red[side3]]])


def rhombus_quad(domain: LatticeDomain, side: int) -> Quad:
    """Left-right quad of rhombus_domain(side): ∂₁ is the column i = 0, ∂₃ the column i = side."""
    corners = [(0, side), (0, 0), (side, 0), (side, side)]
    return Quad(domain, tuple(domain.vertex_id(p) for p in corners))


def boundary_crossing_probability(
    marked: MarkedTriangulation,
    e: int,
    samples: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """
    Estimate Ber[E_a(v)] for v the endpoint of boundary edge e ⊂ (c, a)
    nearer to a: the crossing probability between (c, e) and (a, b).
    Returns (estimate, standard error).
    """
    ell = marked.map.boundary_length
    arc = edge_arc(ell, marked.c, marked.a)
    if e % ell not in arc[:-1]:
        raise ValueError(f"edge {e} does not lie on the arc (c, a) = {arc}")
    v = (e + 1) % ell
    hits = 0
    for _ in range(samples):
        coloring = sample_percolation(marked, None, rng)
        hits += bool(event_mask(marked.map, coloring.inner_red, marked.a, marked.b, marked.c)[v])
    p = hits / samples
    return p, float(np.sqrt(p * (1 - p) / samples))
