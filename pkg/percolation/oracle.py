"""
Exhaustive oracles for tiny maps: exact event probabilities over all 2^k
colorings and a literal path-search reading of the crossing events.
"""

from fractions import Fraction
from typing import Callable

import numpy as np

from maps.triangulation import MarkedTriangulation, Triangulation, edge_arc
from percolation.coloring import BoundaryCondition, Coloring, as_triangulation
from percolation.crossing import event_mask, side_vertices
from state.errors import TooManyVertices

MAX_INNER = 24


def _all_inner_colorings(k: int):
    shifts = np.arange(k)
    for bits in range(1 << k):
        yield ((bits >> shifts) & 1).astype(bool)


def _check_size(k: int, max_inner: int) -> None:
    if k > max_inner:
        raise TooManyVertices(
            f"exhaustive enumeration over {k} inner vertices exceeds the limit of {max_inner} (2^{max_inner} colorings)"
        )


def brute_force_probability(
    target,
    event: Callable[[Coloring], bool],
    boundary_condition: BoundaryCondition | None = None,
    max_inner: int = MAX_INNER,
) -> Fraction:
    """Exact Ber[event] as a rational with denominator 2^k, k = number of inner vertices."""
    tri = as_triangulation(target)
    k = tri.n_inner
    _check_size(k, max_inner)
    bc = boundary_condition or BoundaryCondition.blue()
    hits = 0
    for inner in _all_inner_colorings(k):
        hits += bool(event(Coloring.from_inner(inner, bc, tri.boundary_length)))
    return Fraction(hits, 1 << k)


def exact_crossing_counts(marked: MarkedTriangulation, max_inner: int = MAX_INNER) -> tuple[np.ndarray, int]:
    """(V, 3) counts of colorings realizing E_a, E_b, E_c at each vertex, and the number of colorings."""
    tri = marked.map
    k = tri.n_inner
    _check_size(k, max_inner)
    a, b, c = marked.a, marked.b, marked.c
    counts = np.zeros((tri.n_vertices, 3), dtype=np.int64)
    for inner in _all_inner_colorings(k):
        counts[:, 0] += event_mask(tri, inner, a, b, c)
        counts[:, 1] += event_mask(tri, inner, b, c, a)
        counts[:, 2] += event_mask(tri, inner, c, a, b)
    return counts, 1 << k


def exact_crossing_probabilities(marked: MarkedTriangulation, max_inner: int = MAX_INNER) -> list[tuple[Fraction, Fraction, Fraction]]:
    counts, total = exact_crossing_counts(marked, max_inner)
    return [tuple(Fraction(int(x), total) for x in row) for row in counts]


def _edge_lookup(tri: Triangulation) -> dict[tuple[int, int], int]:
    lookup = {}
    for h in range(tri.n_half_edges):
        pair = (int(tri.origin[h]), int(tri.dest[h]))
        if pair in lookup and lookup[pair] != tri.edge_of[h]:
            raise ValueError("path search needs a map without multiple edges")
        lookup[pair] = int(tri.edge_of[h])
    return lookup


def path_search_event(tri: Triangulation, red: np.ndarray, a: int, b: int, c: int) -> np.ndarray:
    """
    E_a(v) by enumerating every simple witness path. The two-vertex path
    along edge a has no a-side and contributes only its endpoints.
    Simple maps only; exponential in the number of blue inner vertices.
    """
    ell = tri.boundary_length
    edges = _edge_lookup(tri)
    start_face = int(tri.face[tri.boundary_half_edges[a]])
    sources = edge_arc(ell, c, a)
    targets = set(edge_arc(ell, a, b))
    open_inner = np.zeros(tri.n_vertices, dtype=bool)
    open_inner[ell:] = ~np.asarray(red, dtype=bool)[ell:]
    adj = tri.adjacency
    neighbors = [adj.indices[adj.indptr[v]:adj.indptr[v + 1]].tolist() for v in range(tri.n_vertices)]

    mask = np.zeros(tri.n_vertices, dtype=bool)
    mask[[a, (a + 1) % ell]] = True
    degenerate = (a, (a + 1) % ell)

    def record(path: list[int]) -> None:
        if tuple(path) == degenerate:
            return
        mask[path] = True
        blocked = [edges[(u, v)] for u, v in zip(path, path[1:])]
        mask[side_vertices(tri, start_face, blocked)] = True

    def extend(path: list[int], on_path: set[int]) -> None:
        for u in neighbors[path[-1]]:
            if u in on_path:
                continue
            if u in targets:
                record(path + [u])
            elif open_inner[u]:
                on_path.add(u)
                extend(path + [u], on_path)
                on_path.discard(u)

    for s in sources:
        extend([s], {s})
    return mask
