"""
Root-triangle decomposition shared by enumeration and uniform sampling.

A map is grown from its boundary by repeatedly placing the triangle on the
first side of an open hole. A hole is a counterclockwise list of half-edges
(interior on the left) together with the number of inner vertices it still
has to contain. Holes live on a LIFO stack, so a map is determined by its
decision word: one entry per placed triangle,

    ("a",)         apex is a new inner vertex
    ("b", k, n1)   apex is the k-th vertex of the hole; the k-gon cut off
                   on the left receives n1 inner vertices

Enumeration walks every word; sampling draws each decision with probability
proportional to the number of completions it leaves.
"""

from typing import Callable, Iterator

import numpy as np

from maps.counting import count_triangulations, log_count
from maps.triangulation import Triangulation
from state.errors import CapExceeded

Decision = tuple


class _HalfEdgeBuilder:
    def __init__(self, ell: int):
        self.origin: list[int] = []
        self.twin:   list[int] = []
        self.next:   list[int] = []
        self.n_vertices = ell

    def new_edge(self, u: int, v: int) -> int:
        h = len(self.origin)
        self.origin += [u, v]
        self.twin   += [h + 1, h]
        self.next   += [-1, -1]
        return h

    def new_vertex(self) -> int:
        self.n_vertices += 1
        return self.n_vertices - 1

    def close_face(self, a: int, b: int, c: int) -> None:
        self.next[a], self.next[b], self.next[c] = b, c, a

    def dest(self, h: int) -> int:
        return self.origin[self.twin[h]]


def _hole_options(p: int, n: int) -> list[Decision]:
    options: list[Decision] = []
    if n >= 1:
        options.append(("a",))
    for k in range(2, p):
        for n1 in range(n + 1):
            options.append(("b", k, n1))
    return options


def _option_log_weights(p: int, n: int) -> np.ndarray:
    """Log completion counts in _hole_options order: ("a",) first if n >= 1, then (k, n1) k-major."""
    ks = np.arange(2, p)[:, None]
    n1 = np.arange(n + 1)[None, :]
    split = (log_count(ks, n1) + log_count(p - ks + 1, n - n1)).ravel()
    if n >= 1:
        return np.concatenate([[log_count(p + 1, n - 1)], split])
    return split


def _decision_at(p: int, n: int, index: int) -> Decision:
    if n >= 1:
        if index == 0:
            return ("a",)
        index -= 1
    return ("b", 2 + index // (n + 1), index % (n + 1))


def _children(p: int, n: int, decision: Decision) -> list[tuple[int, int]]:
    """Holes pushed by `decision`, in push order (the last one is processed first)."""
    if decision[0] == "a":
        return [(p + 1, n - 1)]
    _, k, n1 = decision
    pushed = []
    if not (k == p - 1 and n - n1 == 0):
        pushed.append((p - k + 1, n - n1))
    if not (k == 2 and n1 == 0):
        pushed.append((k, n1))
    return pushed


def build_map(ell: int, n: int, choose: Callable[[int, int], Decision]) -> Triangulation:
    """Grow a triangulation of the ℓ-gon with n inner vertices; `choose(p, n)` picks each decision."""
    if ell < 3:
        raise ValueError(f"boundary length must be >= 3, got {ell}")
    builder = _HalfEdgeBuilder(ell)
    boundary = [builder.new_edge(k, (k + 1) % ell) for k in range(ell)]
    for k in range(ell):
        builder.next[boundary[k] + 1] = boundary[(k - 1) % ell] + 1

    stack: list[tuple[list[int], int]] = [(boundary, n)]
    while stack:
        hole, m = stack.pop()
        p = len(hole)
        decision = choose(p, m)
        h0 = hole[0]
        v0, v1 = builder.origin[h0], builder.dest(h0)

        if decision[0] == "a":
            w = builder.new_vertex()
            e1 = builder.new_edge(v1, w)
            e2 = builder.new_edge(w, v0)
            builder.close_face(h0, e1, e2)
            stack.append(([builder.twin[e2], builder.twin[e1]] + hole[1:], m - 1))
            continue

        _, k, n1 = decision
        n2 = m - n1
        vk = builder.origin[hole[k]]
        if k == 2 and n1 == 0:
            e1 = hole[1]
        else:
            e1 = builder.new_edge(v1, vk)
        if k == p - 1 and n2 == 0:
            e2 = hole[p - 1]
        else:
            e2 = builder.new_edge(vk, v0)
        builder.close_face(h0, e1, e2)

        if not (k == p - 1 and n2 == 0):
            stack.append((hole[k:] + [builder.twin[e2]], n2))
        if not (k == 2 and n1 == 0):
            stack.append((hole[1:k] + [builder.twin[e1]], n1))

    return Triangulation(
        twin=builder.twin,
        next=builder.next,
        origin=builder.origin,
        root=boundary[0],
        boundary_length=ell,
        n_vertices=builder.n_vertices,
    )


def _words(stack: tuple[tuple[int, int], ...]) -> Iterator[tuple[Decision, ...]]:
    if not stack:
        yield ()
        return
    (p, n), rest = stack[-1], stack[:-1]
    for decision in _hole_options(p, n):
        for tail in _words(rest + tuple(_children(p, n, decision))):
            yield (decision,) + tail


def enumerate_triangulations(ell: int, n: int, cap: int = 8, max_maps: int = 200_000) -> list[Triangulation]:
    """Every rooted type-II triangulation of the ℓ-gon with n inner vertices, once each."""
    if ell < 3:
        raise ValueError(f"boundary length must be >= 3, got {ell}")
    if n > cap:
        raise CapExceeded(f"enumeration of n={n} inner vertices exceeds maps.enumeration_cap={cap}")
    total = count_triangulations(ell, n)
    if total > max_maps:
        raise CapExceeded(
            f"({ell}, {n}) has {total} triangulations, above maps.max_maps={max_maps}"
        )
    maps = []
    for word in _words(((ell, n),)):
        decisions = iter(word)
        maps.append(build_map(ell, n, lambda p, m: next(decisions)))
    return maps


def sample_uniform(ell: int, n: int, rng: np.random.Generator) -> Triangulation:
    """Uniform rooted type-II triangulation of the ℓ-gon with exactly n inner vertices."""

    def choose(p: int, m: int) -> Decision:
        logw = _option_log_weights(p, m)
        if logw.shape[0] == 1:
            return _decision_at(p, m, 0)
        weights = np.exp(logw - logw.max())
        cumulative = np.cumsum(weights)
        index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
        return _decision_at(p, m, min(index, logw.shape[0] - 1))

    return build_map(ell, n, choose)
