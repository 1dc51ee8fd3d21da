"""
Rooted half-edge triangulations of a polygon.

Conventions used throughout the package:

  * Every half-edge has its face on its LEFT; inner faces are traversed
    counterclockwise and have degree 3.
  * Boundary vertices are 0..ℓ-1 in counterclockwise order; boundary edge k
    joins k and k+1 (mod ℓ). Inner vertices are ℓ..V-1.
  * `root` is the inner half-edge 0 → 1: the root (outer) face lies on its
    right. It is boundary edge 0, which is also the marked edge `a`.
  * The ccw-next outgoing half-edge around origin(h) is twin(prev(h)).
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp


def _frozen(values, dtype=np.int64) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Triangulation:
    twin:            np.ndarray
    next:            np.ndarray
    origin:          np.ndarray
    root:            int
    boundary_length: int
    n_vertices:      int
    positions:       np.ndarray | None = None   # optional straight-line embedding

    def __post_init__(self):
        for name in ("twin", "next", "origin"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self.positions is not None:
            object.__setattr__(self, "positions", _frozen(self.positions, np.float64))

    # ── sizes ───────────────────────────────────────────────────────────────
    @property
    def n_half_edges(self) -> int:
        return int(self.twin.shape[0])

    @property
    def n_edges(self) -> int:
        return self.n_half_edges // 2

    @property
    def n_inner(self) -> int:
        return self.n_vertices - self.boundary_length

    @property
    def inner_vertices(self) -> np.ndarray:
        return np.arange(self.boundary_length, self.n_vertices)

    def is_boundary(self, v: int) -> bool:
        return 0 <= v < self.boundary_length

    # ── derived permutations ────────────────────────────────────────────────
    @cached_property
    def prev(self) -> np.ndarray:
        prev = np.empty_like(self.next)
        prev[self.next] = np.arange(self.n_half_edges)
        prev.setflags(write=False)
        return prev

    @cached_property
    def dest(self) -> np.ndarray:
        dest = self.origin[self.twin]
        dest.setflags(write=False)
        return dest

    @cached_property
    def face(self) -> np.ndarray:
        """Face index of every half-edge; faces numbered by first visit in id order."""
        face = np.full(self.n_half_edges, -1, dtype=np.int64)
        count = 0
        for h in range(self.n_half_edges):
            if face[h] >= 0:
                continue
            g = h
            while face[g] < 0:
                face[g] = count
                g = self.next[g]
            count += 1
        face.setflags(write=False)
        return face

    @property
    def n_faces(self) -> int:
        return int(self.face.max()) + 1

    @property
    def outer_face(self) -> int:
        return int(self.face[self.twin[self.root]])

    @cached_property
    def boundary_half_edges(self) -> np.ndarray:
        """b[k] = inner half-edge k → k+1 of boundary edge k."""
        ell = self.boundary_length
        b = np.empty(ell, dtype=np.int64)
        o = int(self.twin[self.root])
        for _ in range(ell):
            k = (int(self.origin[o]) - 1) % ell
            b[k] = self.twin[o]
            o = int(self.next[o])
        b.setflags(write=False)
        return b

    @cached_property
    def edge_of(self) -> np.ndarray:
        """Undirected edge index of every half-edge (edge id = min half-edge id rank)."""
        lo = np.minimum(np.arange(self.n_half_edges), self.twin)
        _, index = np.unique(lo, return_inverse=True)
        index.setflags(write=False)
        return index

    @cached_property
    def out_half_edge(self) -> np.ndarray:
        """One outgoing half-edge per vertex; b[v] for boundary vertices."""
        out = np.full(self.n_vertices, -1, dtype=np.int64)
        vertices, first = np.unique(self.origin, return_index=True)
        out[vertices] = first
        out[: self.boundary_length] = self.boundary_half_edges
        out.setflags(write=False)
        return out

    def rotation(self, v: int) -> list[int]:
        """Outgoing half-edges of v in counterclockwise order (starting at out_half_edge[v])."""
        start = int(self.out_half_edge[v])
        result = [start]
        h = int(self.twin[self.prev[start]])
        while h != start:
            result.append(h)
            h = int(self.twin[self.prev[h]])
        return result

    def neighbors_ccw(self, v: int) -> list[int]:
        return [int(self.dest[h]) for h in self.rotation(v)]

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 vertex adjacency (parallel edges merged)."""
        data = np.ones(self.n_half_edges, dtype=np.int8)
        adj = sp.csr_matrix(
            (data, (self.origin, self.dest)), shape=(self.n_vertices, self.n_vertices)
        )
        adj.data[:] = 1
        return adj

    @cached_property
    def dual_edges(self) -> np.ndarray:
        """(k, 3) rows (edge id, face, face across) for every edge between two inner faces."""
        outer = self.outer_face
        h = np.flatnonzero(np.arange(self.n_half_edges) < self.twin)
        left, right = self.face[h], self.face[self.twin[h]]
        keep = (left != outer) & (right != outer)
        rows = np.column_stack([self.edge_of[h], left, right])[keep]
        rows.setflags(write=False)
        return rows

    @cached_property
    def edge_endpoints(self) -> np.ndarray:
        """(E, 2) endpoints of each undirected edge, one row per edge."""
        keep = np.arange(self.n_half_edges) < self.twin
        return np.column_stack([self.origin[keep], self.dest[keep]])

    # ── construction ────────────────────────────────────────────────────────
    @classmethod
    def from_faces(
        cls,
        triangles: list[tuple[int, int, int]],
        boundary_length: int,
        n_vertices: int,
        positions: np.ndarray | None = None,
    ) -> "Triangulation":
        """
        Build from ccw vertex triples of a simple triangulation whose boundary
        cycle is 0, 1, ..., ℓ-1 (counterclockwise).
        """
        origin, nxt = [], []
        by_pair: dict[tuple[int, int], int] = {}
        for a, b, c in triangles:
            base = len(origin)
            for offset, (u, v) in enumerate(((a, b), (b, c), (c, a))):
                if (u, v) in by_pair:
                    raise ValueError(f"half-edge {u}->{v} appears in two faces")
                by_pair[(u, v)] = base + offset
                origin.append(u)
                nxt.append(base + (offset + 1) % 3)

        ell = boundary_length
        outer = []
        for k in range(ell):
            u, v = k, (k + 1) % ell
            if (u, v) not in by_pair:
                raise ValueError(f"boundary edge {u}->{v} is not the side of any triangle")
            h = len(origin)
            by_pair[(v, u)] = h
            origin.append(v)
            nxt.append(-1)
            outer.append(h)
        for k in range(ell):
            nxt[outer[k]] = outer[(k - 1) % ell]

        twin = [-1] * len(origin)
        for (u, v), h in by_pair.items():
            if (v, u) not in by_pair:
                raise ValueError(f"edge {u}-{v} has a single side; faces do not close up")
            twin[h] = by_pair[(v, u)]

        return cls(
            twin=twin,
            next=nxt,
            origin=origin,
            root=by_pair[(0, 1)],
            boundary_length=ell,
            n_vertices=n_vertices,
            positions=positions,
        )

    # ── checks and invariants ───────────────────────────────────────────────
    def validate(self) -> None:
        """Raise ValueError if any structural invariant fails."""
        ids = np.arange(self.n_half_edges)
        if np.any(self.twin[self.twin] != ids) or np.any(self.twin == ids):
            raise ValueError("twin is not a fixed-point-free involution")
        if np.any(self.origin[self.next] != self.dest):
            raise ValueError("next(h) does not start where h ends")
        if np.any(self.origin == self.dest):
            raise ValueError("self-loop present")
        degrees = np.bincount(self.face)
        outer = self.outer_face
        if degrees[outer] != self.boundary_length:
            raise ValueError(f"root face has degree {degrees[outer]}, expected {self.boundary_length}")
        if np.any(np.delete(degrees, outer) != 3):
            raise ValueError("inner face of degree other than 3")
        b = self.boundary_half_edges
        if sorted(self.origin[b].tolist()) != list(range(self.boundary_length)):
            raise ValueError("boundary is not simple")
        if np.any(self.origin[b] != np.arange(self.boundary_length)):
            raise ValueError("boundary vertices are not labelled 0..ℓ-1 counterclockwise")
        if self.euler_characteristic() != 2:
            raise ValueError("V - E + F != 2")

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def canonical_code(self) -> tuple[int, ...]:
        """
        Root-first breadth-first labelling of half-edges; two rooted maps are
        isomorphic iff their codes are equal.
        """
        label = {self.root: 0}
        order = [self.root]
        queue = deque([self.root])
        while queue:
            h = queue.popleft()
            for g in (int(self.next[h]), int(self.twin[h])):
                if g not in label:
                    label[g] = len(order)
                    order.append(g)
                    queue.append(g)
        code = [self.boundary_length]
        for h in order:
            code.append(label[int(self.next[h])])
            code.append(label[int(self.twin[h])])
        return tuple(code)

    # ── serialization ───────────────────────────────────────────────────────
    def to_json(self) -> dict:
        data = {
            "l":      self.boundary_length,
            "V":      self.n_vertices,
            "root":   int(self.root),
            "twin":   self.twin.tolist(),
            "next":   self.next.tolist(),
            "origin": self.origin.tolist(),
        }
        if self.positions is not None:
            data["positions"] = self.positions.tolist()
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Triangulation":
        tri = cls(
            twin=data["twin"],
            next=data["next"],
            origin=data["origin"],
            root=int(data["root"]),
            boundary_length=int(data["l"]),
            n_vertices=int(data["V"]),
            positions=np.asarray(data["positions"]) if "positions" in data else None,
        )
        tri.validate()
        return tri

    def __repr__(self):
        return (
            f"Triangulation(l={self.boundary_length}, n={self.n_inner}, "
            f"V={self.n_vertices}, E={self.n_edges})"
        )


def edge_arc(ell: int, e: int, e_end: int) -> list[int]:
    """
    Boundary vertices of the arc (e, e'): from the head of boundary edge e to
    the tail of boundary edge e', counterclockwise, both included.
    """
    if e % ell == e_end % ell:
        raise ValueError(f"arc endpoints must be distinct boundary edges, got {e} twice")
    start, stop = (e + 1) % ell, e_end % ell
    return [(start + i) % ell for i in range((stop - start) % ell + 1)]


@dataclass(frozen=True, eq=False)
class MarkedTriangulation:
    """
    A triangulation with three marked boundary edges a, b, c in counterclockwise
    order. Samplers put a on the root edge 0; cyclic relabellings (b, c, a) are
    accepted so that the three crossing events can be permuted.
    """

    map: Triangulation
    a:   int
    b:   int
    c:   int

    def __post_init__(self):
        ell = self.map.boundary_length
        marks = (self.a, self.b, self.c)
        if any(not 0 <= m < ell for m in marks):
            raise ValueError(f"marked edges {marks} must lie in 0..{ell - 1}")
        db, dc = (self.b - self.a) % ell, (self.c - self.a) % ell
        if not 0 < db < dc:
            raise ValueError(f"marked edges {marks} are not distinct and counterclockwise")

    def rotated(self) -> "MarkedTriangulation":
        """(a, b, c) → (b, c, a)."""
        return MarkedTriangulation(self.map, self.b, self.c, self.a)

    def to_json(self) -> dict:
        return {"map": self.map.to_json(), "a": self.a, "b": self.b, "c": self.c}
