"""
Triangular lattice δT, δ-approximations D^δ of Jordan domains, hexagonal
dual cells and quads.

Axial coordinates (i, j) sit at δ·(i + j/2, j·√3/2). The six neighbour
offsets below are in counterclockwise order starting from +x.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor

import numpy as np
from matplotlib.path import Path
from scipy import ndimage

from lattice.factory import create_shape
from lattice.shapes import PolygonShape, signed_area
from maps.triangulation import MarkedTriangulation, Triangulation
from state.errors import EmptyApproximation, SamePosition, UnknownVertex

SQRT3 = np.sqrt(3.0)
DIRECTIONS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

# 6-neighbourhood in axial coordinates as an ndimage structuring element, indexed [di+1, dj+1]
HEX_STRUCTURE = np.zeros((3, 3), dtype=bool)
HEX_STRUCTURE[1, 1] = True
for _di, _dj in DIRECTIONS:
    HEX_STRUCTURE[_di + 1, _dj + 1] = True


def as_fraction(delta) -> Fraction:
    """Exact mesh size; floats go through their shortest repr ('0.1' → 1/10)."""
    if isinstance(delta, Fraction):
        value = delta
    elif isinstance(delta, int):
        value = Fraction(delta)
    else:
        value = Fraction(repr(float(delta)))
    if value <= 0:
        raise ValueError(f"mesh size δ must be positive, got {delta}")
    return value


@dataclass(frozen=True, order=True)
class LatticePoint:
    i: int
    j: int

    def position(self, delta) -> tuple[float, float]:
        h = float(delta)
        return h * (self.i + self.j / 2), h * self.j * SQRT3 / 2

    def exact_position(self, delta) -> tuple[Fraction, Fraction]:
        """(x, y/√3) as exact rationals: x = δ(i + j/2), y = √3·δj/2."""
        d = as_fraction(delta)
        return d * (self.i + Fraction(self.j, 2)), d * Fraction(self.j, 2)

    def neighbors(self) -> list["LatticePoint"]:
        return [LatticePoint(self.i + di, self.j + dj) for di, dj in DIRECTIONS]


def axial_to_plane(axial: np.ndarray, delta) -> np.ndarray:
    axial = np.asarray(axial, dtype=np.float64).reshape(-1, 2)
    h = float(delta)
    return np.column_stack([h * (axial[:, 0] + axial[:, 1] / 2), h * axial[:, 1] * SQRT3 / 2])


def plane_to_axial(points: np.ndarray, delta) -> np.ndarray:
    """Fractional axial coordinates of plane points."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    h = float(delta)
    b = 2 * points[:, 1] / (SQRT3 * h)
    return np.column_stack([points[:, 0] / h - b / 2, b])


def hexagon_corners(centers: np.ndarray, delta) -> np.ndarray:
    """(k, 6, 2) counterclockwise Voronoi hexagon corners around (k, 2) centers."""
    angles = np.deg2rad(30.0 + 60.0 * np.arange(6))
    offsets = (float(delta) / SQRT3) * np.column_stack([np.cos(angles), np.sin(angles)])
    return np.asarray(centers, dtype=np.float64)[:, None, :] + offsets[None, :, :]


def shift_grid(a: np.ndarray, di: int, dj: int) -> np.ndarray:
    """out[i, j] = a[i + di, j + dj], False/0 outside."""
    out = np.zeros_like(a)
    n, m = a.shape
    out[max(-di, 0):n + min(-di, 0), max(-dj, 0):m + min(-dj, 0)] = \
        a[max(di, 0):n + min(di, 0), max(dj, 0):m + min(dj, 0)]
    return out


def axial_window(lo: np.ndarray, hi: np.ndarray, delta) -> tuple[np.ndarray, np.ndarray]:
    """Axial origin and (n, m, 2) plane positions of the window lo-1..hi+1."""
    shape = hi - lo + 3
    ii, jj = np.meshgrid(np.arange(shape[0]), np.arange(shape[1]), indexing="ij")
    axial = np.stack([ii + lo[0] - 1, jj + lo[1] - 1], axis=-1)
    positions = axial_to_plane(axial.reshape(-1, 2), delta).reshape(*axial.shape[:2], 2)
    return lo - 1, positions


@dataclass(frozen=True, eq=False)
class SiteGrid:
    """Axial lattice window: cell (i, j) holds site origin + (i, j); one cell of padding on every side."""

    origin:    np.ndarray   # axial coordinate of cell (0, 0)
    positions: np.ndarray   # (n, m, 2) plane positions of every cell
    vertex_at: np.ndarray   # (n, m) domain vertex id, -1 where none
    cells:     np.ndarray   # (V, 2) cell of every domain vertex

    def scatter(self, values: np.ndarray, fill=False) -> np.ndarray:
        values = np.asarray(values)
        out = np.full(self.vertex_at.shape, fill, dtype=values.dtype)
        out[self.cells[:, 0], self.cells[:, 1]] = values
        return out

    @property
    def present(self) -> np.ndarray:
        return self.vertex_at >= 0


def _arc_starts(bits: list[np.ndarray]) -> list[np.ndarray]:
    return [bits[k] & ~bits[k - 1] for k in range(6)]


@dataclass(frozen=True, eq=False)
class LatticeDomain:
    """
    A δ-polygon: `inner` vertices (sorted by (j, i)) and the counterclockwise
    `boundary` cycle, which starts at its lexicographically smallest (i, j).
    As a vertex set the boundary comes first: ids 0..ℓ-1, then inner ids ℓ..V-1.
    """

    delta:    Fraction
    inner:    np.ndarray
    boundary: np.ndarray
    shape:    dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        for name in ("inner", "boundary"):
            arr = np.array(getattr(self, name), dtype=np.int64).reshape(-1, 2)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    # ── sizes and geometry ──────────────────────────────────────────────────
    @property
    def h(self) -> float:
        return float(self.delta)

    @property
    def hexagon_area(self) -> float:
        return self.h ** 2 * SQRT3 / 2

    @property
    def boundary_length(self) -> int:
        return int(self.boundary.shape[0])

    @property
    def n_inner(self) -> int:
        return int(self.inner.shape[0])

    @property
    def n_vertices(self) -> int:
        return self.boundary_length + self.n_inner

    @cached_property
    def axial(self) -> np.ndarray:
        return np.vstack([self.boundary, self.inner])

    @cached_property
    def positions(self) -> np.ndarray:
        return axial_to_plane(self.axial, self.delta)

    @cached_property
    def grid(self) -> SiteGrid:
        origin, positions = axial_window(self.axial.min(axis=0), self.axial.max(axis=0), self.delta)
        cells = self.axial - origin
        vertex_at = np.full(positions.shape[:2], -1, dtype=np.int64)
        vertex_at[cells[:, 0], cells[:, 1]] = np.arange(self.n_vertices)
        return SiteGrid(origin, positions, vertex_at, cells)

    @cached_property
    def boundary_polygon(self) -> np.ndarray:
        return self.positions[: self.boundary_length]

    @property
    def polygon_area(self) -> float:
        return signed_area(self.boundary_polygon)

    @cached_property
    def _index(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): v for v, (i, j) in enumerate(self.axial)}

    def vertex_id(self, point) -> int:
        key = (int(point.i), int(point.j)) if isinstance(point, LatticePoint) else (int(point[0]), int(point[1]))
        try:
            return self._index[key]
        except KeyError:
            raise UnknownVertex(f"lattice point {key} is not a vertex of this δ-polygon") from None

    def contains_point(self, point) -> bool:
        key = (int(point.i), int(point.j)) if isinstance(point, LatticePoint) else tuple(point)
        return key in self._index

    def point(self, v: int) -> LatticePoint:
        i, j = self.axial[v]
        return LatticePoint(int(i), int(j))

    def lattice_neighbors(self, v: int) -> list[int | None]:
        """Vertex ids of the 6 lattice neighbours of v (None where not in the domain)."""
        i, j = self.axial[v]
        return [self._index.get((int(i + di), int(j + dj))) for di, dj in DIRECTIONS]

    # ── triangulation view ──────────────────────────────────────────────────
    @cached_property
    def triangulation(self) -> Triangulation:
        index = self._index
        candidates = []
        for i, j in self.axial.tolist():
            up   = ((i, j), (i + 1, j), (i, j + 1))
            down = ((i, j), (i + 1, j - 1), (i + 1, j))
            for tri in (up, down):
                if all(p in index for p in tri):
                    candidates.append(tuple(index[p] for p in tri))
        candidates = np.array(candidates, dtype=np.int64).reshape(-1, 3)
        centroids = self.positions[candidates].mean(axis=1)
        outline = Path(np.vstack([self.boundary_polygon, self.boundary_polygon[:1]]), closed=True)
        keep = outline.contains_points(centroids)
        tri = Triangulation.from_faces(
            [tuple(t) for t in candidates[keep].tolist()],
            boundary_length=self.boundary_length,
            n_vertices=self.n_vertices,
            positions=self.positions,
        )
        tri.validate()
        return tri

    # ── serialization ───────────────────────────────────────────────────────
    def to_json(self) -> dict:
        return {
            "delta":    f"{self.delta.numerator}/{self.delta.denominator}",
            "inner":    self.inner.tolist(),
            "boundary": self.boundary.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LatticeDomain":
        return cls(Fraction(str(data["delta"])), data["inner"], data["boundary"])

    def __repr__(self):
        return f"LatticeDomain(delta={self.delta}, inner={self.n_inner}, boundary={self.boundary_length})"


# ── D^δ construction ────────────────────────────────────────────────────────
def _largest_component(occ: np.ndarray) -> np.ndarray:
    labels, count = ndimage.label(occ, structure=HEX_STRUCTURE)
    if count <= 1:
        return occ
    sizes = np.bincount(labels.ravel())[1:]
    tied = np.flatnonzero(sizes == sizes.max()) + 1
    if tied.size > 1:
        # the tied component holding the lexicographically smallest (i, j)
        firsts = [tuple(np.argwhere(labels == t)[0]) for t in tied]
        keep = tied[int(np.argmin([f[0] * occ.shape[1] + f[1] for f in firsts]))]
    else:
        keep = tied[0]
    return labels == keep


def _open_holes(occ: np.ndarray) -> bool:
    """Remove the inner vertex to the right of each enclosed complement component."""
    labels, count = ndimage.label(~occ, structure=HEX_STRUCTURE)
    outside = labels[0, 0]
    changed = False
    for lab in range(1, count + 1):
        if lab == outside:
            continue
        i, j = np.argwhere(labels == lab)[-1]
        occ[i + 1, j] = False
        changed = True
    return changed


def _cut_pinch(occ: np.ndarray) -> bool:
    """At the first non-inner vertex whose inner neighbours form ≥ 2 arcs, keep only the largest arc."""
    bits = [shift_grid(occ, di, dj) for di, dj in DIRECTIONS]
    arcs = sum(s.astype(np.int8) for s in _arc_starts(bits))
    pinch = np.argwhere(~occ & (arcs >= 2))
    if pinch.size == 0:
        return False
    i, j = pinch[0]
    around = [bool(b[i, j]) for b in bits]
    groups: list[list[int]] = []
    start = next(k for k in range(6) if around[k] and not around[k - 1])
    for step in range(6):
        k = (start + step) % 6
        if around[k]:
            if not around[k - 1] or not groups:
                groups.append([])
            groups[-1].append(k)
    groups.sort(key=lambda g: (-len(g), min(g)))
    for group in groups[1:]:
        for k in group:
            di, dj = DIRECTIONS[k]
            occ[i + di, j + dj] = False
    return True


def _trace_boundary(occ: np.ndarray) -> list[tuple[int, int]]:
    bits = [shift_grid(occ, di, dj) for di, dj in DIRECTIONS]
    frontier = ~occ & np.logical_or.reduce(bits)
    starts = _arc_starts(bits)
    first = tuple(int(x) for x in np.argwhere(frontier)[0])
    cycle = [first]
    seen = {first}
    current = first
    while True:
        i, j = current
        s = next(k for k in range(6) if starts[k][i, j])
        di, dj = DIRECTIONS[(s - 1) % 6]
        current = (i + di, j + dj)
        if current == first:
            break
        if current in seen:
            raise RuntimeError(f"boundary trace revisits {current}; the δ-polygon is not simple")
        seen.add(current)
        cycle.append(current)
    if len(cycle) != int(frontier.sum()):
        raise RuntimeError(
            f"boundary trace closed after {len(cycle)} of {int(frontier.sum())} boundary vertices"
        )
    return cycle


def build_lattice_domain(domain_spec, delta, eps_geom: float = 1e-9, verbose: bool = False) -> LatticeDomain:
    """
    δ-approximation D^δ: the largest connected set of lattice points strictly
    inside the domain (by at least eps_geom), cut back where needed so that
    its outer neighbours form one simple counterclockwise lattice cycle.
    "Largest" counts inner vertices; ties keep the component containing the
    lexicographically smallest (i, j). The lattice is never shifted.
    """
    shape = create_shape(domain_spec)
    d = as_fraction(delta)
    h = float(d)
    xmin, ymin, xmax, ymax = shape.bounding_box()
    row = h * SQRT3 / 2
    j0, j1 = floor(ymin / row) - 2, ceil(ymax / row) + 2
    i0 = floor(xmin / h - j1 / 2) - 2
    i1 = ceil(xmax / h - j0 / 2) + 2

    ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
    axial = np.column_stack([ii.ravel(), jj.ravel()])
    occ = shape.contains(axial_to_plane(axial, d), margin=eps_geom).reshape(ii.shape)
    if not occ.any():
        raise EmptyApproximation(
            f"no lattice point lies inside {shape.describe()['type']} at δ={d}; use a smaller δ"
        )

    repairs = 0
    while True:
        occ = _largest_component(occ)
        if _open_holes(occ) or _cut_pinch(occ):
            repairs += 1
            if not occ.any():
                raise EmptyApproximation(f"δ-polygon repair removed every inner vertex at δ={d}")
            continue
        break

    cycle = _trace_boundary(occ)
    inner = np.argwhere(occ) + (i0, j0)
    inner = inner[np.lexsort((inner[:, 0], inner[:, 1]))]
    boundary = np.array(cycle, dtype=np.int64) + (i0, j0)

    if verbose:
        print(f"[lattice] δ={d}: {len(inner)} inner, {len(boundary)} boundary vertices, {repairs} repairs")
    return LatticeDomain(d, inner, boundary, shape.describe())


def lattice_polygon(corners, delta, eps_geom: float = 1e-9) -> LatticeDomain:
    """
    δ-polygon whose boundary is the lattice path through `corners` (axial
    points joined along lattice directions). Every boundary point is kept,
    including acute corners with no inner neighbour.
    """
    corners = [(int(c.i), int(c.j)) if isinstance(c, LatticePoint) else (int(c[0]), int(c[1])) for c in corners]
    d = as_fraction(delta)
    if signed_area(axial_to_plane(np.array(corners), d)) < 0:
        corners = corners[::-1]

    cycle: list[tuple[int, int]] = []
    for (ai, aj), (bi, bj) in zip(corners, corners[1:] + corners[:1]):
        di, dj = bi - ai, bj - aj
        steps = max(abs(di), abs(dj))
        if steps == 0 or (di // steps, dj // steps) not in DIRECTIONS or (di % steps or dj % steps):
            raise ValueError(f"corner step ({di}, {dj}) is not along a lattice direction")
        ui, uj = di // steps, dj // steps
        cycle += [(ai + t * ui, aj + t * uj) for t in range(steps)]
    if len(set(cycle)) != len(cycle):
        raise ValueError("lattice polygon boundary is not simple")

    outline = PolygonShape(axial_to_plane(np.array(cycle), d))
    ci = np.array(cycle)
    ii, jj = np.meshgrid(
        np.arange(ci[:, 0].min(), ci[:, 0].max() + 1),
        np.arange(ci[:, 1].min(), ci[:, 1].max() + 1),
        indexing="ij",
    )
    axial = np.column_stack([ii.ravel(), jj.ravel()])
    inside = outline.contains(axial_to_plane(axial, d), margin=eps_geom)
    inner = axial[inside]
    if inner.size == 0:
        raise EmptyApproximation("lattice polygon has no inner vertex")

    members = set(cycle) | {tuple(p) for p in inner.tolist()}
    for i, j in inner.tolist():
        if any((i + di, j + dj) not in members for di, dj in DIRECTIONS):
            raise ValueError(f"inner vertex ({i}, {j}) has a neighbour outside the polygon")

    first = min(range(len(cycle)), key=lambda k: cycle[k])
    cycle = cycle[first:] + cycle[:first]
    inner = inner[np.lexsort((inner[:, 0], inner[:, 1]))]
    return LatticeDomain(d, inner, cycle, {"type": "lattice_polygon", "corners": corners})


def rhombus_domain(side: int, delta=1) -> LatticeDomain:
    """side×side Hex board: the 60° rhombus with corners (0,0), (side,0), (side,side), (0,side)."""
    return lattice_polygon([(0, 0), (side, 0), (side, side), (0, side)], delta)


# ── dual cells, arcs, quads ─────────────────────────────────────────────────
def hexagon_cell(domain: LatticeDomain, v: LatticePoint) -> np.ndarray:
    """Voronoi hexagon of v in δT as a (6, 2) counterclockwise polygon."""
    vid = domain.vertex_id(v)
    return hexagon_corners(domain.positions[vid:vid + 1], domain.delta)[0]


def boundary_arc_ids(ell: int, p: int, q: int) -> np.ndarray:
    """Cycle positions p, p+1, ..., q (mod ℓ)."""
    p, q = p % ell, q % ell
    if p == q:
        raise SamePosition(f"arc endpoints coincide at boundary position {p}")
    return (p + np.arange((q - p) % ell + 1)) % ell


def boundary_arc(domain: LatticeDomain, p: int, q: int) -> list[LatticePoint]:
    """Counterclockwise boundary arc from position p to position q, both included."""
    return [domain.point(int(v)) for v in boundary_arc_ids(domain.boundary_length, p, q)]


def boundary_position(domain: LatticeDomain, point) -> int:
    """Position of a boundary lattice point on the cycle."""
    v = domain.vertex_id(point)
    if v >= domain.boundary_length:
        raise UnknownVertex(f"{point} is an inner vertex, not on the boundary cycle")
    return v


@dataclass(frozen=True, eq=False)
class Quad:
    """
    Four counterclockwise boundary positions. Side k runs from p_k to p_{k+1}
    (inclusive), so consecutive sides share their corner vertex and the sides
    partition the boundary edges.
    """

    domain:    LatticeDomain
    positions: tuple[int, int, int, int]

    def __post_init__(self):
        ell = self.domain.boundary_length
        pos = tuple(int(p) % ell for p in self.positions)
        rel = [(p - pos[0]) % ell for p in pos]
        if not rel[0] < rel[1] < rel[2] < rel[3]:
            raise ValueError(f"quad positions {self.positions} are not distinct and counterclockwise")
        object.__setattr__(self, "positions", pos)

    def side(self, k: int) -> np.ndarray:
        """Vertex ids of ∂_k Q, k ∈ {1, 2, 3, 4}."""
        p = self.positions
        return boundary_arc_ids(self.domain.boundary_length, p[k - 1], p[k % 4])


def nearest_boundary_edge(domain: LatticeDomain, point) -> int:
    """Boundary edge whose midpoint is closest to `point` (ties: smallest edge id)."""
    poly = domain.boundary_polygon
    mid = (poly + np.roll(poly, -1, axis=0)) / 2
    return int(np.argmin(np.linalg.norm(mid - np.asarray(point, dtype=np.float64), axis=1)))


def marked_domain(domain: LatticeDomain, marks) -> MarkedTriangulation:
    """Mark the boundary edges nearest to three counterclockwise plane points as a, b, c."""
    a, b, c = (nearest_boundary_edge(domain, m) for m in marks)
    return MarkedTriangulation(domain.triangulation, a, b, c)
