"""
Alternating four-arm events on the triangular lattice.

An arm is a monochromatic lattice path that starts at a neighbour of the
centre vertex v and avoids v. It reaches the outer square when one of its
sites has a lattice neighbour outside that square. Four arms of
alternating colour exist iff the neighbours of v whose colour component
reaches out, read counterclockwise, change colour at least four times.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, sqrt

import numpy as np
import scipy.sparse as sp
from scipy import ndimage
from scipy.sparse.csgraph import maximum_flow

from lattice.domain import (
    DIRECTIONS,
    HEX_STRUCTURE,
    LatticeDomain,
    SiteGrid,
    as_fraction,
    axial_window,
    shift_grid,
)
from percolation.coloring import Coloring
from state.errors import VertexOutsideBox

_TOL = 1e-12


@dataclass(frozen=True)
class AnnulusSpec:
    """Square B = [x0, x0+ρ] × [y0, y0+ρ] and the concentric B̃ of side 3ρ; A = B̃ minus the closed B."""

    corner: tuple[float, float]
    side:   float

    @classmethod
    def grid_square(cls, i: int, j: int, rho: float) -> "AnnulusSpec":
        return cls((i * rho, j * rho), rho)

    @property
    def outer_corner(self) -> tuple[float, float]:
        return self.corner[0] - self.side, self.corner[1] - self.side

    def _inside(self, points, corner, side) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64)
        slack = _TOL * max(side, 1.0)
        lo = np.array(corner) - slack
        hi = np.array(corner) + side + slack
        return np.all((p >= lo) & (p <= hi), axis=-1)

    def in_square(self, points) -> np.ndarray:
        return self._inside(points, self.corner, self.side)

    def in_outer(self, points) -> np.ndarray:
        return self._inside(points, self.outer_corner, 3 * self.side)

    def to_json(self) -> dict:
        return {"corner": list(self.corner), "side": self.side}


def _leaving(outside: np.ndarray) -> np.ndarray:
    """Cells with at least one lattice neighbour in `outside`."""
    out = np.zeros_like(outside)
    for di, dj in DIRECTIONS:
        out |= shift_grid(outside, di, dj)
    return out


# ── arm detection ───────────────────────────────────────────────────────────
def reaching_pattern(red: np.ndarray, allowed: np.ndarray, exits: np.ndarray, center: tuple[int, int]) -> list[bool | None]:
    """
    For each of the six neighbours of `center` (counterclockwise): True/False
    for red/blue when its colour component inside `allowed` contains an exit
    cell, None otherwise.
    """
    reach = {}
    labels = {}
    for color in (True, False):
        mask = allowed & (red == color)
        lab, count = ndimage.label(mask, structure=HEX_STRUCTURE)
        hits = np.zeros(count + 1, dtype=bool)
        hits[np.unique(lab[exits & mask])] = True
        hits[0] = False
        reach[color], labels[color] = hits, lab

    ci, cj = center
    pattern = []
    for di, dj in DIRECTIONS:
        cell = (ci + di, cj + dj)
        if not allowed[cell]:
            pattern.append(None)
            continue
        color = bool(red[cell])
        pattern.append(color if reach[color][labels[color][cell]] else None)
    return pattern


def colour_changes(pattern) -> int:
    """Cyclic colour changes of a sequence, skipping None entries."""
    seen = [c for c in pattern if c is not None]
    if len(seen) < 2:
        return 0
    return sum(seen[k] != seen[k - 1] for k in range(len(seen)))


def has_alternating_arms(red, allowed, exits, center) -> bool:
    return colour_changes(reaching_pattern(red, allowed, exits, center)) >= 4


def _disjoint_paths(red, allowed, exits, color: bool, starts: list[tuple[int, int]]) -> int:
    """Maximum number of vertex-disjoint `color` paths from `starts` to exit cells."""
    mask = allowed & (red == color)
    index = np.full(mask.shape, -1, dtype=np.int64)
    sites = np.argwhere(mask)
    k = sites.shape[0]
    index[sites[:, 0], sites[:, 1]] = np.arange(k)
    source, sink = 2 * k, 2 * k + 1

    rows = [2 * np.arange(k)]
    cols = [2 * np.arange(k) + 1]
    for di, dj in DIRECTIONS:
        target = shift_grid(index, di, dj)
        ok = mask & (shift_grid(mask, di, dj))
        rows.append(2 * index[ok] + 1)
        cols.append(2 * target[ok])
    first = [index[c] for c in starts]
    rows.append(np.full(len(first), source))
    cols.append(2 * np.array(first, dtype=np.int64))
    ends = index[exits & mask]
    rows.append(2 * ends + 1)
    cols.append(np.full(ends.shape[0], sink))

    rows, cols = np.concatenate(rows), np.concatenate(cols)
    graph = sp.csr_matrix((np.ones(rows.shape[0], dtype=np.int32), (rows, cols)), shape=(2 * k + 2,) * 2)
    graph.sum_duplicates()
    graph.data[:] = 1
    return int(maximum_flow(graph, source, sink).flow_value)


def alternating_arms_by_flow(red, allowed, exits, center) -> bool:
    """
    Exhaustive oracle: try every counterclockwise quadruple of neighbours
    with colours R, B, R, B and ask a unit-capacity flow network for two
    vertex-disjoint red and two vertex-disjoint blue arms.
    """
    ci, cj = center
    cells = [(ci + di, cj + dj) for di, dj in DIRECTIONS]
    colors = [bool(red[c]) if allowed[c] else None for c in cells]
    memo = {}

    def flow(color, pair):
        key = (color, pair)
        if key not in memo:
            memo[key] = _disjoint_paths(red, allowed, exits, color, [cells[k] for k in pair])
        return memo[key]

    for k1 in range(6):
        for k2 in range(k1 + 1, 6):
            for k3 in range(k2 + 1, 6):
                for k4 in range(k3 + 1, 6):
                    quad = [colors[k] for k in (k1, k2, k3, k4)]
                    if None in quad or quad[0] != quad[2] or quad[1] != quad[3] or quad[0] == quad[1]:
                        continue
                    if flow(quad[0], (k1, k3)) >= 2 and flow(quad[1], (k2, k4)) >= 2:
                        return True
    return False


# ── A-important and ρ-important points ──────────────────────────────────────
def _outer_window(grid: SiteGrid, annulus: AnnulusSpec) -> tuple[slice, slice] | None:
    inside = annulus.in_outer(grid.positions) & grid.present
    if not inside.any():
        return None
    idx = np.argwhere(inside)
    lo = np.maximum(idx.min(axis=0) - 1, 0)
    hi = idx.max(axis=0) + 2
    return slice(lo[0], hi[0]), slice(lo[1], hi[1])


def _annulus_setup(domain: LatticeDomain, coloring: Coloring, annulus: AnnulusSpec):
    grid = domain.grid
    window = _outer_window(grid, annulus)
    positions = grid.positions[window]
    present = grid.present[window]
    inside = annulus.in_outer(positions)
    # pad so neighbours of every allowed cell exist in the arrays
    inside = np.pad(inside, 1)
    allowed = np.pad(present, 1) & inside
    exits = allowed & _leaving(~inside)
    red = np.pad(grid.scatter(coloring.red)[window], 1)
    offset = np.array([window[0].start, window[1].start]) - 1
    return grid, allowed, exits, red, offset


def is_A_important(domain: LatticeDomain, coloring: Coloring, v: int, annulus: AnnulusSpec) -> bool:
    """Four alternating arms from the neighbours of v to ∂B̃ inside D^δ ∩ B̃."""
    if not annulus.in_square(domain.positions[v]):
        raise VertexOutsideBox(
            f"vertex {v} at {tuple(domain.positions[v])} is outside the square "
            f"with corner {annulus.corner} and side {annulus.side}"
        )
    grid, allowed, exits, red, offset = _annulus_setup(domain, coloring, annulus)
    center = tuple(grid.cells[v] - offset)
    allowed = allowed.copy()
    allowed[center] = False
    return has_alternating_arms(red, allowed, exits & allowed, center)


def _neighbour_changes(domain: LatticeDomain, red: np.ndarray) -> np.ndarray:
    """Cyclic colour changes among the in-domain lattice neighbours of every vertex."""
    grid = domain.grid
    present = grid.present
    red_grid = grid.scatter(red)
    ci, cj = grid.cells[:, 0], grid.cells[:, 1]
    there = np.array([present[ci + di, cj + dj] for di, dj in DIRECTIONS]).T
    color = np.array([red_grid[ci + di, cj + dj] for di, dj in DIRECTIONS]).T
    return np.array([
        colour_changes([bool(c) if p else None for p, c in zip(there[v], color[v])])
        for v in range(domain.n_vertices)
    ], dtype=np.int64)


def importance_scale(eps: float, delta=None) -> float:
    """
    ρ^ε = 0.01·b^ε where b^ε = √ε is the largest square side whose
    Lebesgue area stays below ε. With `delta` the scale is floored at one
    mesh step; below it B̃ misses the lattice neighbours of its vertex and
    no point is important.
    """
    rho = 0.01 * sqrt(eps)
    if delta is not None:
        rho = max(rho, float(delta))
    return rho


def rho_important_set(domain: LatticeDomain, coloring: Coloring, rho: float, verbose: bool = False) -> np.ndarray:
    """
    Sorted inner vertex ids that are A_B-important for some square B of the
    grid ρℤ² meeting the domain.
    """
    if rho <= 0:
        raise ValueError(f"ρ must be positive, got {rho}")
    ell = domain.boundary_length
    positions = domain.positions
    candidates = np.zeros(domain.n_vertices, dtype=bool)
    candidates[ell:] = _neighbour_changes(domain, coloring.red)[ell:] >= 4
    found = np.zeros(domain.n_vertices, dtype=bool)

    lo = positions.min(axis=0)
    hi = positions.max(axis=0)
    squares = 0
    for i in range(floor(lo[0] / rho) - 1, ceil(hi[0] / rho) + 1):
        for j in range(floor(lo[1] / rho) - 1, ceil(hi[1] / rho) + 1):
            annulus = AnnulusSpec.grid_square(i, j, rho)
            members = annulus.in_square(positions)
            if not members.any():
                continue
            squares += 1
            todo = np.flatnonzero(members & candidates & ~found)
            if todo.size == 0:
                continue
            grid, allowed, exits, red, offset = _annulus_setup(domain, coloring, annulus)
            for v in todo:
                center = tuple(grid.cells[v] - offset)
                trial = allowed.copy()
                trial[center] = False
                if has_alternating_arms(red, trial, exits & trial, center):
                    found[v] = True
    if verbose:
        print(f"[rho_important_set] ρ={rho} squares={squares} candidates={int(candidates.sum())} important={int(found.sum())}")
    return np.flatnonzero(found)


# ── four-arm box events ─────────────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class ArmBox:
    """Lattice δT ∩ [−r, r]² around the origin, with its exit cells."""

    delta:   Fraction
    r:       float
    allowed: np.ndarray
    exits:   np.ndarray
    center:  tuple[int, int]

    @classmethod
    def build(cls, delta, r: float) -> "ArmBox":
        h = float(delta)
        jmax = ceil(2 * r / (sqrt(3.0) * h)) + 1
        imax = ceil(r / h + jmax / 2) + 1
        lo, hi = np.array([-imax, -jmax]), np.array([imax, jmax])
        origin, positions = axial_window(lo, hi, delta)
        slack = _TOL * max(r, 1.0)
        inside = np.all(np.abs(positions) <= r + slack, axis=-1)
        center = (int(-origin[0]), int(-origin[1]))
        allowed = inside.copy()
        allowed[center] = False
        exits = allowed & _leaving(~inside)
        return cls(as_fraction(delta), r, allowed, exits, center)

    def event(self, red: np.ndarray) -> bool:
        return has_alternating_arms(red, self.allowed, self.exits, self.center)


def four_arm_batch(task: tuple[ArmBox, int, int]) -> int:
    box, seed, size = task
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(size):
        hits += box.event(rng.random(box.allowed.shape) < 0.5)
    return hits
