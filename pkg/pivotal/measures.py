"""
Four-arm probabilities, discrete pivotal measures and occupation measures.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from lattice.domain import LatticeDomain, as_fraction
from percolation.coloring import Coloring, as_triangulation
from pivotal.arms import ArmBox, four_arm_batch
from pivotal.flips import eps_pivotal_mask
from state.errors import BudgetExceeded, ValidationError
from state.schema import AtomicMeasure, PivotalMode
from utils.parallel import map_batches
from utils.rationals import fraction_str


@dataclass(frozen=True)
class FourArmEstimate:
    """Monte Carlo estimate of α₄^δ(δ, r), stamped with the seed that produced it."""

    delta:   Fraction
    r:       float
    samples: int
    hits:    int
    seed:    dict | None = None

    @property
    def p(self) -> float:
        return self.hits / self.samples

    @property
    def se(self) -> float:
        return float(np.sqrt(self.p * (1 - self.p) / self.samples))

    @property
    def inverse(self) -> float:
        if self.hits == 0:
            raise BudgetExceeded(
                f"no four-arm events in {self.samples} samples at δ={self.delta}, r={self.r}; "
                "raise pivotal.alpha4_samples"
            )
        return self.samples / self.hits

    def to_json(self) -> dict:
        return {
            "delta":   fraction_str(self.delta),
            "r":       self.r,
            "samples": self.samples,
            "hits":    self.hits,
            "p":       self.p,
            "se":      self.se,
            "seed":    self.seed,
        }


def four_arm_probability(
    delta,
    r: float,
    samples: int,
    rng: np.random.Generator,
    threads: int = 1,
    batch_size: int = 1000,
    seed: dict | None = None,
    verbose: bool = False,
) -> FourArmEstimate:
    """α̂₄^δ(δ, r): alternating four arms from the origin's neighbours to ∂[−r, r]²."""
    delta = as_fraction(delta)
    if not float(delta) < r:
        raise ValidationError(f"four-arm box needs δ < r, got δ={delta}, r={r}")
    if samples < 1:
        raise ValueError(f"sample count must be >= 1, got {samples}")
    box = ArmBox.build(delta, r)
    sizes = [batch_size] * (samples // batch_size)
    if samples % batch_size:
        sizes.append(samples % batch_size)
    seeds = rng.integers(0, 2**63 - 1, size=len(sizes), dtype=np.int64)
    hits = sum(map_batches(four_arm_batch, [(box, int(s), n) for s, n in zip(seeds, sizes)], threads))
    estimate = FourArmEstimate(delta, float(r), samples, int(hits), seed)
    if verbose:
        print(f"[four_arm_probability] δ={delta} r={r} p={estimate.p:.5f} ± {estimate.se:.5f}")
    return estimate


def pivotal_measure(
    target,
    coloring: Coloring,
    eps: float,
    mode: PivotalMode | str = PivotalMode.MAP,
    area=None,
    alpha4: FourArmEstimate | None = None,
    weights: AtomicMeasure | None = None,
    verbose: bool = False,
) -> AtomicMeasure:
    """
    Discrete pivotal measure on the ε-pivotal vertices.

        map:      n^{-1/4} per vertex, loop areas under μ^n = (2n)^{-1}·counting
        lattice:  α̂₄^{-1}·(hexagon area) per vertex, loop areas in Lebesgue measure
        field:    α̂₄^{-1}·μ'_h(v) per vertex; `area` is μ_h and `weights` is μ'_h

    `area` overrides the default loop-area weights in the first two modes.
    """
    mode = PivotalMode(mode)
    tri = as_triangulation(target)
    n = tri.n_inner
    params = {"mode": mode.value, "eps": eps}

    if mode is PivotalMode.MAP:
        if n == 0:
            # no inner vertex, hence no pivotal point
            return AtomicMeasure(np.zeros(0, dtype=np.int64), np.zeros(0), {**params, "n": 0})
        if area is None:
            area = np.full(tri.n_vertices, 1.0 / (2 * n))
        per_vertex = np.full(tri.n_vertices, n ** -0.25)
        params["n"] = n
    else:
        if alpha4 is None:
            raise ValidationError(f"pivotal mode '{mode.value}' needs a four-arm estimate (alpha4)")
        params["alpha4"] = alpha4.to_json()
        if mode is PivotalMode.LATTICE:
            if not isinstance(target, LatticeDomain):
                raise ValidationError("lattice pivotal measure needs a LatticeDomain target")
            if area is None:
                area = np.full(tri.n_vertices, target.hexagon_area)
            per_vertex = np.full(tri.n_vertices, target.hexagon_area * alpha4.inverse)
            params["delta"] = fraction_str(target.delta)
        else:
            if area is None or weights is None:
                raise ValidationError("field pivotal measure needs the area measure μ_h and the clock measure μ'_h")
            per_vertex = weights.per_vertex(tri.n_vertices) * alpha4.inverse
            params["field"] = dict(weights.params)

    pivotal = np.flatnonzero(eps_pivotal_mask(tri, coloring, eps, area, verbose))
    measure = AtomicMeasure(pivotal, per_vertex[pivotal], params)
    if verbose:
        print(f"[pivotal_measure] mode={mode.value} ε={eps} atoms={len(measure)} total={measure.total:.6g}")
    return measure


def occupation_estimate(points, d: float, r: float, cells_per_radius: int = 20) -> AtomicMeasure:
    """
    𝔪^r_{A,d} = r^{d−2}·Lebesgue restricted to the r-neighbourhood of the
    point set A, discretized on a square grid of spacing r/cells_per_radius.
    Atoms sit at the centres of grid cells whose centre lies within r of A.
    """
    if not 0 < d <= 2:
        raise ValueError(f"occupation dimension must lie in (0, 2], got {d}")
    if r <= 0:
        raise ValueError(f"occupation radius must be positive, got {r}")
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    params = {"d": d, "r": r, "cells_per_radius": cells_per_radius}
    if points.shape[0] == 0:
        return AtomicMeasure(np.zeros((0, 2)), np.zeros(0), params)

    h = r / cells_per_radius
    lo = points.min(axis=0) - r
    hi = points.max(axis=0) + r
    xs = lo[0] + h * (np.arange(int(np.ceil((hi[0] - lo[0]) / h))) + 0.5)
    ys = lo[1] + h * (np.arange(int(np.ceil((hi[1] - lo[1]) / h))) + 0.5)
    tree = cKDTree(points)

    centres = []
    for y in ys:
        row = np.column_stack([xs, np.full(xs.shape, y)])
        near, _ = tree.query(row, distance_upper_bound=r * (1 + 1e-12))
        centres.append(row[np.isfinite(near)])
    centres = np.vstack(centres)
    masses = np.full(centres.shape[0], r ** (d - 2) * h * h)
    return AtomicMeasure(centres, masses, params)
