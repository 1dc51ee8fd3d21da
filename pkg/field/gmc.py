"""
Regularized Gaussian multiplicative chaos on a δ-polygon.

Masses are taken at a fixed regularization radius r (default 4δ) rather
than in the r → 0 limit; every measure records (exponent, r, δ).
"""

from math import sqrt

import numpy as np

from field.gff import FieldSample, circle_averages, clipped_averages
from state.errors import RegularizationTooFine, ValidationError
from state.schema import AtomicMeasure
from utils.rationals import fraction_str

GAMMA = sqrt(8 / 3)     # area/boundary measure exponent
ALPHA = 1 / sqrt(6)     # clock measure exponent


def _check_exponent(exponent: float) -> None:
    if not 0 < exponent < 2:
        raise ValidationError(f"GMC exponent must lie in (0, 2), got {exponent}")


def _radius(field: FieldSample, r: float | None, factor: float) -> float:
    delta = field.domain.h
    r = factor * delta if r is None else float(r)
    if r < 2 * delta:
        raise RegularizationTooFine(
            f"regularization radius r={r} is below 2δ={2 * delta}; raise field.regularization_factor"
        )
    return r


def gmc_measure(
    field: FieldSample,
    exponent: float = GAMMA,
    r: float | None = None,
    points: int = 64,
    regularization_factor: float = 4.0,
) -> AtomicMeasure:
    """
    Mass r^{a²/2}·exp(a·h_r(v))·(hexagon area) at every inner vertex v.
    Boundary vertices carry no mass, so the total of the zero field is
    r^{a²/2} times the area of the inner hexagons.
    """
    _check_exponent(exponent)
    r = _radius(field, r, regularization_factor)
    domain = field.domain
    inner = np.arange(domain.boundary_length, domain.n_vertices)
    h_r = circle_averages(field, domain.positions[inner], r, points)
    masses = r ** (exponent ** 2 / 2) * np.exp(exponent * h_r) * domain.hexagon_area
    params = {"kind": "gmc", "exponent": exponent, "r": r, "delta": fraction_str(domain.delta), "c_T": field.c_T}
    return AtomicMeasure(inner, masses, params)


def boundary_measure(
    field: FieldSample,
    gamma: float = GAMMA,
    r: float | None = None,
    points: int = 64,
    regularization_factor: float = 4.0,
) -> AtomicMeasure:
    """
    Mass r^{γ²/8}·exp(γ·h_r(v)/2)·δ at every boundary vertex, with h_r the
    average over the arc of the circle that lies inside the domain.
    """
    _check_exponent(gamma)
    r = _radius(field, r, regularization_factor)
    domain = field.domain
    ell = domain.boundary_length
    h_r = clipped_averages(field, domain.positions[:ell], r, points)
    masses = r ** (gamma ** 2 / 8) * np.exp(gamma * h_r / 2) * domain.h
    params = {"kind": "boundary_gmc", "gamma": gamma, "r": r, "delta": fraction_str(domain.delta), "c_T": field.c_T}
    return AtomicMeasure(np.arange(ell), masses, params)


def clock_rates(field: FieldSample, alpha4, r: float | None = None, points: int = 64, regularization_factor: float = 4.0) -> AtomicMeasure:
    """
    Flip rates μ'_h(v)·α₄^{-1} of Liouville dynamical percolation on inner
    vertices; `alpha4` is a FourArmEstimate or a positive number.
    """
    plain = isinstance(alpha4, (int, float))
    p = float(alpha4) if plain else alpha4.p
    if p <= 0:
        raise ValidationError(f"four-arm estimate must be positive, got {p}")
    clock = gmc_measure(field, ALPHA, r, points, regularization_factor)
    params = {**clock.params, "kind": "clock_rates", "alpha4": p if plain else alpha4.to_json()}
    return AtomicMeasure(clock.locations, clock.masses / p, params)
