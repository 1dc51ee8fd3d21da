from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import linregress

from field.gff import (
    C_TRIANGULAR,
    FieldSample,
    GffSampler,
    calibrate_c_T,
    circle_average,
    circle_averages,
    circle_weights,
    interpolation_matrix,
)
from field.gmc import ALPHA, GAMMA, boundary_measure, clock_rates, gmc_measure
from lattice.domain import build_lattice_domain
from pivotal.measures import FourArmEstimate
from state.errors import RegularizationTooFine, ValidationError


@pytest.fixture
def sampler(disk):
    return GffSampler(disk)


def test_samples_vanish_on_the_boundary(disk, sampler, rng):
    field = sampler.sample(rng)
    assert np.all(field.values[: disk.boundary_length] == 0)
    assert np.any(field.values[disk.boundary_length:] != 0)
    assert field.c_T == C_TRIANGULAR


def test_covariance_is_symmetric(disk, sampler):
    u, v = disk.boundary_length + 3, disk.boundary_length + disk.n_inner // 2
    cu, cv = sampler.covariance_column(u), sampler.covariance_column(v)
    assert cu[v] == pytest.approx(cv[u], rel=1e-10)
    assert cu[u] > cu[v] > 0
    assert np.all(sampler.covariance_column(0) == 0)


def test_sample_variance_matches_covariance(disk, sampler):
    rng = np.random.default_rng(17)
    v = disk.vertex_id((0, 0))
    draws = np.array([sampler.sample(rng).values[v] for _ in range(4000)])
    # the sample variance of N = 4000 normals has relative sd √(2/N) ≈ 2.2%
    assert draws.var() == pytest.approx(sampler.covariance_column(v)[v], rel=0.1)


def test_zero_field(disk):
    zero = FieldSample.zero(disk)
    assert circle_average(zero, (0.0, 0.0), 0.3) == 0.0
    shifted = zero.shifted(1.5)
    assert circle_average(shifted, (0.0, 0.0), 0.3) == 1.5
    assert shifted.offset == 1.5 and zero.offset == 0.0


def test_circle_average_leaves_the_domain(disk, sampler, rng):
    field = sampler.sample(rng).shifted(0.25)
    # the circle around (0.9, 0) of radius 0.3 crosses the unit circle
    assert circle_average(field, (0.9, 0.0), 0.3) == 0.25
    inside = circle_averages(field, [(0.0, 0.0), (0.2, 0.1)], 0.3)
    assert inside.shape == (2,)


def test_interpolation_hits_vertices(disk, sampler, rng):
    field = sampler.sample(rng)
    inner = disk.positions[disk.boundary_length:disk.boundary_length + 20]
    assert np.allclose(field.interpolate(inner), field.values[disk.boundary_length:disk.boundary_length + 20])


def test_gmc_of_zero_field(disk):
    zero = FieldSample.zero(disk)
    r = 4 * disk.h
    measure = gmc_measure(zero, GAMMA)
    assert np.allclose(measure.masses, r ** (GAMMA ** 2 / 2) * disk.hexagon_area)
    assert measure.params["r"] == r
    # h_r is pinned to 0 on the boundary, which carries no area
    assert measure.locations.tolist() == list(range(disk.boundary_length, disk.n_vertices))
    assert measure.total == pytest.approx(r ** (GAMMA ** 2 / 2) * disk.hexagon_area * disk.n_inner)


def test_gmc_shift_identity(disk, sampler, rng):
    field = sampler.sample(rng)
    base = gmc_measure(field, GAMMA)
    for c in (-1.0, 0.5, 2.0):
        moved = gmc_measure(field.shifted(c), GAMMA)
        assert np.allclose(moved.masses, np.exp(GAMMA * c) * base.masses, rtol=1e-12, atol=0)
    edge = boundary_measure(field, GAMMA)
    assert np.allclose(boundary_measure(field.shifted(1.0), GAMMA).masses, np.exp(GAMMA / 2) * edge.masses, rtol=1e-12, atol=0)


def test_gmc_checks(disk):
    zero = FieldSample.zero(disk)
    with pytest.raises(RegularizationTooFine):
        gmc_measure(zero, GAMMA, r=disk.h)
    with pytest.raises(ValidationError):
        gmc_measure(zero, 2.0)
    with pytest.raises(ValidationError):
        gmc_measure(zero, 0.0)


def test_clock_rates(disk):
    zero = FieldSample.zero(disk)
    alpha4 = FourArmEstimate(disk.delta, 0.5, 100, 25)
    rates = clock_rates(zero, alpha4)
    assert rates.locations.tolist() == list(range(disk.boundary_length, disk.n_vertices))
    r = 4 * disk.h
    assert np.allclose(rates.masses, r ** (ALPHA ** 2 / 2) * disk.hexagon_area / 0.25)
    assert np.allclose(clock_rates(zero, 0.25).masses, rates.masses)
    with pytest.raises(ValidationError):
        clock_rates(zero, 0.0)


def test_calibration_is_positive(disk):
    result = calibrate_c_T(disk, [0.15, 0.3, 0.6], 400, np.random.default_rng(2))
    assert result.slope > 0
    assert result.c_T == pytest.approx(1 / result.slope)
    assert len(result.variances) == 3
    assert result.to_json()["analytic"] == C_TRIANGULAR


def test_interpolation_weights_sum_to_one(disk):
    points = np.array([[0.0, 0.0], [0.31, -0.2], [0.5, 0.5], [3.0, 0.0]])
    weights = interpolation_matrix(disk, points)
    assert np.allclose(np.asarray(weights.sum(axis=1)).ravel(), [1.0, 1.0, 1.0, 0.0])
    assert np.all(weights.data >= -1e-12)


def test_exact_variance(disk, sampler):
    v = disk.vertex_id((1, 1))
    e = np.zeros(disk.n_vertices)
    e[v] = 1.0
    assert sampler.variance(e) == pytest.approx(sampler.covariance_column(v)[v], rel=1e-10)
    w = circle_weights(disk, (0.0, 0.0), 0.3)
    assert w.sum() == pytest.approx(1.0)
    assert not circle_weights(disk, (0.9, 0.0), 0.3).any()


def test_circle_variance_grows_like_log():
    fine = build_lattice_domain({"type": "disk", "radius": 1.0}, Fraction(1, 64))
    sampler = GffSampler(fine)
    radii = [1 / 16, 1 / 8, 1 / 4]
    exact = [sampler.variance(circle_weights(fine, (0.0, 0.0), r)) for r in radii]
    slope = linregress(np.log(1 / np.array(radii)), exact).slope
    assert abs(slope - 1) < 0.1
    calibration = calibrate_c_T(fine, radii, None, None)
    assert calibration.samples == 0
    assert calibration.slope * C_TRIANGULAR == pytest.approx(slope, rel=1e-9)
