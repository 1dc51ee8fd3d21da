from fractions import Fraction

import numpy as np
import pytest

from lattice.domain import axial_to_plane, rhombus_domain
from maps.triangulation import Triangulation
from percolation.coloring import BoundaryCondition, Coloring, sample_percolation
from percolation.loops import loop_ensemble
from pivotal.arms import (
    AnnulusSpec,
    ArmBox,
    alternating_arms_by_flow,
    colour_changes,
    has_alternating_arms,
    importance_scale,
    is_A_important,
    rho_important_set,
)
from pivotal.flips import eps_pivotal_mask, is_eps_pivotal, loop_symmetric_difference, neighbour_changes
from pivotal.measures import FourArmEstimate, four_arm_probability, occupation_estimate, pivotal_measure
from state.errors import BoundaryVertex, BudgetExceeded, ValidationError, VertexOutsideBox


def _candidates(tri, coloring):
    return [int(v) for v in tri.inner_vertices if neighbour_changes(tri, coloring.red, int(v)) >= 4]


# ── loop symmetric differences ──────────────────────────────────────────────
def test_flip_inside_a_blue_sea(disk):
    all_blue = Coloring.from_inner(np.zeros(disk.n_inner, dtype=bool), BoundaryCondition.blue(), disk.boundary_length)
    v = disk.boundary_length + disk.n_inner // 2
    diff = loop_symmetric_difference(disk, all_blue, v)
    assert len(diff.removed) == 0
    assert len(diff.added) == 1
    assert diff.added[0].region.tolist() == [v]
    back = loop_symmetric_difference(disk, all_blue.flipped(v), v)
    assert len(back.removed) == 1 and len(back.added) == 0
    assert back.keys == diff.keys


def test_difference_matches_full_recomputation(rhombus, rng):
    coloring = sample_percolation(rhombus, BoundaryCondition.blue(), rng)
    before = loop_ensemble(rhombus, coloring)
    for v in rhombus.triangulation.inner_vertices:
        v = int(v)
        after = loop_ensemble(rhombus, coloring.flipped(v))
        assert loop_symmetric_difference(rhombus, coloring, v).keys == before.keys ^ after.keys


def test_boundary_vertices_cannot_flip(disk, rng):
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    with pytest.raises(BoundaryVertex):
        loop_symmetric_difference(disk, coloring, 0)
    with pytest.raises(BoundaryVertex):
        is_eps_pivotal(disk, coloring, 0, 1.0)
    with pytest.raises(ValueError):
        is_eps_pivotal(disk, coloring, disk.boundary_length, -1.0)


def test_pivotality_is_flip_symmetric(disk):
    rng = np.random.default_rng(21)
    area = np.full(disk.n_vertices, 0.1)
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    tri = disk.triangulation
    for v in _candidates(tri, coloring)[:25]:
        diff = loop_symmetric_difference(tri, coloring, v, area)
        # cutoffs equal to loop areas are the boundary case of the ≥ comparison
        for eps in [0.0, *diff.areas.tolist()]:
            assert is_eps_pivotal(tri, coloring, v, eps, area) == is_eps_pivotal(tri, coloring.flipped(v), v, eps, area)


def test_pivotal_masks_shrink_with_eps(disk, rng):
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    masks = [eps_pivotal_mask(disk, coloring, eps) for eps in (0.0, 3.0, 10.0, float("inf"))]
    for wide, narrow in zip(masks, masks[1:]):
        assert not np.any(narrow & ~wide)
    assert not masks[-1].any()
    assert not masks[0][: disk.boundary_length].any()
    changes = np.array([neighbour_changes(disk.triangulation, coloring.red, v) for v in range(disk.boundary_length, disk.n_vertices)])
    assert np.all(changes[masks[0][disk.boundary_length:]] >= 4)


# ── arm events ──────────────────────────────────────────────────────────────
def test_colour_changes():
    assert colour_changes([True, False, True, False, None, None]) == 4
    assert colour_changes([True, True, None, False, False, False]) == 2
    assert colour_changes([None, True, None, None, None, None]) == 0


def test_arm_box_layout():
    box = ArmBox.build(1, 4.0)
    assert not box.allowed[box.center]
    assert not np.any(box.exits & ~box.allowed)
    assert box.exits.any()
    assert not box.event(np.ones(box.allowed.shape, dtype=bool))


def test_quadrant_coloring_has_four_arms():
    box = ArmBox.build(1, 5.0)
    ii, jj = np.meshgrid(np.arange(box.allowed.shape[0]), np.arange(box.allowed.shape[1]), indexing="ij")
    axial = np.column_stack([ii.ravel() - box.center[0], jj.ravel() - box.center[1]])
    xy = axial_to_plane(axial, 1).reshape(*box.allowed.shape, 2)
    red = xy[..., 0] * xy[..., 1] > 1e-9
    assert box.event(red)
    assert alternating_arms_by_flow(red, box.allowed, box.exits, box.center)


def test_arm_detection_agrees_with_flow_oracle():
    box = ArmBox.build(1, 4.0)
    rng = np.random.default_rng(13)
    hits = 0
    for _ in range(150):
        red = rng.random(box.allowed.shape) < 0.5
        fast = has_alternating_arms(red, box.allowed, box.exits, box.center)
        assert fast == alternating_arms_by_flow(red, box.allowed, box.exits, box.center)
        hits += fast
    assert 0 < hits < 150


def test_four_arm_estimate():
    estimate = FourArmEstimate(Fraction(1, 4), 1.0, 100, 20)
    assert estimate.p == 0.2
    assert estimate.se == pytest.approx(0.04)
    assert estimate.inverse == 5.0
    with pytest.raises(BudgetExceeded):
        _ = FourArmEstimate(Fraction(1, 4), 1.0, 100, 0).inverse


def test_four_arm_probability():
    one = four_arm_probability(1, 3.0, 600, np.random.default_rng(3), threads=1, batch_size=200)
    two = four_arm_probability(1, 3.0, 600, np.random.default_rng(3), threads=2, batch_size=200)
    assert one.hits == two.hits
    assert 0 < one.p < 1
    with pytest.raises(ValidationError):
        four_arm_probability(1, 1.0, 10, np.random.default_rng(0))


# ── important points ────────────────────────────────────────────────────────
def test_importance_scale():
    assert importance_scale(1e-4) == pytest.approx(1e-4)
    assert importance_scale(0.01) == pytest.approx(1e-3)


def test_rho_important_points_are_candidates(disk, rng):
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    important = rho_important_set(disk, coloring, 0.25)
    assert np.all(important >= disk.boundary_length)
    assert np.all(np.diff(important) > 0)
    for v in important:
        assert neighbour_changes(disk.triangulation, coloring.red, int(v)) >= 4
    with pytest.raises(ValueError):
        rho_important_set(disk, coloring, 0.0)


def _quadrant_coloring(domain):
    """Red on the open first and third quadrants, blue elsewhere."""
    inner = domain.positions[domain.boundary_length:]
    red = inner[:, 0] * inner[:, 1] > 1e-9
    return Coloring.from_inner(red, BoundaryCondition.blue(), domain.boundary_length)


def test_importance_scale_floor():
    assert importance_scale(0.5, Fraction(1, 8)) == 0.125
    assert importance_scale(4e4, Fraction(1, 8)) == pytest.approx(2.0)


def test_eps_pivotal_points_are_rho_important(disk):
    eps = 0.5
    area = np.full(disk.n_vertices, disk.hexagon_area)
    rho = importance_scale(eps, disk.delta)
    quadrants = _quadrant_coloring(disk)
    centre = disk.vertex_id((0, 0))
    # flipping the centre merges the two red quadrants: both quadrant loops and the merged loop are large
    assert eps_pivotal_mask(disk, quadrants, eps, area)[centre]

    colorings = [quadrants] + [sample_percolation(disk, BoundaryCondition.blue(), np.random.default_rng(s)) for s in range(3)]
    for coloring in colorings:
        pivotal = np.flatnonzero(eps_pivotal_mask(disk, coloring, eps, area))
        important = rho_important_set(disk, coloring, rho)
        assert set(pivotal.tolist()) <= set(important.tolist())


def test_important_sets_are_nested():
    domain = rhombus_domain(24, Fraction(1, 8))
    rng = np.random.default_rng(5)
    found = 0
    for _ in range(3):
        coloring = sample_percolation(domain, BoundaryCondition.blue(), rng)
        coarse = rho_important_set(domain, coloring, 10 * domain.h)
        fine = rho_important_set(domain, coloring, domain.h)
        assert set(coarse.tolist()) <= set(fine.tolist())
        found += coarse.size
    assert found > 0


def test_annulus_needs_the_vertex_inside(disk, rng):
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    far = AnnulusSpec((5.0, 5.0), 0.1)
    with pytest.raises(VertexOutsideBox):
        is_A_important(disk, coloring, disk.boundary_length, far)


# ── measures ────────────────────────────────────────────────────────────────
def test_pivotal_measure_of_a_bare_triangle():
    bare = Triangulation.from_faces([(0, 1, 2)], boundary_length=3, n_vertices=3)
    coloring = Coloring.from_inner(np.zeros(0, dtype=bool), BoundaryCondition.blue(), 3)
    measure = pivotal_measure(bare, coloring, 0.0)
    assert len(measure) == 0
    assert measure.total == 0.0
    assert measure.params["n"] == 0


def test_map_pivotal_measure(small_map, rng):
    coloring = sample_percolation(small_map, BoundaryCondition.blue(), rng)
    measure = pivotal_measure(small_map, coloring, 0.0)
    n = small_map.n_inner
    assert np.all(measure.masses == n ** -0.25)
    assert np.all(measure.locations >= small_map.boundary_length)
    assert measure.params["mode"] == "map"


def test_lattice_pivotal_measure(rhombus, rng):
    coloring = sample_percolation(rhombus, BoundaryCondition.blue(), rng)
    alpha4 = FourArmEstimate(rhombus.delta, 0.5, 100, 10)
    measure = pivotal_measure(rhombus, coloring, 0.0, "lattice", alpha4=alpha4)
    assert np.allclose(measure.masses, rhombus.hexagon_area * 10)
    mask = eps_pivotal_mask(rhombus, coloring, 0.0, np.full(rhombus.n_vertices, rhombus.hexagon_area))
    assert measure.locations.tolist() == np.flatnonzero(mask).tolist()
    with pytest.raises(ValidationError):
        pivotal_measure(rhombus, coloring, 0.0, "lattice")
    with pytest.raises(ValidationError):
        pivotal_measure(rhombus.triangulation, coloring, 0.0, "lattice", alpha4=alpha4)


def test_occupation_measure_of_one_point():
    disk_area = occupation_estimate([[0.0, 0.0]], 2.0, 1.0)
    assert disk_area.total == pytest.approx(np.pi, rel=0.02)
    scaled = occupation_estimate([[0.0, 0.0]], 1.0, 0.5)
    assert scaled.total == pytest.approx(np.pi * 0.25 / 0.5, rel=0.02)
    assert np.all(np.linalg.norm(disk_area.locations, axis=1) <= 1.0 + 1e-9)
    assert len(occupation_estimate(np.zeros((0, 2)), 1.5, 0.1)) == 0
    with pytest.raises(ValueError):
        occupation_estimate([[0.0, 0.0]], 0.0, 1.0)
