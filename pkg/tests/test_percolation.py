from fractions import Fraction

import numpy as np
import pytest

from conftest import is_simple
from lattice.domain import Quad, rhombus_domain
from maps.decomposition import enumerate_triangulations
from maps.triangulation import MarkedTriangulation
from percolation.coloring import BoundaryCondition, Coloring, monochromatic_clusters, sample_percolation
from percolation.crossing import crossing_flags, event_mask, loop_erase, quad_crossing, rhombus_quad
from percolation.interface import interface
from percolation.loops import coloring_from_loops, loop_ensemble
from percolation.oracle import (
    brute_force_probability,
    exact_crossing_counts,
    exact_crossing_probabilities,
    path_search_event,
)
from state.errors import BoundaryConditionMismatch, InconsistentLoops, TooManyVertices
from state.schema import Color


# ── colorings ───────────────────────────────────────────────────────────────
def test_boundary_conditions():
    assert BoundaryCondition.blue().boundary_red(4).tolist() == [False] * 4
    assert BoundaryCondition.red().boundary_red(3).tolist() == [True] * 3
    # arc (1, 3) of the 5-gon is vertices 2, 3; those are blue, the rest red
    assert BoundaryCondition.arc_pair(1, 3).boundary_red(5).tolist() == [True, True, False, False, True]
    with pytest.raises(BoundaryConditionMismatch):
        BoundaryCondition.explicit([1, 0]).boundary_red(3)


def test_coloring_checks_its_boundary():
    with pytest.raises(BoundaryConditionMismatch):
        Coloring(np.array([1, 0, 0, 0], dtype=bool), BoundaryCondition.blue(), 3)


def test_flip_twice_is_identity(disk, rng):
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    v = disk.boundary_length + 5
    once = coloring.flipped(v)
    assert once != coloring
    assert once.red[v] != coloring.red[v]
    assert once.flipped(v) == coloring


def test_swap_exchanges_colors(disk, rng):
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    swapped = coloring.swapped()
    assert swapped.boundary_condition == BoundaryCondition.red()
    assert np.array_equal(swapped.red, ~coloring.red)
    assert swapped.swapped() == coloring


def test_free_boundary_is_sampled(rhombus):
    rng = np.random.default_rng(5)
    boundary = np.array([sample_percolation(rhombus, None, rng).red[: rhombus.boundary_length] for _ in range(400)])
    # 400·24 Bernoulli-½ boundary sites
    assert boundary.mean() == pytest.approx(0.5, abs=0.03)


def test_inner_sites_are_fair(disk):
    rng = np.random.default_rng(6)
    fractions = [sample_percolation(disk, BoundaryCondition.blue(), rng).inner_red.mean() for _ in range(200)]
    sigma = 0.5 / np.sqrt(200 * disk.n_inner)
    assert np.mean(fractions) == pytest.approx(0.5, abs=4 * sigma)


# ── Hex theorem ─────────────────────────────────────────────────────────────
def test_exactly_one_color_crosses_the_rhombus():
    rng = np.random.default_rng(8)
    side = 7
    domain = rhombus_domain(side)
    left_right = rhombus_quad(domain, side)
    bottom_top = Quad(domain, tuple(domain.vertex_id(p) for p in [(0, 0), (side, 0), (side, side), (0, side)]))
    for _ in range(100):
        coloring = sample_percolation(domain, None, rng)
        assert quad_crossing(domain, coloring, left_right) != quad_crossing(domain, coloring.swapped(), bottom_top)


def test_monochromatic_clusters(cone):
    count, label = monochromatic_clusters(cone, np.array([0, 0, 0, 1], dtype=bool))
    assert count == 2
    assert label[3] != label[0]
    assert len({label[0], label[1], label[2]}) == 1


# ── loops ───────────────────────────────────────────────────────────────────
def test_no_loops_without_red(disk):
    coloring = Coloring.from_inner(np.zeros(disk.n_inner, dtype=bool), BoundaryCondition.blue(), disk.boundary_length)
    assert len(loop_ensemble(disk, coloring)) == 0


def test_single_red_vertex_has_one_loop(disk):
    v = disk.boundary_length + disk.n_inner // 2
    coloring = Coloring.from_inner(np.zeros(disk.n_inner, dtype=bool), BoundaryCondition.blue(), disk.boundary_length).flipped(v)
    ensemble = loop_ensemble(disk, coloring)
    assert len(ensemble) == 1
    loop = ensemble[0]
    assert loop.region.tolist() == [v]
    assert loop.area == 1.0
    assert len(loop) == 6
    assert loop.color is Color.RED
    assert loop.parent == -1


def test_loops_match_clusters(disk, rng):
    for _ in range(5):
        coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
        ensemble = loop_ensemble(disk, coloring)
        assert len(ensemble) == ensemble.n_clusters - 1
        for loop in ensemble:
            assert loop.cluster in ensemble.cluster_of[loop.region]
            assert loop.area == len(loop.region)
            if loop.parent >= 0:
                parent = ensemble[loop.parent]
                assert parent.color is not loop.color
                assert set(loop.region.tolist()) < set(parent.region.tolist())
            else:
                assert loop.color is Color.RED


def test_loops_determine_the_coloring(disk, rng):
    for bc in (BoundaryCondition.blue(), BoundaryCondition.red()):
        coloring = sample_percolation(disk, bc, rng)
        ensemble = loop_ensemble(disk, coloring)
        assert coloring_from_loops(disk, ensemble, bc.monochromatic_color) == coloring


def test_inconsistent_loops_are_rejected(disk, rng):
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    loops = [loop for loop in loop_ensemble(disk, coloring)]
    half = loops[0].half_edges
    broken = [half[: len(half) // 2]] + [loop.half_edges for loop in loops[1:]]
    with pytest.raises(InconsistentLoops):
        coloring_from_loops(disk, broken)


def test_loop_areas_use_weights(disk, rng):
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    counted = loop_ensemble(disk, coloring)
    weighted = loop_ensemble(disk, coloring, np.full(disk.n_vertices, disk.hexagon_area))
    assert np.allclose(weighted.areas, counted.areas * disk.hexagon_area)


def test_loops_need_monochromatic_boundary(rhombus, rng):
    with pytest.raises(BoundaryConditionMismatch):
        loop_ensemble(rhombus, sample_percolation(rhombus, None, rng))


# ── interfaces ──────────────────────────────────────────────────────────────
def test_interface_separates_colors(disk, rng):
    ell = disk.boundary_length
    e, e_end = 0, ell // 2
    coloring = sample_percolation(disk, BoundaryCondition.blue(), rng)
    path = interface(disk, e, e_end, coloring)
    red = np.concatenate([BoundaryCondition.arc_pair(e, e_end).boundary_red(ell), coloring.inner_red])
    assert red[path.left].all()
    assert not red[path.right].any()
    tri = disk.triangulation
    assert path.half_edges[0] == tri.boundary_half_edges[e]
    assert path.half_edges[-1] == tri.twin[tri.boundary_half_edges[e_end]]
    assert len(set(tri.edge_of[path.half_edges].tolist())) == len(path)
    with pytest.raises(ValueError):
        interface(disk, 3, 3 + ell, coloring)


# ── crossing events and oracles ─────────────────────────────────────────────
def test_loop_erase():
    assert loop_erase([1, 2, 3, 2, 4]) == [1, 2, 4]
    assert loop_erase([1, 2, 1, 3]) == [1, 3]


def test_cone_probabilities(marked_cone):
    probabilities = exact_crossing_probabilities(marked_cone)
    assert probabilities[3] == (Fraction(1, 2),) * 3
    assert probabilities[0] == (1, 0, 1)
    assert probabilities[1] == (1, 1, 0)
    assert probabilities[2] == (0, 1, 1)


def test_event_mask_agrees_with_path_search():
    for ell, n in [(3, 2), (4, 2), (5, 1)]:
        for tri in filter(is_simple, enumerate_triangulations(ell, n)):
            marks = [(0, 1, 2), (0, ell - 2, ell - 1)]
            for a, b, c in {m for m in marks if len(set(m)) == 3}:
                for bits in range(1 << n):
                    inner = ((bits >> np.arange(n)) & 1).astype(bool)
                    red = np.concatenate([np.zeros(ell, dtype=bool), inner])
                    assert np.array_equal(event_mask(tri, inner, a, b, c), path_search_event(tri, red, a, b, c))


def test_events_ignore_boundary_colors(small_map, rng):
    marked = MarkedTriangulation(small_map, 0, 1, 2)
    coloring = sample_percolation(small_map, None, rng)
    flags = crossing_flags(marked, coloring)
    again = crossing_flags(marked, coloring.with_boundary(BoundaryCondition.blue()))
    assert np.array_equal(flags.as_array(), again.as_array())


def test_exact_counts_are_integers(small_map):
    counts, total = exact_crossing_counts(MarkedTriangulation(small_map, 0, 1, 3))
    assert total == 1 << small_map.n_inner
    assert counts.shape == (small_map.n_vertices, 3)
    assert counts.min() >= 0 and counts.max() <= total


def test_brute_force_probability(cone):
    assert brute_force_probability(cone, lambda c: bool(c.red[3])) == Fraction(1, 2)
    with pytest.raises(TooManyVertices):
        brute_force_probability(cone, lambda c: True, max_inner=0)
