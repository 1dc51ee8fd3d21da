from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from maps.boltzmann import BoltzmannSampler, sample_marked_edges
from maps.counting import BOLTZMANN_WEIGHT, closed_form_count, count_triangulations, log_count
from maps.decomposition import enumerate_triangulations, sample_uniform
from maps.metric import graph_distances, metric_measure_data
from maps.triangulation import MarkedTriangulation, Triangulation, edge_arc
from state.errors import CapExceeded, ZeroInnerVertices


def test_small_counts():
    assert count_triangulations(3, 0) == 1
    assert count_triangulations(4, 0) == 2
    assert count_triangulations(3, 1) == 4
    assert count_triangulations(2, 0) == 1


@pytest.mark.parametrize("ell", [2, 3, 4, 5, 6])
def test_decomposition_matches_closed_form(ell):
    for n in range(6):
        assert count_triangulations(ell, n) == closed_form_count(ell, n)


def test_log_count_matches_exact():
    for ell, n in [(3, 4), (5, 2), (7, 6)]:
        assert log_count(ell, n) == pytest.approx(np.log(closed_form_count(ell, n)), rel=1e-10)


def test_cone_structure(cone):
    cone.validate()
    assert cone.n_inner == 1
    assert cone.n_edges == 6
    assert cone.n_faces == 4
    assert sorted(cone.neighbors_ccw(3)) == [0, 1, 2]
    assert cone.origin[cone.boundary_half_edges].tolist() == [0, 1, 2]


def test_json_keeps_the_map(cone):
    back = Triangulation.from_json(cone.to_json())
    assert back.canonical_code() == cone.canonical_code()


def test_from_faces_rejects_open_boundary():
    with pytest.raises(ValueError):
        Triangulation.from_faces([(0, 1, 3), (1, 2, 3)], boundary_length=3, n_vertices=4)


def test_triangle_with_one_inner_vertex_has_four_maps():
    maps = enumerate_triangulations(3, 1)
    assert len(maps) == 4
    assert len({m.canonical_code() for m in maps}) == 4
    for m in maps:
        m.validate()
        assert m.n_edges == 6
        assert m.n_faces - 1 == 3


@pytest.mark.parametrize("ell,n", [(3, 2), (4, 2), (5, 1), (4, 3)])
def test_enumeration_is_complete_and_distinct(ell, n):
    maps = enumerate_triangulations(ell, n)
    assert len(maps) == count_triangulations(ell, n)
    assert len({m.canonical_code() for m in maps}) == len(maps)
    for m in maps:
        m.validate()
        assert m.n_inner == n
        assert m.euler_characteristic() == 2


def test_enumeration_caps():
    with pytest.raises(CapExceeded):
        enumerate_triangulations(3, 9, cap=8)
    with pytest.raises(CapExceeded):
        enumerate_triangulations(6, 4, max_maps=10)


def test_uniform_sampler_is_uniform():
    rng = np.random.default_rng(11)
    classes = {m.canonical_code(): k for k, m in enumerate(enumerate_triangulations(3, 2))}
    assert len(classes) == 24
    draws = Counter(classes[sample_uniform(3, 2, rng).canonical_code()] for _ in range(4800))
    observed = [draws.get(k, 0) for k in range(len(classes))]
    assert chisquare(observed).pvalue > 1e-3


@pytest.mark.parametrize("ell,n", [(3, 6), (5, 10), (8, 20)])
def test_uniform_samples_are_valid(ell, n, rng):
    tri = sample_uniform(ell, n, rng)
    tri.validate()
    assert tri.n_inner == n
    assert tri.n_faces - 1 == 2 * n + ell - 2


def test_boltzmann_size_law():
    sampler = BoltzmannSampler(4)
    total = sum(sampler.probability_of_size(n) for n in range(sampler.n_max + 1))
    assert total == pytest.approx(1.0, abs=1e-12)
    ratio = sampler.probability_of_size(1) / sampler.probability_of_size(0)
    assert ratio == pytest.approx(count_triangulations(4, 1) / count_triangulations(4, 0) * BOLTZMANN_WEIGHT, rel=1e-9)
    assert sampler.metadata["tail_residual"] <= sampler.tail_tolerance


def test_boltzmann_sizes_follow_weights():
    sampler = BoltzmannSampler(4)
    rng = np.random.default_rng(3)
    sizes = np.array([sampler.sample_size(rng) for _ in range(20_000)])
    expected = np.array([sampler.probability_of_size(n) for n in range(4)])
    observed = np.array([np.count_nonzero(sizes == n) for n in range(4)])
    rest = len(sizes) - observed.sum()
    result = chisquare(np.append(observed, rest), np.append(expected, 1 - expected.sum()) * len(sizes))
    assert result.pvalue > 1e-3


def test_marked_edges_are_counterclockwise(small_map, rng):
    for _ in range(50):
        marked = sample_marked_edges(small_map, rng)
        assert marked.a == 0
        assert 0 < marked.b < marked.c < small_map.boundary_length


def test_marks_must_be_counterclockwise(small_map):
    with pytest.raises(ValueError):
        MarkedTriangulation(small_map, 0, 2, 1)
    rotated = MarkedTriangulation(small_map, 0, 1, 2).rotated()
    assert (rotated.a, rotated.b, rotated.c) == (1, 2, 0)


def test_edge_arc():
    assert edge_arc(5, 0, 2) == [1, 2]
    assert edge_arc(5, 3, 0) == [4, 0]
    assert edge_arc(3, 2, 0) == [0]
    with pytest.raises(ValueError):
        edge_arc(4, 1, 5)


def test_metric_measure_data(small_map):
    mmd = metric_measure_data(small_map)
    n = small_map.n_inner
    assert mmd.distance_scale == pytest.approx((3 * n / 4) ** -0.25)
    assert mmd.vertex_measure.total == pytest.approx(small_map.n_vertices / (2 * n))
    assert mmd.boundary_measure.total == pytest.approx(1.0)
    d = graph_distances(small_map)
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0)
    assert mmd.distance(0, 1) == pytest.approx(mmd.distance_scale)


def test_metric_needs_inner_vertices():
    with pytest.raises(ZeroInnerVertices):
        metric_measure_data(enumerate_triangulations(4, 0)[0])
