import numpy as np
import pytest

from dynamics import (
    CutoffFlips,
    UnconditionalFlips,
    build_exact_ctmc,
    create_policy,
    jump_skeleton,
    run_dynamics,
    run_eps_cutoff,
    state_coloring,
    state_index,
    two_time_correlation,
    uniform_rates,
)
from percolation.coloring import BoundaryCondition, Coloring, sample_percolation
from pivotal.flips import is_eps_pivotal
from state.errors import CapExceeded, TooManyStates, ValidationError


def _all_blue(tri):
    return Coloring.from_inner(np.zeros(tri.n_inner, dtype=bool), BoundaryCondition.blue(), tri.boundary_length)


# ── Gillespie runner ────────────────────────────────────────────────────────
def test_ring_count_is_poisson(cone):
    rates = uniform_rates(cone.inner_vertices, 1.0)
    trajectory = run_dynamics(_all_blue(cone), rates, 2000.0, np.random.default_rng(11))
    # Poisson(2000) has sd ≈ 44.7
    assert abs(len(trajectory) - 2000) < 180
    assert np.all(np.diff(trajectory.times) > 0)
    assert np.all(trajectory.vertices == 3)
    assert trajectory.n_applied == len(trajectory)


def test_replay_matches_cutoff_decisions(small_map, rng):
    initial = sample_percolation(small_map, BoundaryCondition.blue(), rng)
    rates = uniform_rates(small_map.inner_vertices, 1.0)
    trajectory = run_eps_cutoff(initial, rates, 1.0, None, 30.0, rng, small_map)
    current = initial
    for t, v, applied in zip(trajectory.times, trajectory.vertices, trajectory.applied):
        assert is_eps_pivotal(small_map, current, int(v), 1.0) == applied
        if applied:
            current = current.flipped(int(v))
        assert trajectory.coloring_at(t) == current
    assert trajectory.final_coloring() == current
    assert trajectory.header()["policy"]["mode"] == "cutoff"


def test_infinite_cutoff_never_flips(small_map, rng):
    initial = sample_percolation(small_map, BoundaryCondition.blue(), rng)
    rates = uniform_rates(small_map.inner_vertices, 1.0)
    trajectory = run_eps_cutoff(initial, rates, float("inf"), None, 20.0, rng, small_map)
    assert len(trajectory) > 0
    assert trajectory.n_applied == 0
    assert trajectory.final_coloring() == initial


def test_event_cap(cone):
    rates = uniform_rates(cone.inner_vertices, 1.0)
    with pytest.raises(CapExceeded):
        run_dynamics(_all_blue(cone), rates, 100.0, np.random.default_rng(0), max_events=5)


def test_zero_rates_give_a_constant_trajectory(cone, capsys):
    trajectory = run_dynamics(_all_blue(cone), uniform_rates(cone.inner_vertices, 0.0), 10.0, np.random.default_rng(0))
    assert len(trajectory) == 0
    assert trajectory.final_coloring() == _all_blue(cone)
    assert "Warning" in capsys.readouterr().out


def test_runner_checks_its_inputs(cone):
    rng = np.random.default_rng(0)
    with pytest.raises(ValidationError):
        run_dynamics(_all_blue(cone), uniform_rates([0], 1.0), 1.0, rng)
    with pytest.raises(ValueError):
        run_dynamics(_all_blue(cone), uniform_rates(cone.inner_vertices, 1.0), -1.0, rng)


def test_event_lines(cone):
    trajectory = run_dynamics(_all_blue(cone), uniform_rates(cone.inner_vertices, 1.0), 3.0, np.random.default_rng(4))
    lines = list(trajectory.event_lines())
    assert len(lines) == len(trajectory)
    if lines:
        assert '"v": 3' in lines[0]


def test_policy_factory(small_map):
    assert isinstance(create_policy({"mode": "full"}), UnconditionalFlips)
    cutoff = create_policy({"mode": "cutoff", "eps": 2.0}, small_map)
    assert isinstance(cutoff, CutoffFlips)
    assert cutoff.describe() == {"mode": "cutoff", "eps": 2.0, "area": "counting"}
    with pytest.raises(ValueError):
        create_policy({"mode": "cutoff"})
    with pytest.raises(ValueError, match="Unknown dynamics mode"):
        create_policy({"mode": "glauber"})
    with pytest.raises(ValueError):
        CutoffFlips(small_map, -1.0)


# ── exact chain ─────────────────────────────────────────────────────────────
def test_state_index_round_trip(small_map):
    bc = BoundaryCondition.blue()
    k, ell = small_map.n_inner, small_map.boundary_length
    for s in range(1 << k):
        assert state_index(state_coloring(s, k, ell, bc)) == s


@pytest.mark.parametrize("eps", [None, 0.0, 1.0, 2.0])
def test_generator_is_symmetric(small_map, eps):
    chain = build_exact_ctmc(small_map, eps, uniform_rates(small_map.inner_vertices, 1.0))
    assert chain.n_states == 1 << small_map.n_inner
    assert np.array_equal(chain.Q, chain.Q.T)
    assert np.allclose(chain.Q.sum(axis=1), 0)
    if eps is None:
        assert np.allclose(chain.exit_rates, small_map.n_inner)


def test_jump_skeleton_rows(small_map):
    chain = build_exact_ctmc(small_map, 1.0, uniform_rates(small_map.inner_vertices, 1.0))
    skeleton = jump_skeleton(chain)
    moving = np.setdiff1d(np.arange(chain.n_states), skeleton.absorbing)
    assert np.allclose(skeleton.P[moving].sum(axis=1), 1)
    assert np.all(skeleton.P[skeleton.absorbing] == 0)
    assert np.all(np.diag(skeleton.P) == 0)


def test_uniform_start_is_time_reversible(small_map):
    chain = build_exact_ctmc(small_map, 0.0, uniform_rates(small_map.inner_vertices, 1.0))
    rng = np.random.default_rng(5)
    f, g = rng.random(chain.n_states), rng.random(chain.n_states)
    forward, backward = two_time_correlation(chain, f, g, 0.7)
    assert forward == pytest.approx(backward, rel=1e-9)


def test_exact_chain_is_capped(disk):
    with pytest.raises(TooManyStates):
        build_exact_ctmc(disk, None, uniform_rates(disk.triangulation.inner_vertices, 1.0))
