"""
Event-driven simulation of vertex-flip dynamics.

Every inner vertex carries an independent exponential clock. By
superposition the next ring anywhere comes after Exp(R), R = Σ rate(v),
and rings at v with probability rate(v)/R. Rings are recorded whether or
not the policy applies them.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from dynamics.policies import CutoffFlips, UnconditionalFlips
from dynamics.policy_base import FlipPolicy
from percolation.coloring import Coloring
from state.errors import CapExceeded, ValidationError
from state.schema import AtomicMeasure


@dataclass(frozen=True, eq=False)
class DynTrajectory:
    initial:  Coloring
    times:    np.ndarray
    vertices: np.ndarray
    applied:  np.ndarray
    horizon:  float
    rates:    dict = field(default_factory=dict)
    policy:   dict = field(default_factory=dict)

    def __len__(self):
        return int(self.times.shape[0])

    @property
    def n_applied(self) -> int:
        return int(np.count_nonzero(self.applied))

    def coloring_at(self, t: float) -> Coloring:
        """Configuration after every applied event with time ≤ t."""
        red = self.initial.red.copy()
        upto = np.searchsorted(self.times, t, side="right")
        hits = self.vertices[:upto][self.applied[:upto]]
        # a vertex flipped an even number of times is back to its initial color
        odd = np.bincount(hits, minlength=red.shape[0]) % 2 == 1
        red[odd] = ~red[odd]
        return Coloring(red, self.initial.boundary_condition, self.initial.boundary_length)

    def final_coloring(self) -> Coloring:
        return self.coloring_at(self.horizon)

    def event_lines(self):
        for t, v, a in zip(self.times, self.vertices, self.applied):
            yield json.dumps({"t": float(t), "v": int(v), "applied": bool(a)})

    def header(self) -> dict:
        return {
            "horizon": self.horizon,
            "events":  len(self),
            "applied": self.n_applied,
            "rates":   self.rates,
            "policy":  self.policy,
            "initial": self.initial.to_json(),
        }


def _rate_vector(rates: AtomicMeasure, initial: Coloring) -> tuple[np.ndarray, np.ndarray]:
    locations = np.asarray(rates.locations)
    if locations.ndim != 1:
        raise ValidationError("clock rates must be located at vertex ids")
    if locations.size and locations.min() < initial.boundary_length:
        raise ValidationError(
            f"clock rates put mass on boundary vertex {int(locations.min())}; boundary colors cannot flip"
        )
    return locations.astype(np.int64), rates.masses


def run_dynamics(
    initial: Coloring,
    rates: AtomicMeasure,
    horizon: float,
    rng: np.random.Generator,
    policy: FlipPolicy | None = None,
    max_events: int = 10_000_000,
    verbose: bool = False,
) -> DynTrajectory:
    """Gillespie simulation on [0, horizon]; unconditional flips unless a policy is given."""
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    policy = policy or UnconditionalFlips()
    locations, masses = _rate_vector(rates, initial)
    total = float(masses.sum())
    rate_info = dict(rates.params)

    if total == 0:
        print("[run_dynamics] Warning: total clock rate is 0; trajectory is constant")
        empty = np.zeros(0)
        return DynTrajectory(initial, empty, empty.astype(np.int64), empty.astype(bool), horizon, rate_info, policy.describe())

    cumulative = np.cumsum(masses)
    times, vertices, applied = [], [], []
    current = initial
    t = 0.0
    while True:
        t += rng.exponential(1.0 / total)
        if t > horizon:
            break
        if len(times) >= max_events:
            raise CapExceeded(
                f"more than {max_events} clock rings before t={horizon}; raise dynamics.max_events or shorten the horizon"
            )
        k = min(int(np.searchsorted(cumulative, rng.random() * total, side="right")), locations.size - 1)
        v = int(locations[k])
        flip = policy.accepts(current, v)
        if flip:
            current = current.flipped(v)
        times.append(t)
        vertices.append(v)
        applied.append(flip)

    trajectory = DynTrajectory(
        initial,
        np.array(times, dtype=np.float64),
        np.array(vertices, dtype=np.int64),
        np.array(applied, dtype=bool),
        horizon,
        rate_info,
        policy.describe(),
    )
    if verbose:
        print(f"[run_dynamics] R={total:.6g} T={horizon} rings={len(trajectory)} applied={trajectory.n_applied}")
    return trajectory


def run_eps_cutoff(
    initial: Coloring,
    rates: AtomicMeasure,
    eps: float,
    area,
    horizon: float,
    rng: np.random.Generator,
    target,
    max_events: int = 10_000_000,
    verbose: bool = False,
) -> DynTrajectory:
    """ε-cutoff dynamic: same clocks, a ring at v flips it iff v is ε-pivotal at ω_{t⁻}."""
    return run_dynamics(initial, rates, horizon, rng, CutoffFlips(target, eps, area), max_events, verbose)


def uniform_rates(target_inner: np.ndarray, rate: float) -> AtomicMeasure:
    """Rate `rate` on every listed inner vertex (n^{-1/4} in the map case)."""
    target_inner = np.asarray(target_inner, dtype=np.int64)
    return AtomicMeasure(target_inner, np.full(target_inner.shape[0], float(rate)), {"kind": "uniform", "rate": float(rate)})
