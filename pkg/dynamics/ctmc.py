"""
Exact continuous-time Markov chain of a flip dynamic on a tiny map.

States are the 2^k inner colorings; state s colors inner vertex ℓ+i red
iff bit i of s is set. Flipping v moves between two states that differ in
one bit, and v is ε-pivotal for both or neither, so Q is symmetric and
the uniform law is stationary.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from percolation.coloring import BoundaryCondition, Coloring, as_triangulation
from percolation.loops import loop_ensemble
from pivotal.flips import is_eps_pivotal
from state.errors import TooManyStates
from state.schema import AtomicMeasure

MAX_CTMC_INNER = 12


@dataclass(frozen=True, eq=False)
class RateMatrix:
    Q:          np.ndarray
    n_inner:    int
    params:     dict = field(default_factory=dict)

    @property
    def exit_rates(self) -> np.ndarray:
        """N(i) = −q_ii."""
        return -np.diag(self.Q).copy()

    @property
    def n_states(self) -> int:
        return int(self.Q.shape[0])

    def to_json(self) -> dict:
        return {
            "n_inner": self.n_inner,
            "params":  self.params,
            "Q":       self.Q.tolist(),
        }


@dataclass(frozen=True, eq=False)
class JumpSkeleton:
    P:          np.ndarray   # zero rows at absorbing states
    holding:    np.ndarray   # N(i)
    absorbing:  np.ndarray   # states with N(i) = 0


def state_coloring(state: int, n_inner: int, boundary_length: int, boundary_condition: BoundaryCondition) -> Coloring:
    inner = (state >> np.arange(n_inner)) & 1
    return Coloring.from_inner(inner.astype(bool), boundary_condition, boundary_length)


def state_index(coloring: Coloring) -> int:
    bits = coloring.inner_red.astype(np.int64)
    return int(np.dot(bits, 1 << np.arange(bits.shape[0], dtype=np.int64)))


def build_exact_ctmc(
    target,
    eps: float | None,
    rates: AtomicMeasure,
    area=None,
    boundary_condition: BoundaryCondition | None = None,
    max_inner: int = MAX_CTMC_INNER,
    verbose: bool = False,
) -> RateMatrix:
    """
    Generator of the flip dynamic: q_ij = rate(v) when i and j differ only
    at v and v is ε-pivotal for i. `eps=None` gives the unconditional
    dynamic.
    """
    tri = as_triangulation(target)
    k = tri.n_inner
    if k > max_inner:
        raise TooManyStates(f"{k} inner vertices give 2^{k} states; the exact chain is capped at {max_inner}")
    ell = tri.boundary_length
    bc = boundary_condition or BoundaryCondition.blue()
    rate = rates.per_vertex(tri.n_vertices)[ell:]

    n = 1 << k
    Q = np.zeros((n, n))
    for s in range(n):
        coloring = state_coloring(s, k, ell, bc)
        before = loop_ensemble(tri, coloring, area) if eps is not None else None
        for i in np.flatnonzero(rate > 0):
            v = ell + int(i)
            if eps is None or is_eps_pivotal(tri, coloring, v, eps, area, before):
                Q[s, s ^ (1 << int(i))] = rate[i]
    Q[np.diag_indices(n)] = -Q.sum(axis=1)

    params = {"eps": eps, "rates": dict(rates.params), "boundary": bc.to_json()}
    if verbose:
        moving = int(np.count_nonzero(np.diag(Q)))
        print(f"[build_exact_ctmc] k={k} states={n} non-absorbing={moving}")
    return RateMatrix(Q, k, params)


def jump_skeleton(rate_matrix: RateMatrix) -> JumpSkeleton:
    Q = rate_matrix.Q
    holding = rate_matrix.exit_rates
    moving = holding > 0
    P = np.zeros_like(Q)
    P[moving] = Q[moving] / holding[moving, None]
    P[np.diag_indices_from(P)] = 0.0
    return JumpSkeleton(P, holding, np.flatnonzero(~moving))


def two_time_correlation(rate_matrix: RateMatrix, f, g, t: float) -> tuple[float, float]:
    """(E[f(ω₀)g(ω_t)], E[g(ω₀)f(ω_t)]) with ω₀ uniform."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    transition = expm(rate_matrix.Q * t)
    u = np.full(rate_matrix.n_states, 1.0 / rate_matrix.n_states)
    return float(u @ (f * (transition @ g))), float(u @ (g * (transition @ f)))
