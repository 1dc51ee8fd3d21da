"""dynamics and ctmc."""

import argparse

import numpy as np

from dynamics.ctmc import MAX_CTMC_INNER, build_exact_ctmc, jump_skeleton, state_coloring, state_index, two_time_correlation
from dynamics.policies import create_policy
from dynamics.runner import run_dynamics, uniform_rates
from field.gmc import GAMMA, clock_rates, gmc_measure
from lattice.domain import LatticeDomain
from maps.decomposition import sample_uniform
from output.envelope import ResultEnvelope
from percolation.coloring import BoundaryCondition, as_triangulation, sample_percolation
from percolation.loops import loop_ensemble
from runs.context import DOMAINS, RunContext, build_domain, field_settings, read_maps
from runs.field import field_from_file
from runs.pivotal import estimate_alpha4
from state.errors import TooManyStates, ZeroTotalRate
from state.schema import DynamicsMode
from utils.rationals import parse_fraction

CTMC_TOLERANCE = 1e-12


def register(subparsers) -> None:
    d = subparsers.add_parser("dynamics", help="event-driven (cutoff) dynamical percolation")
    source = d.add_mutually_exclusive_group()
    source.add_argument("--map", help="map file (.json or the first map of a .jsonl)")
    source.add_argument("--domain", choices=DOMAINS)
    d.add_argument("--delta", default="1/16")
    d.add_argument("--mode", choices=[m.value for m in DynamicsMode], default="full")
    d.add_argument("--eps", type=float, default=None, help="loop-area cutoff (required for --mode cutoff)")
    d.add_argument("--rates", default="uniform", help="uniform, uniform:R or field:PATH (a gff fields file)")
    d.add_argument("--alpha4", type=float, default=None, help="α̂₄ for field rates (estimated when omitted)")
    d.add_argument("--horizon", type=float, required=True)
    d.add_argument("--out", default="traj.jsonl")
    d.set_defaults(handler=run_dynamics_command)

    c = subparsers.add_parser("ctmc", help="exact generator of the flip dynamic on tiny maps")
    source = c.add_mutually_exclusive_group(required=True)
    source.add_argument("--map", help="map file with at most 12 inner vertices")
    source.add_argument("--random", type=int, metavar="K", help="K random maps")
    c.add_argument("--max-inner", type=int, default=10, help="largest inner-vertex count of --random maps")
    c.add_argument("--eps", default=None, help="comma list of cutoffs; 'median' and 'inf' allowed (default 0,median,inf)")
    c.add_argument("--t", type=float, default=1.0, help="time of the two-time correlation check")
    c.add_argument("--out", default="ctmc.json")
    c.set_defaults(handler=run_ctmc)


# ── dynamics ────────────────────────────────────────────────────────────────
def _rate_source(args: argparse.Namespace, ctx: RunContext):
    """(target, rates, area measure for cutoff mode, constants)."""
    kind, _, value = args.rates.partition(":")
    if kind == "field":
        if not value:
            raise ValueError("--rates field:PATH needs the path of a gff fields file")
        field = field_from_file(value)
        _, knobs = field_settings(ctx)
        alpha4 = args.alpha4 if args.alpha4 is not None else estimate_alpha4(ctx, field.domain.delta)
        rates = clock_rates(field, alpha4, **knobs)
        area = gmc_measure(field, GAMMA, **knobs)
        constants = {"c_T": field.c_T, "alpha4": alpha4 if isinstance(alpha4, float) else alpha4.to_json()}
        return field.domain, rates, area, constants

    if kind != "uniform":
        raise ValueError(f"Unknown rate source: '{kind}'. Valid options: uniform, uniform:R, field:PATH")
    if args.map:
        target = read_maps(args.map)[0]
    elif args.domain:
        target = build_domain(args.domain, parse_fraction(args.delta), ctx.section("lattice"), verbose=ctx.verbose)
    else:
        raise ValueError("uniform rates need --map or --domain")
    tri = as_triangulation(target)
    if isinstance(target, LatticeDomain):
        area = np.full(tri.n_vertices, target.hexagon_area)
    else:
        area = np.full(tri.n_vertices, 1.0 / (2 * max(tri.n_inner, 1)))
    rate = float(value) if value else max(tri.n_inner, 1) ** -0.25
    return target, uniform_rates(tri.inner_vertices, rate), area, {}


def run_dynamics_command(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    mode = DynamicsMode(args.mode)
    if mode is DynamicsMode.CUTOFF and args.eps is None:
        raise ValueError("--mode cutoff needs --eps")
    target, rates, area, constants = _rate_source(args, ctx)
    if rates.total == 0:
        raise ZeroTotalRate("every clock rate is 0; the trajectory would be constant")

    initial = sample_percolation(target, BoundaryCondition.blue(), ctx.rng("dynamics/initial"))
    policy = create_policy({"mode": mode.value, "eps": args.eps}, target=target, area=area)
    max_events = ctx.section("dynamics").get("max_events", 10_000_000)
    trajectory = run_dynamics(initial, rates, args.horizon, ctx.rng("dynamics"), policy, max_events, ctx.verbose)

    elapsed = ctx.elapsed()
    ctx.writer.add_lines(args.out, trajectory.header(), trajectory.event_lines())
    final = trajectory.final_coloring()
    payload = {
        "mode":         mode.value,
        "eps":          args.eps,
        "horizon":      args.horizon,
        "total_rate":   rates.total,
        "events":       len(trajectory),
        "applied":      trajectory.n_applied,
        "final_red":    int(final.inner_red.sum()),
        "n_inner":      int(final.inner_red.shape[0]),
    }
    constants["rings_per_second"] = len(trajectory) / elapsed if elapsed > 0 else None
    if ctx.verbose:
        print(f"[dynamics] {len(trajectory)} rings, {trajectory.n_applied} applied, {constants['rings_per_second'] or 0:.0f} rings/s")
    return ctx.result(args.out, "dynamics", payload, constants)


# ── ctmc ────────────────────────────────────────────────────────────────────
def _cutoffs(spec: str | None, tri, area: np.ndarray, rng) -> list[float]:
    values = []
    for item in (spec or "0,median,inf").split(","):
        item = item.strip()
        if item == "inf":
            values.append(float("inf"))
        elif item == "median":
            ensemble = loop_ensemble(tri, sample_percolation(tri, BoundaryCondition.blue(), rng), area)
            values.append(float(np.median(ensemble.areas)) if len(ensemble) else 0.0)
        else:
            values.append(float(item))
    return values


def ctmc_checks(tri, eps: float, area: np.ndarray, t: float, rng, verbose: bool = False) -> dict:
    """Symmetry and stationarity residuals of the exact generator, plus the two-time correlation gap."""
    rates = uniform_rates(tri.inner_vertices, max(tri.n_inner, 1) ** -0.25)
    generator = build_exact_ctmc(tri, eps, rates, area, verbose=verbose)
    Q = generator.Q
    n = generator.n_states
    u = np.full(n, 1.0 / n)
    skeleton = jump_skeleton(generator)
    weighted = u * skeleton.holding
    moving = skeleton.holding > 0
    forward, backward = two_time_correlation(generator, rng.random(n), rng.random(n), t)

    # the all-red state must index to 2^k − 1
    probe = state_index(state_coloring(n - 1, tri.n_inner, tri.boundary_length, BoundaryCondition.blue()))
    residuals = {
        "symmetry":      float(np.abs(Q - Q.T).max()),
        "uQ":            float(np.abs(u @ Q).max()),
        "reweighted":    float(np.abs(weighted @ skeleton.P - weighted).max()),
        "row_sums":      float(np.abs(skeleton.P[moving].sum(axis=1) - 1).max()) if moving.any() else 0.0,
        "time_reversal": abs(forward - backward),
    }
    return {
        "n_inner":    tri.n_inner,
        "boundary":   tri.boundary_length,
        "eps":        eps if np.isfinite(eps) else "inf",
        "states":     n,
        "absorbing":  int(skeleton.absorbing.size),
        "indexing":   probe == n - 1,
        **residuals,
        "pass":       probe == n - 1 and max(residuals.values()) <= CTMC_TOLERANCE,
    }


def _random_maps(count: int, max_inner: int, rng) -> list:
    if count < 1:
        raise ValueError(f"--random must be >= 1, got {count}")
    if not 1 <= max_inner <= MAX_CTMC_INNER:
        raise ValueError(f"--max-inner must lie in [1, {MAX_CTMC_INNER}], got {max_inner}")
    return [sample_uniform(int(rng.integers(3, 7)), int(rng.integers(1, max_inner + 1)), rng) for _ in range(count)]


def run_ctmc(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    if args.t < 0:
        raise ValueError(f"--t must be nonnegative, got {args.t}")
    if args.map:
        maps = [as_triangulation(m) for m in read_maps(args.map)]
    else:
        maps = _random_maps(args.random, args.max_inner, ctx.rng("ctmc/maps"))
    rng = ctx.rng("ctmc")

    rows = []
    for k, tri in enumerate(maps):
        if tri.n_inner > MAX_CTMC_INNER:
            raise TooManyStates(f"map {k} has {tri.n_inner} inner vertices; the exact chain is capped at {MAX_CTMC_INNER}")
        area = np.full(tri.n_vertices, 1.0 / (2 * max(tri.n_inner, 1)))
        for eps in _cutoffs(args.eps, tri, area, rng):
            rows.append({"map": k, **ctmc_checks(tri, eps, area, args.t, rng, ctx.verbose)})

    worst = max((max(r[key] for key in ("symmetry", "uQ", "reweighted", "row_sums", "time_reversal")) for r in rows), default=0.0)
    payload = {
        "maps":       len(maps),
        "t":          args.t,
        "checks":     rows,
        "worst":      worst,
        "tolerance":  CTMC_TOLERANCE,
        "pass":       all(r["pass"] for r in rows),
    }
    if ctx.verbose:
        print(f"[ctmc] {len(rows)} chains over {len(maps)} maps, worst residual {worst:.2e}")
    return ctx.result(args.out, "ctmc", payload)
