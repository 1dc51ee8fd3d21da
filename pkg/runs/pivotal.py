"""four-arm, pivotals and occupation."""

import argparse
from fractions import Fraction

import numpy as np

from field.gff import GffSampler
from field.gmc import ALPHA, GAMMA, gmc_measure
from lattice.domain import LatticeDomain
from output.envelope import ResultEnvelope
from output.mapping import DEFAULT_SVG
from output.svg import render_pivotals
from percolation.coloring import BoundaryCondition, as_triangulation, sample_percolation
from pivotal.arms import importance_scale, rho_important_set
from pivotal.flips import eps_pivotal_mask
from pivotal.measures import FourArmEstimate, four_arm_probability, occupation_estimate, pivotal_measure
from runs.context import DOMAINS, RunContext, build_domain, field_settings, read_json, read_maps
from state.schema import PivotalMode
from utils.rationals import fraction_str, parse_fraction, parse_fraction_list

FOUR_ARM_EXPONENT = -1.25


def register(subparsers) -> None:
    f = subparsers.add_parser("four-arm", help="alternating four-arm probabilities α̂₄(δ, r)")
    f.add_argument("--delta-list", default="1/16,1/32,1/64,1/128")
    f.add_argument("--r", type=float, default=1.0)
    f.add_argument("--samples", type=int, required=True)
    f.add_argument("--slope-tolerance", type=float, default=0.15)
    f.add_argument("--out", default="alpha4.csv")
    f.set_defaults(handler=run_four_arm)

    p = subparsers.add_parser("pivotals", help="ε-pivotal points and the discrete pivotal measure")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--map", help="map file (.json or the first map of a .jsonl)")
    source.add_argument("--domain", choices=DOMAINS)
    p.add_argument("--delta", default="1/32")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", choices=[m.value for m in PivotalMode], default="map")
    p.add_argument("--alpha4", type=float, default=None, help="use this α̂₄(δ, 1) instead of estimating it")
    p.add_argument("--containment", type=int, default=0, metavar="K",
                   help="check ε-pivotal ⊂ ρ-important on K fresh colorings (lattice domains)")
    p.add_argument("--rho", type=float, default=None, help="ρ for --containment (default max(0.01·√ε, δ))")
    p.add_argument("--out", default="pivotals.json")
    p.add_argument("--csv", default=None)
    p.add_argument("--svg", nargs="?", const=DEFAULT_SVG["pivotals"], default=None)
    p.set_defaults(handler=run_pivotals)

    o = subparsers.add_parser("occupation", help="occupation measure r^{d-2}·Leb on the r-neighbourhood of a point set")
    o.add_argument("--points", required=True, help="pivotals JSON (atoms) or a JSON list of [x, y]")
    o.add_argument("--d", type=float, default=0.75)
    o.add_argument("--radii", default="1/16,1/32")
    o.add_argument("--out", default="occupation.json")
    o.add_argument("--csv", default=None)
    o.set_defaults(handler=run_occupation)


# ── four-arm ────────────────────────────────────────────────────────────────
def estimate_alpha4(ctx: RunContext, delta, r: float = 1.0, samples: int | None = None) -> FourArmEstimate:
    samples = samples or ctx.section("pivotal").get("alpha4_samples", 10_000)
    stream = f"alpha4/{fraction_str(delta)}/{r}"
    return four_arm_probability(
        delta, r, samples, ctx.rng(stream),
        threads=ctx.threads,
        batch_size=ctx.section("embedding").get("batch_size", 1000),
        seed=ctx.seeds.get(stream),
        verbose=ctx.verbose,
    )


def exponent_fit(estimates: list[FourArmEstimate]) -> dict:
    """Weighted least squares of log α̂₄ on log δ; weights 1/Var(log p̂) ≈ pN/(1 − p)."""
    usable = [e for e in estimates if 0 < e.hits < e.samples]
    if len(usable) < 2:
        return {"slope": None, "points": len(usable)}
    x = np.log([float(e.delta) for e in usable])
    y = np.log([e.p for e in usable])
    sigma = np.array([np.sqrt((1 - e.p) / (e.p * e.samples)) for e in usable])
    (slope, intercept), cov = np.polyfit(x, y, 1, w=1 / sigma, cov="unscaled")
    return {"slope": float(slope), "intercept": float(intercept), "slope_se": float(np.sqrt(cov[0, 0])), "points": len(usable)}


def run_four_arm(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    deltas = parse_fraction_list(args.delta_list)
    estimates = [estimate_alpha4(ctx, d, args.r, args.samples) for d in deltas]
    rows = [{k: e.to_json()[k] for k in ("delta", "r", "samples", "hits", "p", "se")} for e in estimates]
    ctx.writer.add_csv(args.out, "four-arm", rows)

    fit = exponent_fit(estimates)
    slope = fit.get("slope")
    payload = {
        "estimates": [e.to_json() for e in estimates],
        "fit":       fit,
        "expected":  FOUR_ARM_EXPONENT,
        "pass":      slope is not None and abs(slope - FOUR_ARM_EXPONENT) <= args.slope_tolerance,
    }
    return ctx.result(args.out, "four-arm", payload, {"alpha4": rows})


# ── pivotals ────────────────────────────────────────────────────────────────
def _lebesgue(domain: LatticeDomain) -> np.ndarray:
    return np.full(domain.n_vertices, domain.hexagon_area)


def containment_check(domain: LatticeDomain, eps: float, rho: float, trials: int, rng, verbose: bool = False) -> dict:
    """ε-pivotal points (Lebesgue areas) that are not ρ-important, over `trials` fresh colorings."""
    area = _lebesgue(domain)
    violations, pivotal_total = 0, 0
    for _ in range(trials):
        coloring = sample_percolation(domain, BoundaryCondition.blue(), rng)
        pivotal = np.flatnonzero(eps_pivotal_mask(domain, coloring, eps, area))
        pivotal_total += pivotal.size
        if pivotal.size:
            important = rho_important_set(domain, coloring, rho)
            violations += int(np.setdiff1d(pivotal, important).size)
    if verbose:
        print(f"[pivotals] containment: {violations} violations among {pivotal_total} ε-pivotal points")
    return {
        "trials":     trials,
        "rho":        rho,
        "rho_over_delta": rho / domain.h,
        "pivotal":    pivotal_total,
        "violations": violations,
        "pass":       violations == 0,
    }


def run_pivotals(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    mode = PivotalMode(args.mode)
    if args.eps < 0:
        raise ValueError(f"--eps must be >= 0, got {args.eps}")
    if args.map:
        target = read_maps(args.map)[0]
        domain = None
    else:
        target = domain = build_domain(args.domain, parse_fraction(args.delta), ctx.section("lattice"), verbose=ctx.verbose)
    if mode is not PivotalMode.MAP and domain is None:
        raise ValueError(f"pivotal mode '{mode.value}' needs --domain")

    coloring = sample_percolation(target, BoundaryCondition.blue(), ctx.rng("pivotals/coloring"))
    constants = {}
    alpha4 = area = weights = None
    if mode is not PivotalMode.MAP:
        if args.alpha4 is not None:
            alpha4 = _fixed_alpha4(domain, args.alpha4)
        else:
            alpha4 = estimate_alpha4(ctx, domain.delta)
        constants["alpha4"] = alpha4.to_json()
    if mode is PivotalMode.FIELD:
        c_T, knobs = field_settings(ctx)
        field = GffSampler(domain, c_T, verbose=ctx.verbose).sample(ctx.rng("pivotals/field"))
        area = gmc_measure(field, GAMMA, **knobs)
        weights = gmc_measure(field, ALPHA, **knobs)
        constants["c_T"] = c_T

    measure = pivotal_measure(target, coloring, args.eps, mode, area, alpha4, weights, verbose=ctx.verbose)
    positions = _positions(target)
    atoms = []
    for v, m in zip(measure.locations.tolist(), measure.masses.tolist()):
        x, y = positions[v].tolist() if positions is not None else (None, None)
        atoms.append({"v": v, "x": x, "y": y, "mass": m})

    payload = {
        "mode":     mode.value,
        "eps":      args.eps,
        "coloring": coloring.to_json(),
        "measure":  measure.to_json(),
        "atoms":    atoms,
    }
    if args.containment:
        if domain is None:
            raise ValueError("--containment needs --domain")
        rho = args.rho or importance_scale(args.eps, domain.delta)
        payload["containment"] = containment_check(domain, args.eps, rho, args.containment, ctx.rng("pivotals/containment"), ctx.verbose)

    if args.csv:
        ctx.writer.add_csv(args.csv, "pivotals", atoms)
    if args.svg and domain is not None:
        ctx.writer.add_text(args.svg, render_pivotals(domain, coloring, measure))
    return ctx.result(args.out, "pivotals", payload, constants)


def _fixed_alpha4(domain: LatticeDomain, p: float) -> FourArmEstimate:
    """A user-supplied α̂₄ recorded as a one-sample 'estimate' with hits/samples = p."""
    if not 0 < p <= 1:
        raise ValueError(f"--alpha4 must lie in (0, 1], got {p}")
    ratio = Fraction(p).limit_denominator(10**9)
    return FourArmEstimate(domain.delta, 1.0, ratio.denominator, ratio.numerator, {"source": "cli"})


def _positions(target) -> np.ndarray | None:
    if isinstance(target, LatticeDomain):
        return target.positions
    return as_triangulation(target).positions


# ── occupation ──────────────────────────────────────────────────────────────
def _load_points(path) -> np.ndarray:
    data = read_json(path)
    if isinstance(data, dict):
        atoms = data.get("payload", data).get("atoms", [])
        return np.array([[a["x"], a["y"]] for a in atoms if a["x"] is not None], dtype=np.float64).reshape(-1, 2)
    return np.asarray(data, dtype=np.float64).reshape(-1, 2)


def run_occupation(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    points = _load_points(args.points)
    cells = ctx.section("pivotal").get("occupation_grid", 20)
    radii = [float(r) for r in parse_fraction_list(args.radii)]
    measures = [occupation_estimate(points, args.d, r, cells) for r in radii]
    totals = [m.total for m in measures]
    payload = {
        "d":       args.d,
        "points":  int(points.shape[0]),
        "radii":   radii,
        "totals":  totals,
        "ratios":  [b / a if a > 0 else None for a, b in zip(totals, totals[1:])],
    }
    if args.csv and measures:
        finest = measures[-1]
        rows = [{"x": float(x), "y": float(y), "mass": float(m)} for (x, y), m in zip(finest.locations, finest.masses)]
        ctx.writer.add_csv(args.csv, "occupation", rows)
    return ctx.result(args.out, "occupation", payload)
