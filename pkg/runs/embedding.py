"""embed and verify-cardy."""

import argparse

import numpy as np

from embedding.cardy import bary_to_plane, cardy_embedding
from embedding.pushforward import pushforward
from embedding.schwarz import riemann_to_delta
from lattice.domain import LatticeDomain, marked_domain
from maps.boltzmann import sample_marked_edges
from maps.metric import metric_measure_data
from maps.triangulation import MarkedTriangulation
from output.envelope import ResultEnvelope
from output.mapping import DEFAULT_SVG
from output.svg import render_embedded_map
from runs.context import DOMAINS, RunContext, build_domain, domain_corners, read_maps
from state.errors import ValidationError
from utils.rationals import fraction_str, parse_fraction, parse_fraction_list

DISK_MARKS = np.array([[np.cos(t), np.sin(t)] for t in np.deg2rad([-90.0, 30.0, 150.0])])


def register(subparsers) -> None:
    p = subparsers.add_parser("embed", help="Cardy embedding of one marked map or lattice domain")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--map", help="map file (.json or the first map of a .jsonl)")
    source.add_argument("--domain", choices=DOMAINS)
    p.add_argument("--delta", default="1/16", help="mesh for --domain, exact rational")
    p.add_argument("--marks", choices=("auto", "keep"), default="auto",
                   help="auto: a = root edge, (b, c) uniform; keep: marks stored with the map")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--out", default="embed.json")
    p.add_argument("--csv", default=None)
    p.add_argument("--svg", nargs="?", const=DEFAULT_SVG["embed"], default=None)
    p.set_defaults(handler=run_embed)

    v = subparsers.add_parser("verify-cardy", help="Cardy embedding of a polygon's δ-approximation vs its Riemann map")
    v.add_argument("--domain", choices=("triangle", "square", "rectangle"), default="triangle")
    v.add_argument("--delta", default=None, help="single mesh, exact rational")
    v.add_argument("--delta-list", default="1/10,1/20,1/40")
    v.add_argument("--samples", type=int, required=True)
    v.add_argument("--max-error", type=float, default=0.06, help="required sup error at the finest mesh")
    v.add_argument("--out", default="verify.json")
    v.add_argument("--csv", default=None)
    v.set_defaults(handler=run_verify_cardy)


def polygon_marks(domain: LatticeDomain) -> np.ndarray:
    """The first three corners of a polygonal domain, three points 120° apart on the disk."""
    corners = domain_corners(domain)
    return DISK_MARKS if corners is None else corners[:3]


def run_embed(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    cfg = ctx.section("embedding")
    if args.map:
        target = read_maps(args.map)[0]
        if isinstance(target, MarkedTriangulation) and args.marks == "keep":
            marked = target
        else:
            tri = target.map if isinstance(target, MarkedTriangulation) else target
            marked = sample_marked_edges(tri, ctx.rng("embed/marks"))
        domain = None
    else:
        domain = build_domain(args.domain, parse_fraction(args.delta), ctx.section("lattice"), verbose=ctx.verbose)
        marked = marked_domain(domain, polygon_marks(domain))

    rng = ctx.rng("embed")
    embedded = cardy_embedding(
        marked, args.samples, rng,
        threads=ctx.threads,
        batch_size=cfg.get("batch_size", 1000),
        seed=ctx.seeds["embed"],
        verbose=ctx.verbose,
    )
    payload = embedded.to_json()
    payload["sum_to_one_defect"] = embedded.sum_to_one_defect()
    if domain is not None:
        payload["domain"] = {"name": args.domain, "delta": fraction_str(domain.delta)}
    elif marked.map.n_inner > 0:
        pushed = pushforward(embedded, metric_measure_data(marked.map))
        payload["pushforward"] = {
            "distance_scale":  pushed.mmd.distance_scale,
            "vertex_mass":     pushed.vertex_measure.total,
            "boundary_mass":   pushed.boundary_measure.total,
        }

    if args.csv:
        ctx.writer.add_csv(args.csv, "embed", payload["vertices"])
    if args.svg:
        ctx.writer.add_text(args.svg, render_embedded_map(embedded))
    return ctx.result(args.out, "embed", payload)


def cardy_discrepancy(domain: LatticeDomain, samples: int, rng, ctx: RunContext) -> dict:
    """sup over inner vertices of |Cdy^δ(v) − Cdy_D(v)| in the plane of Δ, with its Monte Carlo budget."""
    corners = domain_corners(domain)
    if corners is None:
        raise ValidationError("verify-cardy needs a polygonal domain")
    cfg = ctx.section("embedding")
    marks = corners[:3]
    marked = marked_domain(domain, marks)
    embedded = cardy_embedding(marked, samples, rng, ctx.threads, cfg.get("batch_size", 1000), verbose=ctx.verbose)

    inner = np.arange(domain.boundary_length, domain.n_vertices)
    exact = riemann_to_delta(
        corners, marks, domain.positions[inner],
        nodes=cfg.get("sc_nodes", 32),
        corner_exclusion=cfg.get("corner_exclusion", 1e-3),
        newton_tol=cfg.get("newton_tol", 1e-12),
    )
    target = bary_to_plane(np.array([b.as_tuple() for b in exact]))
    errors = np.linalg.norm(embedded.positions[inner] - target, axis=1)
    se = embedded.standard_errors[inner]
    return {
        "delta":             fraction_str(domain.delta),
        "n_vertices":        domain.n_vertices,
        "sup_error":         float(errors.max()),
        "mc_budget":         float(4 * np.sqrt((se ** 2).sum(axis=1)).max()),
        "sum_to_one_defect": embedded.sum_to_one_defect(),
        # |Σ p̂ − 1| has standard error at most se_a + se_b + se_c
        "defect_budget":     float(4 * se.sum(axis=1).max()),
    }


def sweep_verdict(rows: list[dict], max_error: float) -> dict:
    """Pass/fail flags of a verify-cardy sweep ordered from coarse to fine."""
    sup = [r["sup_error"] for r in rows]
    defect = [r["sum_to_one_defect"] for r in rows]
    budget = [r["defect_budget"] for r in rows]
    decreasing = all(a > b for a, b in zip(sup, sup[1:]))
    # a finer mesh may not raise the defect by more than both Monte Carlo budgets
    defect_ok = all(b <= a + ba + bb for a, b, ba, bb in zip(defect, defect[1:], budget, budget[1:]))
    return {
        "sup_decreasing":       decreasing,
        "defect_decreasing":    all(a > b for a, b in zip(defect, defect[1:])),
        "defect_within_budget": defect_ok,
        "pass":                 decreasing and defect_ok and sup[-1] <= max_error,
    }


def run_verify_cardy(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    deltas = [parse_fraction(args.delta)] if args.delta else parse_fraction_list(args.delta_list)
    deltas = sorted(deltas, reverse=True)
    rng = ctx.rng("verify-cardy")
    rows = []
    for delta in deltas:
        domain = build_domain(args.domain, delta, ctx.section("lattice"), verbose=ctx.verbose)
        rows.append(cardy_discrepancy(domain, args.samples, rng, ctx))
        if ctx.verbose:
            r = rows[-1]
            print(f"[verify-cardy] δ={r['delta']} sup={r['sup_error']:.4f} budget={r['mc_budget']:.4f} defect={r['sum_to_one_defect']:.4f}")

    payload = {
        "domain":  args.domain,
        "samples": args.samples,
        "sweep":   rows,
        **sweep_verdict(rows, args.max_error),
    }
    if args.csv:
        ctx.writer.add_csv(args.csv, "verify-cardy", rows)
    return ctx.result(args.out, "verify-cardy", payload)
