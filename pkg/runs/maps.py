"""sample-map: Boltzmann (or fixed-size uniform, or exhaustively enumerated) triangulations to JSONL."""

import argparse

from maps.boltzmann import BoltzmannSampler, sample_marked_edges
from maps.counting import closed_form_count, count_triangulations
from maps.decomposition import enumerate_triangulations, sample_uniform
from output.envelope import ResultEnvelope, dumps
from runs.context import RunContext


def register(subparsers) -> None:
    p = subparsers.add_parser("sample-map", help="sample rooted triangulations of the ℓ-gon")
    p.add_argument("--boundary", type=int, required=True, help="boundary length ℓ >= 3")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--inner", type=int, default=None, help="fixed inner-vertex count (uniform instead of Boltzmann)")
    p.add_argument("--enumerate", action="store_true", help="write every map with --inner inner vertices")
    p.add_argument("--out", default="maps.jsonl")
    p.set_defaults(handler=run_sample_map)


def run_sample_map(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    cfg = ctx.section("maps")
    ell = args.boundary
    if ell < 3:
        raise ValueError(f"--boundary must be >= 3, got {ell}")
    if args.count < 1:
        raise ValueError(f"--count must be >= 1, got {args.count}")
    rng = ctx.rng("sample-map")

    if args.enumerate:
        if args.inner is None:
            raise ValueError("--enumerate needs --inner")
        maps = enumerate_triangulations(
            ell, args.inner,
            cap=cfg.get("enumeration_cap", 8),
            max_maps=cfg.get("max_maps", 200_000),
        )
        source = {"kind": "enumerated", "inner": args.inner, "count": count_triangulations(ell, args.inner)}
    elif args.inner is not None:
        maps = [sample_uniform(ell, args.inner, rng) for _ in range(args.count)]
        source = {"kind": "uniform", "inner": args.inner, "class_size": str(closed_form_count(ell, args.inner))}
    else:
        sampler = BoltzmannSampler(
            ell,
            tail_tolerance=cfg.get("tail_tolerance", 1e-6),
            max_inner=cfg.get("max_inner", 1_000_000),
            verbose=ctx.verbose,
        )
        maps = [sampler.sample(rng) for _ in range(args.count)]
        source = {"kind": "boltzmann", **sampler.metadata}

    lines = []
    for k, tri in enumerate(maps):
        marked = sample_marked_edges(tri, rng)
        lines.append(dumps({"index": k, "n": tri.n_inner, **marked.to_json()}))
    ctx.writer.add_text(args.out, "\n".join(lines) + "\n")

    payload = {
        "boundary": ell,
        "maps":     len(maps),
        "source":   source,
        "sizes":    [tri.n_inner for tri in maps],
        "out":      str(args.out),
    }
    if ctx.verbose:
        print(f"[sample-map] l={ell} maps={len(maps)} source={source['kind']}")
    return ctx.result(args.out, "sample-map", payload)
