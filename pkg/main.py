"""
cardylab main entry point

Samples planar maps and lattice domains, computes Cardy embeddings,
pivotal measures, GFF/GMC fields and (cutoff) dynamical percolation,
and writes a versioned result envelope next to every output.

Usage:
    python main.py crossing --enumerate 4,3 --samples 100000 --exact
    python main.py --config path/to/config.yaml --seed 7 embed --domain triangle --delta 1/20 --samples 2000

Exit codes: 0 success, 2 invalid input, 3 budget exceeded.
"""

import argparse
import sys

import yaml

from runs              import RunContext, register_all
from state.errors      import BudgetExceeded, CardyLabError
from utils.parallel    import resolve_threads

EXIT_OK      = 0
EXIT_INVALID = 2
EXIT_BUDGET  = 3


def load_config(path: str = "config.yaml") -> dict:
    try:
        with open(path) as f:
            return yaml.safe_load(f) or {}
    except FileNotFoundError:
        if path != "config.yaml":
            raise
        print(f"[main] Warning: {path} not found, using built-in defaults")
        return {}


def _global_options(parser: argparse.ArgumentParser, suppress: bool = False) -> None:
    # after the subcommand the options are SUPPRESSed so they never reset a value given before it
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    parser.add_argument("--config", default=default("config.yaml"), help="Path to config YAML")
    parser.add_argument("--seed", type=int, default=default(None), help="master seed (default run.seed)")
    parser.add_argument("--threads", type=int, default=default(None), help="worker threads (default CARDYLAB_THREADS, then run.threads)")
    parser.add_argument("--verbose", action="store_true", default=default(False), help="progress messages on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cardylab", description="cardylab: Cardy embeddings and percolation on random planar maps")
    _global_options(parser)
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_all(subparsers)
    for sub in subparsers.choices.values():
        _global_options(sub, suppress=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)

    try:
        config = load_config(args.config)
    except (OSError, yaml.YAMLError) as exc:
        print(f"[main] Error: cannot read config '{args.config}': {exc}", file=sys.stderr)
        return EXIT_INVALID

    run_cfg   = config.get("run", {}) or {}
    debug_cfg = config.get("debug", {}) or {}

    try:
        ctx = RunContext(
            config=config,
            seed=args.seed if args.seed is not None else int(run_cfg.get("seed", 0)),
            threads=resolve_threads(args.threads, run_cfg.get("threads")),
            verbose=args.verbose or bool(debug_cfg.get("print_progress", False)),
        )
        ctx.writer.verbose = ctx.verbose

        envelope = args.handler(args, ctx)
        envelope.stamp(config, argv, ctx.elapsed(), ctx.seeds)
        ctx.writer.add_envelope(ctx.envelope_path, envelope)
        ctx.writer.commit()

    except BudgetExceeded as exc:
        print(f"[main] Error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CardyLabError, ValueError, TypeError) as exc:
        print(f"[main] Error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except KeyboardInterrupt:
        print("\n[main] Interrupted by user; nothing written.")
        return 130

    if ctx.verbose:
        print(f"[main] {args.command} done in {ctx.elapsed():.2f}s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
