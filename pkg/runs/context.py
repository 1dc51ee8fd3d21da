"""
Shared plumbing for command modules: config sections, seeded streams,
target loading (maps or lattice domains) and rate sources.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lattice.domain import LatticeDomain, build_lattice_domain, rhombus_domain
from maps.triangulation import MarkedTriangulation, Triangulation
from output.envelope import ResultEnvelope, ResultWriter
from state.errors import ValidationError
from utils.rationals import parse_fraction
from utils.seeds import make_rng, seed_record

DOMAINS = ("disk", "triangle", "rectangle", "square", "rhombus")


@dataclass
class RunContext:
    config:  dict
    seed:    int
    threads: int
    verbose: bool = False
    seeds:   dict = field(default_factory=dict)
    writer:  ResultWriter = field(default_factory=ResultWriter)
    started: float = field(default_factory=time.perf_counter)
    envelope_path: Path | None = None

    def section(self, name: str) -> dict:
        return self.config.get(name) or {}

    def rng(self, stream: str) -> np.random.Generator:
        self.seeds[stream] = seed_record(self.seed, stream)
        return make_rng(self.seed, stream)

    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def result(self, out, command: str, payload: dict, constants: dict | None = None) -> ResultEnvelope:
        """
        Envelope for `command`. When `out` is itself a .json file it holds the
        envelope; otherwise the envelope goes next to it as <stem>.envelope.json.
        """
        out = Path(out)
        self.envelope_path = out if out.suffix == ".json" else out.with_suffix(".envelope.json")
        return ResultEnvelope(command, payload, {"constants": constants or {}})


# ── targets ─────────────────────────────────────────────────────────────────
def read_json(path) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"input file not found: '{path}'")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"'{path}' is not valid JSON: {exc}") from exc


def read_maps(path) -> list[Triangulation | MarkedTriangulation]:
    """Maps from a .json file (one map) or a .jsonl file (one per line, as sample-map writes)."""
    path = Path(path)
    if path.suffix == ".jsonl":
        try:
            lines = [line for line in path.read_text().splitlines() if line.strip()]
        except FileNotFoundError:
            raise ValidationError(f"input file not found: '{path}'")
        records = [json.loads(line) for line in lines]
    else:
        records = [read_json(path)]
    return [map_from_record(r) for r in records if "twin" in r or "map" in r]


def map_from_record(record: dict):
    if "map" in record:
        tri = Triangulation.from_json(record["map"])
        if all(k in record for k in "abc"):
            return MarkedTriangulation(tri, int(record["a"]), int(record["b"]), int(record["c"]))
        return tri
    return Triangulation.from_json(record)


def build_domain(name: str, delta, lattice_cfg: dict, side: int | None = None, verbose: bool = False) -> LatticeDomain:
    """Named lattice domain: the unit disk, unit equilateral triangle, unit square, 2×1 rectangle, or the side×side rhombus."""
    d = parse_fraction(delta) if isinstance(delta, str) else delta
    if name == "rhombus":
        return rhombus_domain(int(side or round(1 / d)), d)
    spec = {
        "disk":      {"type": "disk", "radius": 1.0},
        "triangle":  {"type": "triangle", "side": 1.0},
        "square":    {"type": "square", "side": 1.0},
        "rectangle": {"type": "rectangle", "width": 2.0, "height": 1.0},
    }.get(name)
    if spec is None:
        raise ValueError(f"Unknown domain: '{name}'. Valid options: {', '.join(DOMAINS)}")
    return build_lattice_domain(spec, d, eps_geom=lattice_cfg.get("eps_geom", 1e-9), verbose=verbose)


def domain_corners(domain: LatticeDomain) -> np.ndarray | None:
    """Polygon corners of the continuum shape behind `domain`, None for curved shapes."""
    shape = domain.shape or {}
    if "vertices" in shape:
        return np.asarray(shape["vertices"], dtype=np.float64)
    return None


def field_settings(ctx: RunContext) -> tuple[float, dict]:
    """c_T (analytic 2π√3 unless configured) and the circle-average knobs of the `field` section."""
    from field.gff import C_TRIANGULAR

    cfg = ctx.section("field")
    knobs = {
        "points":                cfg.get("circle_points", 64),
        "regularization_factor": cfg.get("regularization_factor", 4.0),
    }
    return float(cfg.get("c_T") or C_TRIANGULAR), knobs
