"""gff and gmc."""

import argparse

import numpy as np
from scipy.stats import linregress

from field.gff import FieldSample, GffSampler, calibrate_c_T, circle_average, circle_weights
from field.gmc import ALPHA, GAMMA, boundary_measure, clock_rates, gmc_measure
from lattice.domain import LatticeDomain
from output.envelope import ResultEnvelope, read_fields
from runs.context import DOMAINS, RunContext, build_domain, field_settings
from state.errors import ValidationError
from utils.rationals import fraction_str, parse_fraction, parse_fraction_list

SHIFT_TOLERANCE = 1e-12


def register(subparsers) -> None:
    g = subparsers.add_parser("gff", help="zero-boundary GFF samples and the circle-average variance law")
    g.add_argument("--domain", choices=DOMAINS, default="disk")
    g.add_argument("--delta", default="1/64")
    g.add_argument("--samples", type=int, required=True)
    g.add_argument("--write", type=int, default=16, help="number of samples stored in the fields file")
    g.add_argument("--radii", default="1/16,1/8,1/4", help="radii of the Var[h_r(0)] regression")
    g.add_argument("--slope-tolerance", type=float, default=0.05)
    g.add_argument("--calibrate", action="store_true", help="re-derive c_T from the unnormalized field")
    g.add_argument("--out", default="fields.bin")
    g.set_defaults(handler=run_gff)

    m = subparsers.add_parser("gmc", help="regularized GMC, boundary and clock measures of one field")
    source = m.add_mutually_exclusive_group(required=True)
    source.add_argument("--field", help="fields file written by gff")
    source.add_argument("--domain", choices=DOMAINS)
    m.add_argument("--index", type=int, default=0, help="which stored field to use")
    m.add_argument("--delta", default="1/32")
    m.add_argument("--exponent", type=float, default=GAMMA)
    m.add_argument("--r", type=float, default=None, help="regularization radius (default field.regularization_factor·δ)")
    m.add_argument("--kind", choices=("area", "boundary", "clock"), default="area")
    m.add_argument("--alpha4", type=float, default=1.0, help="α̂₄ for --kind clock")
    m.add_argument("--shifts", default="-1,0.3,2", help="constants c for the shift identity check")
    m.add_argument("--fields", type=int, default=1, help="fresh fields in the shift check (--domain only)")
    m.add_argument("--out", default="gmc.json")
    m.add_argument("--csv", default=None)
    m.set_defaults(handler=run_gmc)


def field_header(sample: FieldSample) -> dict:
    return {"domain": sample.domain.to_json(), "c_T": sample.c_T, "offset": sample.offset}


def field_from_file(path, index: int = 0) -> FieldSample:
    try:
        header, values = read_fields(path)
    except FileNotFoundError:
        raise ValidationError(f"fields file not found: '{path}'")
    if not 0 <= index < values.shape[0]:
        raise ValidationError(f"field index {index} out of range; '{path}' holds {values.shape[0]} fields")
    domain = LatticeDomain.from_json(header["domain"])
    return FieldSample(domain, np.array(values[index]), float(header["c_T"]), float(header.get("offset", 0.0)), {"source": str(path), "index": index})


def run_gff(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    if args.samples < 1:
        raise ValueError(f"--samples must be >= 1, got {args.samples}")
    c_T, knobs = field_settings(ctx)
    domain = build_domain(args.domain, parse_fraction(args.delta), ctx.section("lattice"), verbose=ctx.verbose)
    sampler = GffSampler(domain, c_T, verbose=ctx.verbose)
    radii = [float(r) for r in parse_fraction_list(args.radii)]
    rng = ctx.rng("gff")

    stored = np.empty((min(args.write, args.samples), domain.n_vertices))
    averages = np.empty((args.samples, len(radii)))
    for k in range(args.samples):
        sample = sampler.sample(rng)
        if k < stored.shape[0]:
            stored[k] = sample.values
        averages[k] = [circle_average(sample, (0.0, 0.0), r, knobs["points"]) for r in radii]

    variances = averages.var(axis=0, ddof=1)
    payload = {
        "domain":     args.domain,
        "delta":      fraction_str(domain.delta),
        "n_inner":    domain.n_inner,
        "bandwidth":  sampler.bandwidth,
        "samples":    args.samples,
        "stored":     int(stored.shape[0]),
        "radii":      radii,
        "variances":  variances.tolist(),
        "exact":      [sampler.variance(circle_weights(domain, (0.0, 0.0), r, knobs["points"])) for r in radii],
    }
    if len(radii) >= 2:
        fit = linregress(np.log(1 / np.array(radii)), variances)
        payload["slope"] = float(fit.slope)
        payload["intercept"] = float(fit.intercept)
        payload["pass"] = abs(fit.slope - 1) <= args.slope_tolerance
    constants = {"c_T": c_T}
    if args.calibrate:
        calibration = calibrate_c_T(domain, radii, args.samples, ctx.rng("gff/calibrate"), points=knobs["points"], seed=ctx.seeds.get("gff/calibrate"), verbose=ctx.verbose)
        constants["calibration"] = calibration.to_json()

    ctx.writer.add_fields(args.out, {**field_header(FieldSample(domain, stored[0], c_T)), "samples": int(stored.shape[0])}, stored)
    return ctx.result(args.out, "gff", payload, constants)


def run_gmc(args: argparse.Namespace, ctx: RunContext) -> ResultEnvelope:
    c_T, knobs = field_settings(ctx)
    if args.field:
        sample = field_from_file(args.field, args.index)
    else:
        domain = build_domain(args.domain, parse_fraction(args.delta), ctx.section("lattice"), verbose=ctx.verbose)
        sample = GffSampler(domain, c_T, verbose=ctx.verbose).sample(ctx.rng("gmc/field"))

    def measure_of(field: FieldSample):
        if args.kind == "area":
            return gmc_measure(field, args.exponent, args.r, **knobs)
        if args.kind == "boundary":
            return boundary_measure(field, args.exponent, args.r, **knobs)
        return clock_rates(field, args.alpha4, args.r, **knobs)

    measure = measure_of(sample)
    # atoms of μ_{h+c} against e^{a·c}·μ_h; boundary atoms carry e^{a·c/2}
    power = {"area": args.exponent, "boundary": args.exponent / 2, "clock": ALPHA}[args.kind]
    offsets = [float(x) for x in parse_fraction_list(args.shifts)]
    worst = dict.fromkeys(offsets, 0.0)
    checked = [sample]
    if args.fields > 1 and not args.field:
        sampler = GffSampler(sample.domain, c_T, verbose=False)
        rng = ctx.rng("gmc/shift-fields")
        checked += [sampler.sample(rng) for _ in range(args.fields - 1)]
    for h in checked:
        base = measure if h is sample else measure_of(h)
        for c in offsets:
            expected = np.exp(power * c) * base.masses
            scale = np.abs(expected).max() or 1.0
            error = float(np.abs(measure_of(h.shifted(c)).masses - expected).max() / scale)
            worst[c] = max(worst[c], error)
    shifts = [{"c": c, "factor": float(np.exp(power * c)), "max_abs_error": worst[c]} for c in offsets]

    positions = sample.domain.positions
    rows = [
        {"v": int(v), "x": float(positions[v, 0]), "y": float(positions[v, 1]), "mass": float(m)}
        for v, m in zip(measure.locations, measure.masses)
    ]
    payload = {
        "kind":     args.kind,
        "params":   measure.params,
        "atoms":    len(measure),
        "total":    measure.total,
        "shifts":   shifts,
        "fields":   len(checked),
        "pass":     all(s["max_abs_error"] <= SHIFT_TOLERANCE for s in shifts),
        "field":    sample.to_json(),
    }
    if args.csv:
        ctx.writer.add_csv(args.csv, "gmc", rows)
    return ctx.result(args.out, "gmc", payload, {"c_T": sample.c_T})
