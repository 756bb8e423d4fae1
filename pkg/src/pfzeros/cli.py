"""Command-line entry point: ``pfzeros <command> ...``.

Records go to stdout (or ``--out``) as newline-delimited JSON or CSV.
Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from typing import Iterable, Sequence

import numpy as np

from pfzeros import __version__, correlations, moments, montecarlo, verify
from pfzeros.errors import PfzerosError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- parsing helpers ---------------------------------------------------------------


def parse_real_points(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse real points {text!r}: {exc}")


def parse_complex_point(tok: str) -> complex:
    """Parse ``a+bi`` (or ``bi``) with b > 0."""
    tok = tok.strip().replace(" ", "")
    if not tok.endswith("i"):
        raise UsageError(f"complex point {tok!r} must look like a+bi")
    try:
        z = complex(tok[:-1] + "j")
    except ValueError:
        raise UsageError(f"cannot parse complex point {tok!r}; expected a+bi")
    if not z.imag > 0:
        raise UsageError(f"complex point {tok!r} must have positive imaginary part")
    return z


def parse_complex_points(text: str) -> list[complex]:
    return [parse_complex_point(tok) for tok in text.split(",") if tok.strip()]


def parse_interval(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"interval {text!r} must look like a:b")
    if not a < b:
        raise UsageError(f"interval {text!r} must have a < b")
    return a, b


def parse_cell(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(":"))
    except ValueError:
        vals = ()
    if len(vals) != 4:
        raise UsageError(f"cell {text!r} must look like x0:x1:y0:y1")
    return vals  # type: ignore[return-value]


def _radius(text: str) -> float:
    r = float(text)
    if not 0 < r < 1:
        raise argparse.ArgumentTypeError(f"r must lie in (0, 1), got {text}")
    return r


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    # argparse treats "-0.05:0.05" as an option; glue such values to their flag
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and re.match(r"^-[0-9.]", argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


# --- output ---------------------------------------------------------------------


def _clean(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None  # keep the JSON strict
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def record(quantity: str, inputs: dict, **fields) -> dict:
    rec = {"quantity": quantity, "inputs": _clean(inputs)}
    for k, v in fields.items():
        if v is not None:
            rec[k] = _clean(v)
    rec["version"] = __version__
    return rec


def _flatten(rec: dict, prefix: str = "") -> dict:
    flat = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            flat[key] = json.dumps(v)
        elif isinstance(v, float):
            flat[key] = format(v, ".17g")
        else:
            flat[key] = v
    return flat


def render(records: Iterable[dict], fmt: str) -> str:
    records = list(records)
    if fmt == "json":
        return "".join(json.dumps(r) + "\n" for r in records)
    rows = [_flatten(r) for r in records]
    header: list[str] = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _report_fields(rep: montecarlo.EstimatorReport) -> dict:
    return {
        "closed_form": rep.prediction,
        "mc_estimate": rep.estimate,
        "std_error": rep.std_error,
        "z_score": rep.z_score,
        "n_samples": rep.n_samples,
        "details": rep.details or None,
    }


# --- commands ----------------------------------------------------------------------


def cmd_rho(args) -> tuple[list[dict], int]:
    if args.grid:
        return _rho_grid(args), EXIT_OK
    if args.points is None:
        raise UsageError("--points is required unless --grid is given")
    if args.domain == "real":
        pts = parse_real_points(args.points)
        val = correlations.rho_real(pts, kind=args.kernel, allow_coincident=args.allow_coincident)
        return [record("rho_real", {"points": pts, "kernel": args.kernel}, value=val)], EXIT_OK
    pts = parse_complex_points(args.points)
    val = correlations.rho_complex(pts)
    return [record("rho_complex", {"points": pts}, value=val)], EXIT_OK


def _rho_grid(args) -> list[dict]:
    lim = args.grid_max
    lattice = np.linspace(-lim, lim, args.grid_size)
    if args.grid == "rho1":
        return [record("rho1", {"s": float(s)}, value=float(correlations.rho1_closed(s))) for s in lattice]
    out = []
    for s in lattice:
        for t in lattice:
            out.append(record("R", {"s": float(s), "t": float(t)}, value=float(correlations.R(s, t))))
    return out


def cmd_moments(args) -> tuple[list[dict], int]:
    if args.kind == "complex-abs2":
        pts = parse_complex_points(args.points)
        val = moments.complex_abs2_moment(pts)
        rep = None
        if args.mc:
            rep = montecarlo.estimate_complex_abs2_moment(pts, args.degree, args.samples, args.seed, args.workers)
        fields = _report_fields(rep) if rep else {"closed_form": val}
        return [record("complex_abs2_moment", {"points": pts}, value=val, **fields)], EXIT_OK
    pts = parse_real_points(args.points)
    fn = {"abs": moments.abs_moment, "sgn": moments.sgn_moment, "product": moments.product_moment}[args.kind]
    val = fn(pts)
    fields: dict = {"closed_form": val}
    if args.mc:
        fields = _report_fields(montecarlo.estimate_gaussian_moments(pts, args.kind, args.samples, args.seed, args.workers))
    return [record(f"{args.kind}_moment", {"points": pts}, value=val, **fields)], EXIT_OK


def cmd_counts(args) -> tuple[list[dict], int]:
    st = correlations.count_stats(args.r, args.mode)
    return [record("counts", {"r": args.r, "mode": args.mode}, mean=st.mean, variance=st.variance)], EXIT_OK


def cmd_verify(args) -> tuple[list[dict], int]:
    if args.trials <= 0:
        raise UsageError("--trials must be positive")
    fn = verify.SUITES[args.suite]
    if args.suite == "ladder":
        checks = fn(n=args.n, trials=args.trials, seed=args.seed)
    else:
        checks = fn(trials=args.trials, seed=args.seed)
    recs = [record(f"verify.{args.suite}", {"suite": args.suite, "trials": args.trials, "seed": args.seed, "n": args.n}, **c.to_dict()) for c in checks]
    ok = all(c.passed for c in checks)
    return recs, EXIT_OK if ok else EXIT_VERIFY


def cmd_mc(args) -> tuple[list[dict], int]:
    common = {"samples": args.samples, "seed": args.seed, "degree": args.degree}
    exp = args.experiment
    if exp == "rho1":
        if not args.bins:
            raise UsageError("rho1 needs --bins a:b[,c:d...]")
        bins = [parse_interval(b) for b in args.bins.split(",")]
        reps = montecarlo.estimate_rho1(bins, args.degree, args.samples, args.seed, args.workers)
        return [record("mc.rho1", dict(common, bin=list(b)), **_report_fields(r)) for b, r in zip(bins, reps)], EXIT_OK
    if exp == "rho2":
        if not args.bins or len(args.bins.split(",")) != 2:
            raise UsageError("rho2 needs --bins a:b,c:d")
        b1, b2 = (parse_interval(b) for b in args.bins.split(","))
        rep = montecarlo.estimate_rho2(b1, b2, args.degree, args.samples, args.seed, args.workers)
        return [record("mc.rho2", dict(common, bins=[list(b1), list(b2)]), **_report_fields(rep))], EXIT_OK
    if exp == "rho1c":
        if not args.cell:
            raise UsageError("rho1c needs --cell x0:x1:y0:y1")
        cell = parse_cell(args.cell)
        rep = montecarlo.estimate_rho1_complex(cell, args.degree, args.samples, args.seed, args.workers)
        return [record("mc.rho1c", dict(common, cell=list(cell)), **_report_fields(rep))], EXIT_OK
    if exp == "counts":
        if args.r is None:
            raise UsageError("counts needs --r")
        m, v = montecarlo.estimate_count_stats(args.r, args.degree, args.samples, args.seed, args.workers, args.method)
        inputs = dict(common, r=args.r)
        return [record("mc.mean_count", inputs, **_report_fields(m)), record("mc.var_count", inputs, **_report_fields(v))], EXIT_OK
    if exp == "slope":
        radii = [_radius(x) for x in (args.radii or "0.9,0.95,0.99").split(",")]
        rep = montecarlo.estimate_variance_slope(radii, args.degree, args.samples, args.seed, args.workers, args.method)
        return [record("mc.variance_slope", dict(common, radii=radii), **_report_fields(rep))], EXIT_OK
    if exp == "moments":
        if not args.points:
            raise UsageError("moments needs --points")
        pts = parse_real_points(args.points)
        rep = montecarlo.estimate_gaussian_moments(pts, args.kind, args.samples, args.seed, args.workers)
        return [record(f"mc.{args.kind}_moment", dict(common, points=pts), **_report_fields(rep))], EXIT_OK
    raise UsageError(f"unknown experiment {exp!r}")


# --- parser --------------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default=None, help="default json (csv for --grid)")
    p.add_argument("--out", help="write records to FILE instead of stdout")


def _add_mc(p: argparse.ArgumentParser, samples: int) -> None:
    p.add_argument("--samples", type=_positive_int, default=samples)
    p.add_argument("--seed", type=_seed, default=montecarlo.DEFAULT_SEED)
    p.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--degree", type=_positive_int, default=None, help="series truncation degree (default: from the truncation rule)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pfzeros", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pfzeros {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rho", help="correlation functions of real or complex zeros")
    p.add_argument("domain", choices=("real", "complex"))
    p.add_argument("--points", help="comma-separated reals, or a+bi complex points")
    p.add_argument("--kernel", choices=("K", "Kprime"), default="K")
    p.add_argument("--allow-coincident", action="store_true", help="return 0 for repeated points instead of failing")
    p.add_argument("--grid", choices=("rho1", "R"), help="emit rho1(s) or R(s, t) over a lattice")
    p.add_argument("--grid-size", type=_positive_int, default=101)
    p.add_argument("--grid-max", type=_radius, default=0.99)
    _add_output(p)
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("moments", help="absolute, sign and product moments")
    p.add_argument("kind", choices=("abs", "sgn", "product", "complex-abs2"))
    p.add_argument("--points", required=True)
    p.add_argument("--mc", action="store_true", help="append a Monte Carlo cross-check")
    _add_mc(p, 1_000_000)
    _add_output(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("counts", help="mean and variance of the number of real zeros in [-r, r]")
    p.add_argument("--r", type=_radius, required=True)
    p.add_argument("--mode", choices=("closed", "integrated"), default="closed")
    _add_output(p)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("verify", help="deterministic identity suites")
    p.add_argument("suite", choices=sorted(verify.SUITES))
    p.add_argument("--trials", type=int, default=verify.DEFAULT_TRIALS)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--n", type=_positive_int, default=2, help="half the number of points (ladder suite)")
    _add_output(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mc", help="Monte Carlo experiments")
    p.add_argument("experiment", choices=("rho1", "rho2", "rho1c", "counts", "slope", "moments"))
    p.add_argument("--bins")
    p.add_argument("--cell")
    p.add_argument("--r", type=_radius)
    p.add_argument("--radii", help="comma-separated radii for the slope experiment")
    p.add_argument("--points")
    p.add_argument("--kind", choices=("abs", "sgn", "product"), default="abs")
    p.add_argument("--method", choices=("auto", "companion", "grid"), default="auto")
    _add_mc(p, 200_000)
    _add_output(p)
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(argv))
    try:
        records, code = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"pfzeros: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PfzerosError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"pfzeros: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    fmt = args.format or ("csv" if getattr(args, "grid", None) else "json")
    text = render(records, fmt)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
