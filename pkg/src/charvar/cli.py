"""Command-line entry point.

Tangle specs use this grammar::

    expr := term (('+' | '*') term)*
    term := '[' int ']' | '[1/' int ']' | '[p/q:' int '/' int ']' | '(' expr ')'

``*`` is vertical composition and ``+`` horizontal, both left-associative.
Exit codes: 0 when everything passes, 1 on a suite failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CharvarError, EmptySolutionSet, InfiniteSolutionSet, InvalidFraction, ParseError, UnknownSuite
from .explorer import CHART_VARIABLES, chart_point_at, sample_chart
from .knots import KNOTS, LONGITUDE, Slope, build_rep, dehn_filling_solutions, filling_residual
from .suites import SUITES, TOLERANCES, resolve_suites, run_suite
from .tangles import closure_defect, closure_reps, parse_tangle
from .trace_lab import TOL_LOCUS

log = logging.getLogger("charvar")

DEFAULT_SEED = 0
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    seed: int
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "json"

    def header(self, command: str, ident: str) -> dict:
        return {
            "tool": "charvar",
            "version": __version__,
            "command": command,
            "id": ident,
            "seed": self.seed,
            "tolerances": self.tolerances,
        }


def encode(x):
    """JSON-ready copy with complex numbers as [re, im]."""
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return [encode(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {k: encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, float) and not np.isfinite(x):
        return str(x)
    return x


def _flatten(prefix: str, x, out: dict):
    if isinstance(x, (complex, np.complexfloating)):
        out[f"{prefix}_re"] = float(x.real)
        out[f"{prefix}_im"] = float(x.imag)
    elif isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(x, (list, tuple, np.ndarray)):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out[prefix] = x


def render(header: dict, rows: list[dict], fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        doc = dict(header)
        doc.update(extra or {})
        doc["records"] = rows
        return json.dumps(encode(doc), indent=2) + "\n"
    buf = io.StringIO()
    meta = {k: v for k, v in header.items() if k != "tolerances"}
    buf.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    buf.write("# tolerances=" + json.dumps(header["tolerances"]) + "\n")
    for k, v in (extra or {}).items():
        buf.write(f"# {k}={v}\n")
    flat = []
    for r in rows:
        f = {}
        _flatten("", r, f)
        flat.append(f)
    cols = list(dict.fromkeys(k for f in flat for k in f))
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)
    return buf.getvalue()


def write_atomic(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


# -- commands -----------------------------------------------------------------


def cmd_verify(suites: list, config: RunConfig, scale: float = 1.0) -> int:
    names = resolve_suites(suites)
    tols = {n: config.tolerances.get(n, TOLERANCES[n]) for n in names}
    config = RunConfig(config.seed, tols, config.output, config.fmt)
    records = []
    for name in names:
        rec = run_suite(name, config.seed, tols, scale)
        records.append(rec.as_dict())
        mark = "PASS" if rec.passed else "FAIL"
        print(f"{mark} {name}: {rec.cases} cases, max residual {rec.max_residual:.3e} (tol {rec.tolerance:.0e})", file=sys.stderr)
    write_atomic(config.output, render(config.header("verify", ",".join(names)), records, config.fmt))
    return EXIT_OK if all(r["passed"] for r in records) else EXIT_FAIL


def cmd_sample(chart: str, count: int, config: RunConfig) -> int:
    pts = sample_chart(chart, count, config.seed)
    rows = [
        {"chart": chart, "seed": config.seed, "params": p.params, "residuals": p.residuals, "excluded_margin": p.margin}
        for p in pts
    ]
    tols = {"locus_margin": TOL_LOCUS, **config.tolerances}
    header = RunConfig(config.seed, tols).header("sample", chart)
    write_atomic(config.output, render(header, rows, config.fmt, {"variables": list(CHART_VARIABLES[chart])}))
    return EXIT_OK


def dehn_table(knot: str, slope: Slope, seed: int) -> tuple[list[dict], str | None]:
    try:
        ts = dehn_filling_solutions(knot, slope=slope)
    except (EmptySolutionSet, InfiniteSolutionSet) as exc:
        return [], str(exc)
    rows = []
    for i, t in enumerate(ts):
        p = chart_point_at(knot, t, seed + i)
        rep = build_rep(knot, p.values)
        rows.append({"t": t, "chart_point": p.params, "residual": filling_residual(rep, slope)})
    return rows, None


def cmd_dehn(knot: str, slope: Slope, config: RunConfig) -> int:
    rows, reason = dehn_table(knot, slope, config.seed)
    tol = config.tolerances.get("filling", 1e-8)
    extra = {"slope": str(slope), "rows": len(rows), "reason": reason, "longitude": list(LONGITUDE[knot])}
    header = RunConfig(config.seed, {"filling": tol}).header("dehn", knot)
    write_atomic(config.output, render(header, rows, config.fmt, extra))
    if reason:
        print(f"empty table: {reason}", file=sys.stderr)
    return EXIT_OK if all(r["residual"] <= tol for r in rows) else EXIT_FAIL


def cmd_tangle(spec: str, closure: str, t: complex, config: RunConfig, radius: float = 5.0) -> int:
    tangle = parse_tangle(spec)
    tol = config.tolerances.get("closure", 1e-8)
    found = closure_reps(tangle, closure=closure, t=t, radius=radius, tol=tol)
    rows = [{"s": s, "defect": closure_defect(rep, closure), "residual": rep.residual()} for s, rep in found]
    header = RunConfig(config.seed, {"closure": tol}).header("tangle", spec)
    extra = {"closure": closure, "t": t, "radius": radius}
    write_atomic(config.output, render(header, rows, config.fmt, extra))
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("tolerances are given as name=value")
    return name, float(value)


def _slope(text: str) -> Slope:
    try:
        return Slope.parse(text)
    except (ValueError, CharvarError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def default_seed() -> int:
    env = os.environ.get("CHARVAR_SEED")
    return int(env) if env else DEFAULT_SEED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $CHARVAR_SEED or 0)")
    common.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="charvar", description="SL(2,C) representations of knot groups from tangle decompositions.")
    ap.add_argument("--version", action="version", version=f"charvar {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run property suites")
    v.add_argument("--suites", nargs="+", default=["all"], help=f"suite names or 'all': {', '.join(SUITES)}")
    v.add_argument("--scale", type=float, default=1.0, help="multiply every suite's case count")

    s = sub.add_parser("sample", parents=[common], help="sample chart points")
    s.add_argument("--chart", required=True, choices=tuple(CHART_VARIABLES))
    s.add_argument("--count", type=int, default=100)

    d = sub.add_parser("dehn", parents=[common], help="meridian traces admitted by a Dehn filling")
    d.add_argument("--knot", required=True, choices=KNOTS)
    d.add_argument("--slope", required=True, type=_slope, help="a/b")

    t = sub.add_parser("tangle", parents=[common], help="closure roots of a tangle")
    t.add_argument("--spec", required=True)
    t.add_argument("--closure", choices=("N", "D"), default="N")
    t.add_argument("--t", type=_complex, default=complex(2.5))
    t.add_argument("--radius", type=float, default=5.0)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    seed = args.seed if args.seed is not None else default_seed()
    config = RunConfig(seed, dict(args.tol), args.output, args.format)
    try:
        if args.command == "verify":
            return cmd_verify(args.suites, config, args.scale)
        if args.command == "sample":
            if args.count < 1:
                print("error: --count must be positive", file=sys.stderr)
                return EXIT_USAGE
            return cmd_sample(args.chart, args.count, config)
        if args.command == "dehn":
            return cmd_dehn(args.knot, args.slope, config)
        return cmd_tangle(args.spec, args.closure, args.t, config, args.radius)
    except UnknownSuite as exc:
        print(f"error: unknown suite {exc}; choose from {', '.join(SUITES)} or all", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, InvalidFraction) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CharvarError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
