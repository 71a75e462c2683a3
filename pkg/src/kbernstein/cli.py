"""Command-line front end.

    kbernstein norm --poles 0.5,0.3+0.2i
    kbernstein bounds --n 16 --r 0.5
    kbernstein sweep --n 4..64x2 --r 0,0.5,0.9 --format csv
    kbernstein extremal --n 100 --s 10 --r 0.5
    kbernstein embeddings --space besov:1 --n 4,8 --r 0.5 --trials 20 --seed 1
    kbernstein verify

Exit codes: 0 success, 1 verification failure or violated bound, 2 bad arguments.
Set KBERNSTEIN_THREADS to evaluate sweep cells in parallel.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import List, Optional, Sequence

from . import bounds, hardy
from .blaschke import PoleConfiguration
from .errors import BoundViolation, InvalidArgumentError, KBernsteinError
from .model_space import operator_norm
from .verification import run_checks, suite_passed

SIG_DIGITS = 12
# echoed inputs are printed in shortest form; computed values keep a decimal point
PARAMETER_FIELDS = {"n", "r", "s", "trials", "seed", "gram_size", "iterations"}


def _format_float(x: float, parameter: bool) -> str:
    text = f"{x:.{SIG_DIGITS}g}"
    if parameter or not math.isfinite(x) or any(c in text for c in ".en"):
        return text
    return text + ".0"


def _format_value(key: str, value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value, key in PARAMETER_FIELDS)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.{SIG_DIGITS}g}")
    return value


def _sorted(records: List[dict]) -> List[dict]:
    if all("n" in rec and "r" in rec for rec in records):
        return sorted(records, key=lambda rec: (rec["n"], rec["r"]))
    return records


def emit(records: Sequence[dict], fmt: str = "csv") -> str:
    """Render flat records as CSV (header = keys of the first record) or a JSON array."""
    records = [dict(r) for r in records]
    if not records:
        raise InvalidArgumentError("nothing to emit")
    records = _sorted(records)
    if fmt == "json":
        payload = [{k: _json_value(v) for k, v in rec.items()} for rec in records]
        return json.dumps(payload, indent=2) + "\n"
    if fmt != "csv":
        raise InvalidArgumentError(f"unknown format {fmt!r}")
    header = list(records[0].keys())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_format_value(k, rec[k]) for k in header])
    return buf.getvalue()


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("I", "i")
    if t.endswith("i"):
        t = t[:-1] + "j"
        # "i", "+i", "0.3-i" -> unit imaginary part
        if t[:-1] in ("", "+", "-") or t[-2] in "+-":
            t = t[:-1] + "1j"
    try:
        return complex(t)
    except ValueError:
        raise InvalidArgumentError(f"cannot parse pole {text!r}") from None


def parse_poles(text: str) -> List[complex]:
    return [parse_complex(p) for p in text.split(",") if p.strip()]


def _parse_range(item: str, cast):
    lo_text, hi_text = item.split("..", 1)
    step_kind, step = "+", None
    for sep in ("x", "+"):
        if sep in hi_text:
            hi_text, step_text = hi_text.split(sep, 1)
            step_kind, step = sep, cast(step_text)
            break
    lo, hi = cast(lo_text), cast(hi_text)
    if step is None:
        step = cast(1)
    if (step_kind == "x" and step <= 1) or (step_kind == "+" and step <= 0):
        raise InvalidArgumentError(f"range {item!r} does not advance")
    out, v = [], lo
    eps = 1e-9 * max(1.0, abs(hi))
    while v <= hi + eps:
        out.append(v)
        v = v * step if step_kind == "x" else v + step
        if cast is float:
            v = round(v, 12)
    return out


def parse_list(text: str, cast=float) -> list:
    """Comma list whose items may be ranges: ``4..64x2`` (doubling), ``0..0.9+0.1``."""
    out = []
    try:
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            out.extend(_parse_range(item, cast) if ".." in item else [cast(item)])
    except ValueError:
        raise InvalidArgumentError(f"cannot parse list {text!r}") from None
    if not out:
        raise InvalidArgumentError("empty list")
    return out


def _spec_from_grid(grid: Optional[int]):
    return None if grid is None else hardy.QuadratureSpec(grid)


def _check_radii(r_list):
    for r in r_list:
        if not 0.0 <= r < 1.0:
            raise InvalidArgumentError(f"r={r} must satisfy 0 <= r < 1")


def cmd_norm(args) -> List[dict]:
    config = PoleConfiguration(parse_poles(args.poles))
    res = operator_norm(config, _spec_from_grid(args.grid))
    return [{
        "n": config.n, "r": config.r, "norm": res.norm, "lambda_max": res.lambda_max,
        "gram_size": res.gram_size, "iterations": res.iterations, "residual": res.residual,
    }]


def cmd_bounds(args) -> List[dict]:
    n_list, r_list = parse_list(args.n, int), parse_list(args.r)
    _check_radii(r_list)
    out = []
    for n in sorted(set(n_list)):
        for r in sorted(set(r_list)):
            rep = bounds.bound_report(n, r, _spec_from_grid(args.grid))
            rec = rep.record()
            rec["en_norm"] = math.sqrt(bounds.confluent_derivative_norm_closed_form(n, r))
            rec["distance"] = rep.distance
            out.append(rec)
    return out


def cmd_sweep(args) -> List[dict]:
    n_list, r_list = parse_list(args.n, int), parse_list(args.r)
    _check_radii(r_list)
    return [rep.record() for rep in bounds.convergence_sweep(n_list, r_list)]


def cmd_extremal(args) -> List[dict]:
    _check_radii([args.r])
    if args.s is not None and (args.s < 0 or args.s % 2):
        raise InvalidArgumentError("s must be a non-negative even integer")
    c = bounds.extremal_certificate(args.n, args.r, args.s, _spec_from_grid(args.grid))
    return [{
        "n": c.n, "s": c.s, "r": c.r, "Q": c.Q, "certified_lower": c.certified_lower,
        "measured": c.measured, "norm_sq": c.norm_sq,
        "normalized": c.certified_lower * (1.0 - c.r) / (c.n * (1.0 + c.r)),
    }]


def cmd_embeddings(args) -> List[dict]:
    space = hardy.parse_space(args.space)
    n_list, r_list = parse_list(args.n, int), parse_list(args.r)
    _check_radii(r_list)
    recs = bounds.embedding_ratio_sweep(space, n_list, r_list, args.trials, args.seed)
    return [rec.record() for rec in recs]


def cmd_verify(args, out) -> int:
    def report(res):
        print(res.line(), file=out, flush=True)

    results = run_checks(report)
    ok = suite_passed(results)
    print("verify: " + ("all checks passed" if ok else "FAILED"), file=out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kbernstein",
        description="Norm of differentiation on model spaces K_B and Bernstein-type bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format="json"):
        p.add_argument("--format", choices=("csv", "json"), default=default_format)
        p.add_argument("--grid", type=int, default=None,
                       help="circle sample count (power of two); default from pole geometry")
        return p

    p = common(sub.add_parser("norm", help="||D|| on K_B for given poles"))
    p.add_argument("--poles", required=True, help="comma list, e.g. 0.5,0.3+0.2i")

    p = common(sub.add_parser("bounds", help="bound report for confluent poles"))
    p.add_argument("--n", required=True)
    p.add_argument("--r", required=True)

    p = common(sub.add_parser("sweep", help="convergence sweep over (n, r)"), "csv")
    p.add_argument("--n", required=True, help="e.g. 4..64x2 or 2,8,32")
    p.add_argument("--r", required=True, help="e.g. 0,0.5 or 0..0.9+0.1")

    p = common(sub.add_parser("extremal", help="certified lower bound vs measured ratio"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--s", type=int, default=None, help="even; default largest even <= sqrt(n)")

    p = common(sub.add_parser("embeddings", help="||f||_X / ||f||_2 over random f"), "csv")
    p.add_argument("--space", required=True, help="wiener or besov:<s>")
    p.add_argument("--n", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    sub.add_parser("verify", help="run the invariant suite")
    return parser


COMMANDS = {
    "norm": cmd_norm, "bounds": cmd_bounds, "sweep": cmd_sweep,
    "extremal": cmd_extremal, "embeddings": cmd_embeddings,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        if args.command == "verify":
            return cmd_verify(args, out)
        if getattr(args, "grid", None) is not None:
            hardy.QuadratureSpec(args.grid)
        records = COMMANDS[args.command](args)
        out.write(emit(records, args.format))
        return 0
    except InvalidArgumentError as exc:
        print(f"kbernstein: {exc}", file=sys.stderr)
        return 2
    except BoundViolation as exc:
        print(f"kbernstein: bound violated: {exc}", file=sys.stderr)
        return 1
    except KBernsteinError as exc:
        print(f"kbernstein: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
