"""Batch command-line front end with machine-readable output.

Subcommands: bound-check, rate-fit, seq-check, propagate, trace.

Exit codes: 0 on success/pass, 2 when a scientific check fails (a bound
certificate or rate fit does not pass), 1 on usage or parameter errors.
All numeric flags are validated before any computation starts; output
files are written to a temporary name and atomically renamed, so no
partial files survive an error.  Identical flags and seed produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .convergence import (
    ConvergenceCriterion,
    DEFAULT_SEED,
    default_points,
    parse_sequence,
    pointwise_trace,
    rate_fit,
    required_exponent,
    sequence_applicable,
)
from .errors import ParameterError
from .multipliers import Family, MultiplierSpec, certify
from .phase_laws import parse_law
from .propagation import ShiftSpec, evaluate_shifted
from .spectral import make_grid, random_field, read_field_csv

__all__ = ["build_parser", "main"]


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent) or ".", prefix=target.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, str(target))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, payload_json: str) -> None:
    if args.out:
        _write_atomic(args.out, payload_json)
    else:
        sys.stdout.write(payload_json)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(row[h])) for h in header))
    return "\n".join(lines) + "\n"


def _parse_grid(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise ParameterError(f"grid must be n,xi_max,dxi, got {text!r}")
    return make_grid(int(parts[0]), float(parts[1]), float(parts[2]))


def _parse_deltas(text: str, per_decade: int):
    """Geometric sweep ``start:end`` at per_decade points per decade."""
    parts = text.split(":")
    if len(parts) == 1:
        values = [float(v) for v in text.split(",")]
        if not values:
            raise ParameterError("empty delta list")
        return values
    if len(parts) != 2:
        raise ParameterError(f"deltas must be start:end or a comma list, got {text!r}")
    start, end = float(parts[0]), float(parts[1])
    if not (0 < end <= start < 1):
        raise ParameterError("delta sweep needs 0 < end <= start < 1")
    e0, e1 = math.log10(start), math.log10(end)
    count = int(round((e0 - e1) * per_decade)) + 1
    return [float(10.0**e) for e in np.linspace(e0, e1, max(count, 2))]


def _parse_points(text: str, n: int):
    pts = []
    for chunk in text.split(";"):
        coords = [float(v) for v in chunk.split(",")]
        if len(coords) != n:
            raise ParameterError(f"point {chunk!r} does not have dimension {n}")
        pts.append(coords)
    return np.asarray(pts, dtype=float)


def _parse_mu(text: str, n: int):
    mu = np.asarray([float(v) for v in text.split(",")], dtype=float)
    if mu.shape != (n,):
        raise ParameterError(f"mu must have dimension {n}")
    norm = float(np.linalg.norm(mu))
    if norm == 0.0:
        raise ParameterError("mu must be nonzero")
    return mu / norm


def _multiplier_template(args, delta: float) -> MultiplierSpec:
    family = Family(args.family)
    if family.uses_law:
        if args.gamma is None:
            raise ParameterError(f"--family {family.value} requires --gamma")
        if args.a is not None:
            raise ParameterError(f"--a is not valid with --family {family.value}")
        law, a = parse_law(args.gamma), None
    else:
        if args.a is None:
            raise ParameterError(f"--family {family.value} requires --a")
        if args.gamma is not None:
            raise ParameterError(f"--gamma is not valid with --family {family.value}")
        law, a = None, args.a
    beta = None
    if family.shifted:
        if args.beta is None:
            raise ParameterError(f"--family {family.value} requires --beta")
        beta = args.beta
    elif args.beta is not None:
        raise ParameterError(f"--beta is not valid with --family {family.value}")
    return MultiplierSpec(family=family, s=args.s, delta=delta, a=a, law=law, beta=beta)


def _law_from_args(args):
    if args.gamma is not None and args.a is not None:
        raise ParameterError("give either --gamma or --a, not both")
    if args.gamma is not None:
        return parse_law(args.gamma)
    if args.a is not None:
        return parse_law(f"power:a={args.a}")
    raise ParameterError("a phase law is required (--gamma NAME or --a EXPONENT)")


def cmd_bound_check(args) -> int:
    deltas = _parse_deltas(args.deltas, args.per_decade)
    template = _multiplier_template(args, deltas[0])
    cert = certify(template, deltas, strict=not args.unsafe_params)
    if args.format == "csv":
        text = _csv_text(["delta", "sup", "envelope", "ratio", "argmax"], cert.sweep_rows())
    else:
        text = _json_text(cert.to_dict())
    _emit(args, text)
    return 0 if cert.passed else 2


def cmd_rate_fit(args) -> int:
    deltas = _parse_deltas(args.deltas, args.per_decade)
    template = _multiplier_template(args, deltas[0])
    report = rate_fit(template, deltas)
    if args.format == "csv":
        text = _csv_text(["delta", "sup", "envelope", "ratio"], report.sweep_rows())
    else:
        text = _json_text(report.to_dict())
    _emit(args, text)
    return 0 if report.passed else 2


def cmd_seq_check(args) -> int:
    seq = parse_sequence(args.seq)
    criterion = ConvergenceCriterion(args.criterion)
    law = parse_law(args.gamma) if args.gamma is not None else None
    strict = not args.unsafe_params
    kwargs = dict(s=args.s, a=args.a, beta=args.beta, law=law)
    cond = required_exponent(criterion, **kwargs, strict=strict)
    verdict = sequence_applicable(seq, criterion, **kwargs, strict=strict)
    payload = {
        "criterion": criterion.value,
        "sequence": seq.describe(),
        "form": cond.form,
        "q": cond.q if cond.q is not None else cond.power_equivalent,
        "decision": verdict.decision,
        "reason": verdict.reason,
    }
    if args.format == "csv":
        lines = ["criterion,sequence,form,q,decision,reason"]
        q = payload["q"]
        lines.append(
            ",".join(
                [
                    payload["criterion"],
                    payload["sequence"],
                    payload["form"],
                    repr(float(q)) if q is not None else "",
                    payload["decision"],
                    '"' + payload["reason"] + '"',
                ]
            )
        )
        text = "\n".join(lines) + "\n"
    else:
        text = _json_text(payload)
    _emit(args, text)
    return 0


def cmd_propagate(args) -> int:
    field = read_field_csv(args.field)
    law = _law_from_args(args)
    times = [float(v) for v in args.times.split(",")]
    if any(t < 0 for t in times):
        raise ParameterError("times must be nonnegative")
    if args.points is not None:
        points = _parse_points(args.points, field.grid.n)
    else:
        points = default_points(field.grid.n, args.num_points, args.seed)
    shift = None
    if args.beta is not None:
        mu = _parse_mu(args.mu, field.grid.n) if args.mu else np.eye(field.grid.n)[0]
        shift = ShiftSpec(beta=args.beta, mu=mu)
    rows = []
    for t in times:
        for x in points:
            value = evaluate_shifted(field, law, t, shift, x)
            row = {"t": t}
            row.update({f"x_{i + 1}": float(v) for i, v in enumerate(np.atleast_1d(x))})
            row.update({"re": value.real, "im": value.imag})
            rows.append(row)
    header = ["t"] + [f"x_{i + 1}" for i in range(field.grid.n)] + ["re", "im"]
    if args.format == "csv":
        text = _csv_text(header, rows)
    else:
        text = _json_text(rows)
    _emit(args, text)
    return 0


def cmd_trace(args) -> int:
    grid = _parse_grid(args.grid)
    if args.field is not None:
        field = read_field_csv(args.field)
        grid = field.grid
    else:
        field = random_field(grid, np.random.default_rng(args.seed))
    law = _law_from_args(args)
    seq = parse_sequence(args.seq)
    if args.points is not None:
        points = _parse_points(args.points, grid.n)
    else:
        points = default_points(grid.n, args.num_points, args.seed)
    shift = None
    if args.beta is not None:
        mu = _parse_mu(args.mu, grid.n) if args.mu else np.eye(grid.n)[0]
        shift = ShiftSpec(beta=args.beta, mu=mu)
    trace = pointwise_trace(field, law, seq, args.s, points, k_max=args.K, shift=shift)
    if args.format == "csv":
        header = [f"x_{i + 1}" for i in range(grid.n)] + ["partial_sum", "tail"]
        text = _csv_text(header, trace.rows())
    else:
        text = _json_text(trace.to_dict())
    _emit(args, text)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="output path (stdout when omitted)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--grid", default="1,64,0.125", help="n,xi_max,dxi")
    parser.add_argument(
        "--unsafe-params",
        action="store_true",
        help="relax parameter-range checks (never changes envelope formulas)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phaselab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound-check", help="certify sup|m| against its envelope over a delta sweep")
    _add_common(p)
    p.add_argument("--family", choices=[f.value for f in Family], required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--deltas", required=True, help="start:end geometric sweep or comma list")
    p.add_argument("--per-decade", type=int, default=4, dest="per_decade")
    p.set_defaults(func=cmd_bound_check)

    p = sub.add_parser("rate-fit", help="log-log decay rate of sup|m| vs the envelope exponent")
    _add_common(p)
    p.add_argument("--family", choices=[f.value for f in Family], required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--deltas", required=True)
    p.add_argument("--per-decade", type=int, default=4, dest="per_decade")
    p.set_defaults(func=cmd_rate_fit)

    p = sub.add_parser("seq-check", help="classify a time sequence against a convergence criterion")
    _add_common(p)
    p.add_argument("--criterion", choices=[c.value for c in ConvergenceCriterion], required=True)
    p.add_argument("--seq", required=True, help="power:p=2 | geometric:r=0.5 | explicit:...")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=cmd_seq_check)

    p = sub.add_parser("propagate", help="evolve a stored field and sample it at points")
    _add_common(p)
    p.add_argument("--field", required=True, help="field CSV (with JSON sidecar)")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--times", required=True, help="comma list of t values")
    p.add_argument("--points", default=None, help="semicolon-separated points, comma coords")
    p.add_argument("--num-points", type=int, default=32, dest="num_points")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--mu", default=None)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("trace", help="accumulate sum_k |h_k(x)|^2 along a time sequence")
    _add_common(p)
    p.add_argument("--field", default=None, help="field CSV; a seeded random field when omitted")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--seq", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--K", type=int, default=2048)
    p.add_argument("--points", default=None)
    p.add_argument("--num-points", type=int, default=32, dest="num_points")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--mu", default=None)
    p.set_defaults(func=cmd_trace)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, OSError, ValueError) as exc:
        print(f"phaselab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
