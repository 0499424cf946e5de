"""Command-line interface: ``univoque {qs,constants,figure,check,expand}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .bases import (
    MAX_LEVEL,
    compute_qKL,
    compute_qn,
    compute_z1k,
    compute_zn,
    quasi_greedy_expansion,
)
from .errors import DomainError, PrecisionError, UnivoqueError
from .oracle import expansion_branches, greedy_expansion
from .precise import (
    DEFAULT_TOL,
    PRECISION_CAP,
    PreciseReal,
    cap,
    eval_at,
    parse_exact,
    render_decimal,
)
from .solver import Classification, GapIntervals, QsResult, _gap_left, _gap_right, qs

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NEAR_KL = 3
EXIT_BOUNDARY = 4

FIGURE_PLACES = 10
CSV_HEADER = ["x", "q_s", "level", "gamma", "class"]


class CliError(Exception):
    pass


def _decimal_text(v: Fraction, places: int | None = None) -> str:
    d = Decimal(v.numerator) / Decimal(v.denominator)
    if places is not None:
        d = d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)
    s = format(d, "f")
    if "." in s and places is None:
        s = s.rstrip("0").rstrip(".")
    return s


def _x_text(x) -> str:
    if isinstance(x, Fraction):
        d = Decimal(x.numerator) / Decimal(x.denominator)
        if Fraction(d) == x:
            return _decimal_text(x)
        return f"{x.numerator}/{x.denominator}"
    return render_decimal(x)


def _bound(m, places: int) -> str:
    return render_decimal(PreciseReal(m, m), places)


def _enclosure_text(v: PreciseReal) -> tuple[str, str, str]:
    places = render_decimal(v).split(".")[-1]
    p = len(places) + 3
    return render_decimal(v), _bound(v.lo, p), _bound(v.hi, p)


def _width_text(v: PreciseReal) -> str:
    lo, hi = v.bounds()
    return f"{float(hi - lo):.1e}"


# --------------------------------------------------------------------------
# qs


def _result_record(r: QsResult) -> dict:
    rec: dict = {
        "x": _x_text(r.x),
        "classification": str(r.classification),
        "path": r.path,
        "level": r.level,
        "gamma": None if r.gamma is None else str(r.gamma),
        "q_s": None,
        "q_s_lo": None,
        "q_s_hi": None,
    }
    if r.qs is not None:
        rec["q_s"], rec["q_s_lo"], rec["q_s_hi"] = _enclosure_text(r.qs.enclosure)
    if r.gap is not None:
        left, right = GapIntervals.build()[r.gap]
        rec["gap"] = r.gap
        rec["gap_interval"] = [render_decimal(left, 6), render_decimal(right, 6)]
    if r.exceptional is not None:
        rec["exceptional"] = r.exceptional
    if r.bracket is not None:
        rec["bracket"] = [render_decimal(r.bracket[0]), render_decimal(r.bracket[1])]
    return rec


def cmd_qs(args, out) -> int:
    x = parse_exact(args.x)
    r = qs(x, args.tol, args.max_level, args.method)
    rec = _result_record(r)
    if args.json:
        out.write(json.dumps(rec) + "\n")
    else:
        rows = [("x", rec["x"]), ("classification", rec["classification"]), ("path", rec["path"])]
        if r.classification is Classification.BELOW_KL:
            rows += [("level", str(r.level)), ("gamma", rec["gamma"])]
        if rec["q_s"] is not None:
            rows += [("q_s", rec["q_s"]), ("enclosure", f"[{rec['q_s_lo']}, {rec['q_s_hi']}]")]
        if r.gap is not None:
            lo, hi = rec["gap_interval"]
            rows.append(("gap", f"{r.gap}: [{lo}, {hi})"))
        if r.exceptional is not None:
            rows.append(("exceptional", r.exceptional))
        if r.bracket is not None:
            lo, hi = rec["bracket"]
            rows.append(("bracket", f"({lo}, {hi}]"))
        for k, v in rows:
            out.write(f"{k:<16}{v}\n")
    return EXIT_NEAR_KL if r.classification is Classification.NEAR_KL else EXIT_OK


# --------------------------------------------------------------------------
# constants


def constants_rows(levels: int, tol) -> list[tuple[str, PreciseReal]]:
    rows: list[tuple[str, PreciseReal]] = []
    for n in range(1, levels + 1):
        rows.append((f"q_{n}", compute_qn(n, tol).enclosure))
    qkl = compute_qKL(tol).enclosure
    rows.append(("q_KL", qkl))
    for n in range(1, levels + 1):
        rows.append((f"z_{n}", compute_zn(n, tol)))
    for k in range(1, levels + 1):
        rows.append((f"z_1,{k}", compute_z1k(k, tol)))
    qg = compute_qn(1, tol).enclosure
    for k in (3, 2, 1):
        rows.append((f"gap-{k} left", eval_at(_gap_left(k), qg)))
        rows.append((f"gap-{k} right", eval_at(_gap_right(k), qkl)))
    return rows


def cmd_constants(args, out) -> int:
    if not 1 <= args.levels <= args.max_level:
        raise CliError(f"--levels must be in 1..{args.max_level}")
    rows = constants_rows(args.levels, args.tol)
    if args.json:
        out.write(json.dumps([{"name": k, "value": render_decimal(v), "width": _width_text(v)} for k, v in rows]) + "\n")
        return EXIT_OK
    out.write(f"{'name':<14}{'value':<24}width\n")
    for k, v in rows:
        out.write(f"{k:<14}{render_decimal(v):<24}{_width_text(v)}\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# figure


@dataclass(frozen=True)
class FigureSample:
    x: Fraction
    qs: str
    level: str
    gamma: str
    classification: str

    def row(self) -> list[str]:
        return [_decimal_text(self.x, FIGURE_PLACES), self.qs, self.level, self.gamma, self.classification]


def figure_xs(x0: Fraction, x1: Fraction, samples: int) -> list[Fraction]:
    """Uniform grid on [x0, x1], each point rounded half-even to a fixed number of places."""
    unit = Fraction(1, 10**FIGURE_PLACES)
    xs = []
    for i in range(samples):
        v = x0 + (x1 - x0) * i / (samples - 1)
        xs.append(Fraction(round(v / unit)) * unit)
    return xs


def figure_sample(x: Fraction, tol=DEFAULT_TOL, max_level: int = MAX_LEVEL, method: str = "general") -> FigureSample:
    try:
        r = qs(x, tol, max_level, method)
    except PrecisionError:
        return FigureSample(x, "", "", "", "boundary")
    value = render_decimal(r.qs.enclosure) if r.qs is not None else ""
    level = str(r.level) if r.level is not None else ""
    gamma = str(r.gamma) if r.gamma is not None else ""
    return FigureSample(x, value, level, gamma, str(r.classification))


def _figure_worker(task):
    x, tol, max_level, method, cap_bits = task
    with cap(cap_bits):
        return figure_sample(x, tol, max_level, method)


def figure_samples(x0, x1, samples: int, tol=DEFAULT_TOL, max_level: int = MAX_LEVEL, method: str = "general", jobs: int = 1, cap_bits: int = PRECISION_CAP) -> list[FigureSample]:
    xs = figure_xs(Fraction(x0), Fraction(x1), samples)
    tasks = [(x, tol, max_level, method, cap_bits) for x in xs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_figure_worker, tasks, chunksize=8))
    else:
        results = [_figure_worker(t) for t in tasks]
    return sorted(results, key=lambda s: s.x)


def cmd_figure(args, out) -> int:
    x0, x1 = parse_exact(args.x_from), parse_exact(args.x_to)
    if not x0 < x1:
        raise CliError("--from must be below --to")
    if args.samples < 2:
        raise CliError("--samples must be at least 2")
    if x0 <= 0:
        raise CliError("--from must be positive")
    rows = figure_samples(x0, x1, args.samples, args.tol, args.max_level, args.method, args.jobs, args.precision_cap)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s in rows:
        w.writerow(s.row())
    if args.out == "-":
        out.write(buf.getvalue())
    else:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc.strerror}") from exc
    return EXIT_OK


# --------------------------------------------------------------------------
# check / expand


def _base_arg(text: str) -> Fraction:
    q = parse_exact(text)
    if not 1 < q < 2:
        raise DomainError(f"base {text} not inside (1, 2)")
    return q


def cmd_check(args, out) -> int:
    x = parse_exact(args.x)
    q = _base_arg(args.q)
    v = expansion_branches(x, q, args.depth)
    depth = getattr(v, "depth", None)
    if args.json:
        out.write(json.dumps({"x": args.x, "q": args.q, "verdict": v.kind, "depth": depth}) + "\n")
    else:
        out.write(v.kind + ("" if depth is None or v.kind == "Unique" else f" at depth {depth}") + "\n")
    return EXIT_OK


def cmd_expand(args, out) -> int:
    x = parse_exact(args.x)
    q = _base_arg(args.q)
    if args.digits < 1:
        raise CliError("--digits must be positive")
    if args.algorithm == "greedy":
        w = greedy_expansion(x, q, args.digits)
    else:
        w = quasi_greedy_expansion(x, q, args.digits)
    if args.json:
        out.write(json.dumps({"x": args.x, "q": args.q, "algorithm": args.algorithm, "digits": str(w)}) + "\n")
    else:
        out.write(str(w) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _env(name: str, default):
    return os.environ.get(f"UNIVOQUE_{name}", default)


def _positive_fraction(text: str) -> Fraction:
    try:
        v = parse_exact(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p.add_argument("--tol", type=_positive_fraction, default=d(_positive_fraction(str(_env("TOL", DEFAULT_TOL)))),
                   help="root isolation tolerance (default 1e-12)")
    p.add_argument("--precision-cap", type=int, default=d(int(_env("PRECISION_CAP", PRECISION_CAP))),
                   help="largest working precision in bits (default 4096)")
    p.add_argument("--max-level", type=int, default=d(int(_env("MAX_LEVEL", MAX_LEVEL))),
                   help="highest ladder level scanned (default 20)")
    p.add_argument("--json", action="store_true", default=d(_env("JSON", "") not in ("", "0", "false")),
                   help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="univoque", description="Smallest univoque bases and related constants.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qs", parents=[common], help="smallest univoque base of x")
    p.add_argument("x")
    p.add_argument("--method", choices=["general", "auto"], default="general")
    p.set_defaults(func=cmd_qs)

    p = sub.add_parser("constants", parents=[common], help="table of ladder constants")
    p.add_argument("--levels", type=int, default=6)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("figure", parents=[common], help="CSV samples of q_s over an interval")
    p.add_argument("--from", dest="x_from", default="1.0507")
    p.add_argument("--to", dest="x_to", default="2")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", default="-")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--method", choices=["general", "auto"], default="general")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("check", parents=[common], help="branch count of the expansions of x in base q")
    p.add_argument("x")
    p.add_argument("q")
    p.add_argument("--depth", type=int, default=60)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("expand", parents=[common], help="expansion prefix of x in base q")
    p.add_argument("x")
    p.add_argument("q")
    p.add_argument("--digits", type=int, default=32)
    p.add_argument("--algorithm", choices=["greedy", "quasi-greedy"], default="greedy")
    p.set_defaults(func=cmd_expand)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.max_level < 1 or args.max_level > MAX_LEVEL:
        print(f"univoque: --max-level must be in 1..{MAX_LEVEL}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with cap(args.precision_cap):
            return args.func(args, out)
    except PrecisionError as exc:
        print(f"univoque: boundary: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY
    except (CliError, DomainError) as exc:
        print(f"univoque: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnivoqueError as exc:
        print(f"univoque: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY


if __name__ == "__main__":
    sys.exit(main())
