"""Command-line front end: invariant suites, Euler factors, slope charts and q-expansion operators."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, TextIO

import sympy as sp

from . import hecke_euler as he
from .config import Config, load_config
from .distributions import HeckeMatrix, TruncatedSpace, up_matrix
from .errors import ConfigError, DegenerateError, DomainError, TripadicError
from .serre_tate import DEFAULT_CAP, depletion, format_lines, parse_lines, theta, u_p0, v_p0
from .spectral import CharSeries, char_series, classicity_thresholds, newton_polygon
from .suites import run_suite, suite_names
from .weights import interpolation_point_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

QEXP_OPS = {"U": u_p0, "V": v_p0, "Theta": theta, "deplete": depletion}


def _fmt(x) -> str:
    if isinstance(x, sp.Basic):
        return str(sp.factor(x))
    return str(x)


def format_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    """Fixed-width columns, left aligned, two spaces apart."""
    widths = [len(h) for h in header]
    for r in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, r)]
    out = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    out.append("  ".join("-" * w for w in widths))
    out.extend("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)
    return out


# ---------------------------------------------------------------------------
# euler


@dataclass(frozen=True)
class EulerRow:
    triple: str
    weights: str
    prime: str
    E: object
    E1: object
    ratio: object  # None on an exceptional zero


@dataclass(frozen=True)
class EulerFooter:
    triple: str
    product: object  # None when some E_{P,1} vanishes
    archimedean: Fraction


def _weight_label(t) -> str:
    def leg(k):
        return ",".join(str(x) for x in k)

    return f"({leg(t.k1)}|{leg(t.k2)}|{leg(t.k3)})"


def euler_rows(cfg: Config) -> tuple[list[EulerRow], list[EulerFooter]]:
    rows, footers = [], []
    for name in sorted(cfg.triples):
        t = cfg.triples[name]
        if not interpolation_point_check(t):
            raise ConfigError(f"[weights] {name}: not an interpolation point")
        e = cfg.eigen[name]
        product = 1
        for pr in t.layout.primes:
            E = he.euler_factor_Ep(t, e, pr.name)
            E1 = he.euler_factor_Ep1(t, e, pr.name)
            if he._is_zero(E1):
                ratio = None
                product = None
            else:
                ratio = sp.cancel(E / E1) if isinstance(E1, sp.Basic) or isinstance(E, sp.Basic) else Fraction(E) / E1
                if product is not None:
                    product = product * ratio
            rows.append(EulerRow(name, _weight_label(t), pr.name, E, E1, ratio))
        if isinstance(product, sp.Basic):
            product = sp.cancel(product)
        footers.append(EulerFooter(name, product, he.archimedean_factor(t)))
    return rows, footers


def cmd_euler(cfg: Config, machine: bool, out: TextIO) -> int:
    rows, footers = euler_rows(cfg)
    if machine:
        for r in rows:
            key = f"{r.triple}.{r.prime}"
            print(f"{key}.E:{_fmt(r.E)}", file=out)
            print(f"{key}.E1:{_fmt(r.E1)}", file=out)
            print(f"{key}.ratio:{'exceptional-zero' if r.ratio is None else _fmt(r.ratio)}", file=out)
        for f in footers:
            print(f"{f.triple}.product:{'exceptional-zero' if f.product is None else _fmt(f.product)}", file=out)
            print(f"{f.triple}.archimedean:{f.archimedean}", file=out)
        return EXIT_OK
    table = [
        [r.triple, r.weights, r.prime, _fmt(r.E), _fmt(r.E1), "exceptional-zero" if r.ratio is None else _fmt(r.ratio)]
        for r in rows
    ]
    for line in format_table(["triple", "weights", "prime", "E", "E1", "E/E1"], table):
        print(line, file=out)
    for f in footers:
        prod = "exceptional-zero" if f.product is None else _fmt(f.product)
        print(f"{f.triple}: product = {prod}  archimedean = {f.archimedean}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# slopes


@dataclass(frozen=True)
class SlopeRow:
    label: str
    size: int
    slopes: tuple[tuple[Fraction, int], ...]  # normalised
    unresolved: int
    zero: int
    threshold: Fraction | None
    below: int | None


def _slope_prime(cfg: Config) -> str:
    if cfg.slopes.prime is not None:
        return cfg.slopes.prime
    names = [pr.name for pr in cfg.layout.primes]
    return names[1] if len(names) > 1 else names[0]


def _chart_row(label: str, U: HeckeMatrix, N: int | None, normalise: int, threshold) -> SlopeRow:
    s: CharSeries = char_series(U if N is None else U.mod(N))
    np_ = newton_polygon(s, allow_unresolved=True)
    # exact zero roots of the truncated operator; modulo p^N they are unresolved instead
    zero = U.size - sum(mult for _, mult in np_.segments) - np_.unresolved
    segs = tuple((sl - normalise, mult) for sl, mult in np_.segments)
    below = None
    if threshold is not None:
        below = sum(mult for sl, mult in segs if sl < threshold)
    return SlopeRow(label, U.size, segs, np_.unresolved, zero, threshold, below)


def slope_rows(cfg: Config) -> list[SlopeRow]:
    grid = cfg.slopes
    p, N = cfg.p, grid.precision
    if grid.matrix is not None:
        U = HeckeMatrix.of(grid.matrix, p)
        return [_chart_row("matrix", U, N, 0, None)]
    prime = _slope_prime(cfg)
    idx = cfg.layout.prime_index(prime)
    rows = []
    for k in grid.weights:
        thresholds = classicity_thresholds(cfg.layout, [k] * cfg.layout.d)
        space = TruncatedSpace(p, k, grid.level, grid.degree)
        U = up_matrix(space, prime)
        # U carries the factor p from the coset sum; slopes are quoted relative to it
        rows.append(_chart_row(f"k={k}", U, N, 1, thresholds[cfg.layout.primes[idx].name]))
    return rows


def _slopes_text(segs) -> str:
    if not segs:
        return "-"
    return " ".join(f"{sl}^{mult}" if mult > 1 else str(sl) for sl, mult in segs)


def cmd_slopes(cfg: Config, machine: bool, out: TextIO) -> int:
    rows = slope_rows(cfg)
    if machine:
        for r in rows:
            print(f"{r.label}.size:{r.size}", file=out)
            print(f"{r.label}.slopes:{_slopes_text(r.slopes)}", file=out)
            print(f"{r.label}.unresolved:{r.unresolved}", file=out)
            print(f"{r.label}.zero:{r.zero}", file=out)
            if r.threshold is not None:
                print(f"{r.label}.threshold:{r.threshold}", file=out)
                print(f"{r.label}.classical:{r.below}", file=out)
        return EXIT_OK
    table = []
    for r in rows:
        amb = f"{r.unresolved} beyond p^{cfg.slopes.precision}" if r.unresolved else ""
        thr = "" if r.threshold is None else f"< {r.threshold}"
        below = "" if r.below is None else str(r.below)
        table.append([r.label, str(r.size), _slopes_text(r.slopes), str(r.zero), amb, thr, below])
    for line in format_table(["weight", "dim", "slopes", "zero", "ambiguous", "classical", "count"], table):
        print(line, file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify and qexp


def cmd_verify(suite: str, machine: bool, out: TextIO, seed: int = 0) -> int:
    results = run_suite(suite, seed)
    ok = all(r.passed for r in results)
    for r in results:
        if machine:
            print(f"{r.suite}:{r.name}:{'pass' if r.passed else 'fail'}", file=out)
        else:
            print(r.line(), file=out)
    if not machine:
        print(f"{sum(r.passed for r in results)}/{len(results)} passed", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_qexp(op: str, p: int, cap: int, inp: TextIO, out: TextIO) -> int:
    f = parse_lines(p, inp.readlines(), cap)
    g = QEXP_OPS[op](f)
    for line in format_lines(g):
        print(line, file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tripadic", description=__doc__)
    ap.add_argument("--machine", action="store_true", help="emit key:value lines instead of tables")
    ap.add_argument("--precision", type=int, default=None, help="override the configured p-adic precision")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", help=f"one of: {', '.join(suite_names())}, all")
    v.add_argument("--seed", type=int, default=0)

    for name, text in (("euler", "Euler factors per triple and prime"), ("slopes", "Newton slopes over a weight grid")):
        c = sub.add_parser(name, help=text)
        c.add_argument("--config", required=True)

    q = sub.add_parser("qexp", help="apply a q-expansion operator to 'alpha:coeff' lines on stdin")
    q.add_argument("--op", required=True, choices=sorted(QEXP_OPS))
    q.add_argument("--prime", type=int, default=3)
    q.add_argument("--cap", type=int, default=DEFAULT_CAP)
    return ap


def main(argv: Sequence[str] | None = None, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "verify":
            return cmd_verify(args.suite, args.machine, stdout, args.seed)
        if args.command == "qexp":
            return cmd_qexp(args.op, args.prime, args.cap, stdin, stdout)
        cfg = load_config(args.config)
        if args.precision is not None:
            cfg = cfg.with_precision(args.precision)
        if args.command == "euler":
            return cmd_euler(cfg, args.machine, stdout)
        return cmd_slopes(cfg, args.machine, stdout)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateError, TripadicError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
