"""Flat "key = value" configuration files with [section] headers."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import sympy as sp

from .errors import ConfigError, TripadicError
from .hecke_euler import HeckeEigenData
from .padic import FieldLayout, PrimeSpec
from .weights import WeightTriple

SAMPLE_CONFIG = """\
# p = 3, F = Q: one prime above p, weights (2, 2, 6).
[general]
p = 3
precision = 20
primes = p0
D = 5
m = 1
A = 10000

[weights]
t1 = 2 | 2 | 6

[eigen]
p0.x = 1, 3
p0.y = 1, 3
p0.z = 1, 243

[slopes]
weights = 0, 1, 2, 3
"""

TWO_PRIME_CONFIG = """\
# p = 3 split into p0 (f = 1) and p1 (f = 2).
[general]
p = 3
precision = 20
primes = p0, p1:2:2 2 1
D = 4
m = 1
A = 10000

[weights]
t1 = 2, 4, 4 | 2, 4, 4 | 6, 2, 2

[eigen]
p0.x = 1, 3
p0.y = 1, 3
p0.z = 1, 243
p1.x = 1, 243
p1.y = 1, 243
p1.z = 1, 9

[slopes]
weights = 0, 1, 2
prime = p1
"""


@dataclass
class SlopeGrid:
    weights: list[int] = field(default_factory=list)
    level: int = 1
    degree: int = 5
    prime: str | None = None
    matrix: list[list[int]] | None = None
    precision: int | None = None  # None: exact valuations


@dataclass
class Config:
    """A parsed configuration; eigen-data is keyed by triple name."""

    p: int
    N: int
    layout: FieldLayout
    D: int
    m: int
    A: int
    triples: dict[str, WeightTriple]
    eigen: dict[str, HeckeEigenData]
    slopes: SlopeGrid
    suite: str = "all"

    def with_precision(self, N: int) -> "Config":
        if N <= 0:
            raise ConfigError("precision must be positive")
        layout = FieldLayout(self.p, self.layout.primes, N)
        slopes = SlopeGrid(self.slopes.weights, self.slopes.level, self.slopes.degree, self.slopes.prime, self.slopes.matrix, N)
        triples = {
            name: WeightTriple(layout, t.k1, t.k2, t.k3, t.nu1, t.nu2, t.nu3) for name, t in self.triples.items()
        }
        return Config(self.p, N, layout, self.D, self.m, self.A, triples, self.eigen, slopes, self.suite)


class _Source:
    """Line lookup for error messages."""

    def __init__(self, text: str) -> None:
        self.lines = text.splitlines()

    def line_of(self, section: str, key: str) -> int | None:
        current = None
        for no, raw in enumerate(self.lines, 1):
            s = raw.strip()
            if s.startswith("[") and s.endswith("]"):
                current = s[1:-1].strip()
            elif current == section and "=" in s and s.split("=", 1)[0].strip().lower() == key.lower():
                return no
        return None

    def error(self, section: str, key: str, msg: str) -> ConfigError:
        no = self.line_of(section, key)
        where = f"line {no}: " if no is not None else ""
        return ConfigError(f"{where}[{section}] {key}: {msg}")


def _int(src: _Source, sec: str, key: str, text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise src.error(sec, key, f"expected an integer, got {text.strip()!r}") from None


def _rational(src: _Source, sec: str, key: str, text: str) -> int | Fraction:
    try:
        v = Fraction(text.strip())
    except ValueError:
        raise src.error(sec, key, f"expected a rational number, got {text.strip()!r}") from None
    return int(v) if v.denominator == 1 else v


def _int_list(src: _Source, sec: str, key: str, text: str) -> list[int]:
    return [_int(src, sec, key, x) for x in text.split(",") if x.strip()]


def _parse_primes(src: _Source, text: str) -> tuple[PrimeSpec, ...]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        name = parts[0].strip()
        f = _int(src, "general", "primes", parts[1]) if len(parts) > 1 else 1
        if len(parts) > 2:
            poly = tuple(_int(src, "general", "primes", c) for c in parts[2].split())
        elif f == 1:
            poly = (0, 1)
        else:
            raise src.error("general", "primes", f"prime {name} with f={f} needs a defining polynomial")
        try:
            out.append(PrimeSpec(name, f, poly))
        except TripadicError as exc:
            raise src.error("general", "primes", str(exc)) from None
    return tuple(out)


def _parse_triple(src: _Source, layout: FieldLayout, key: str, text: str, nu_text: str | None) -> WeightTriple:
    legs = text.split("|")
    if len(legs) != 3:
        raise src.error("weights", key, "expected three weights separated by '|'")
    ks = [_int_list(src, "weights", key, leg) for leg in legs]
    nu = (0, 0, 0)
    if nu_text is not None:
        nus = [_int(src, "weights", key + ".nu", x) for x in nu_text.split("|")]
        if len(nus) != 3:
            raise src.error("weights", key + ".nu", "expected three integers separated by '|'")
        nu = tuple(nus)
    try:
        return WeightTriple.make(layout, *ks, nu=nu)
    except TripadicError as exc:
        raise src.error("weights", key, str(exc)) from None


def _parse_eigen_block(src: _Source, sec: str, items: dict[str, str], layout: FieldLayout) -> dict:
    pairs: dict[str, dict[str, tuple]] = {}
    names = {pr.name for pr in layout.primes}
    for key, value in items.items():
        if "." not in key:
            raise src.error(sec, key, "expected '<prime>.<x|y|z>'")
        prime, label = key.split(".", 1)
        if prime not in names:
            raise src.error(sec, key, f"unknown prime {prime!r}")
        if label not in ("x", "y", "z"):
            raise src.error(sec, key, f"unknown label {label!r}; use x, y or z")
        if value.strip().lower() == "symbolic":
            pair = sp.symbols(f"alpha_{label}_{prime} beta_{label}_{prime}")
        else:
            parts = value.split(",")
            if len(parts) != 2:
                raise src.error(sec, key, "expected 'alpha, beta' or 'symbolic'")
            pair = tuple(_rational(src, sec, key, x) for x in parts)
        pairs.setdefault(prime, {})[label] = tuple(pair)
    return pairs


def _parse_matrix(src: _Source, text: str) -> list[list[int]]:
    text = text.strip()
    if text.startswith("diag:"):
        d = _int_list(src, "slopes", "matrix", text[5:])
        return [[d[i] if i == j else 0 for j in range(len(d))] for i in range(len(d))]
    rows = [_int_list(src, "slopes", "matrix", r.replace(" ", ",")) for r in text.split(";") if r.strip()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise src.error("slopes", "matrix", "expected 'diag: a, b, ...' or square rows separated by ';'")
    return rows


def parse_config(text: str) -> Config:
    src = _Source(text)
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str  # keys are case-sensitive (D vs d)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    if not cp.has_section("general"):
        raise ConfigError("missing section [general]")
    g = cp["general"]

    def need(key: str) -> str:
        if key not in g:
            raise ConfigError(f"missing field [general] {key}")
        return g[key]

    p = _int(src, "general", "p", need("p"))
    if p == 2:
        raise src.error("general", "p", "p must be odd")
    N = _int(src, "general", "precision", g.get("precision", "20"))
    primes = _parse_primes(src, g.get("primes", "p0"))
    try:
        layout = FieldLayout(p, primes, N)
    except TripadicError as exc:
        raise src.error("general", "primes" if "primes" in g else "p", str(exc)) from None
    caps = {}
    for key, default in (("D", "5"), ("m", "1"), ("A", "10000")):
        caps[key] = _int(src, "general", key, g.get(key, default))
        if caps[key] <= 0:
            raise src.error("general", key, "caps must be positive")
    if N <= 0:
        raise src.error("general", "precision", "precision must be positive")

    triples: dict[str, WeightTriple] = {}
    if cp.has_section("weights"):
        w = cp["weights"]
        for key in w:
            if key.endswith(".nu"):
                continue
            triples[key] = _parse_triple(src, layout, key, w[key], w.get(key + ".nu"))

    default_pairs = _parse_eigen_block(src, "eigen", dict(cp["eigen"]), layout) if cp.has_section("eigen") else {}
    eigen: dict[str, HeckeEigenData] = {}
    for name in triples:
        pairs = {pr: dict(block) for pr, block in default_pairs.items()}
        sec = f"eigen.{name}"
        if cp.has_section(sec):
            for pr, block in _parse_eigen_block(src, sec, dict(cp[sec]), layout).items():
                pairs.setdefault(pr, {}).update(block)
        eigen[name] = HeckeEigenData(pairs)

    grid = SlopeGrid(level=caps["m"], degree=caps["D"])
    if cp.has_section("slopes"):
        s = cp["slopes"]
        grid.weights = _int_list(src, "slopes", "weights", s.get("weights", ""))
        if any(k < 0 for k in grid.weights):
            raise src.error("slopes", "weights", "weights must be nonnegative")
        grid.level = _int(src, "slopes", "level", s.get("level", str(caps["m"])))
        grid.degree = _int(src, "slopes", "degree", s.get("degree", str(caps["D"])))
        if grid.level <= 0 or grid.degree < 0:
            raise ConfigError("[slopes] level must be positive and degree nonnegative")
        grid.prime = s.get("prime")
        if grid.prime is not None and grid.prime not in {pr.name for pr in layout.primes}:
            raise src.error("slopes", "prime", f"unknown prime {grid.prime!r}")
        if "precision" in s:
            grid.precision = _int(src, "slopes", "precision", s["precision"])
            if grid.precision <= 0:
                raise src.error("slopes", "precision", "precision must be positive")
        if "matrix" in s:
            grid.matrix = _parse_matrix(src, s["matrix"])
    suite = cp.get("general", "suite", fallback="all")
    return Config(p, N, layout, caps["D"], caps["m"], caps["A"], triples, eigen, grid, suite)


def load_config(path: str | Path) -> Config:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
