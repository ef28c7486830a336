"""q-expansions in the monomial basis f_alpha = (1+q)^alpha and the operators U, V, Theta."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

from .errors import ConfigError, DomainError, TruncationError
from .padic import (
    DEFAULT_PRECISION,
    DEFAULT_SERIES_DEGREE,
    IwasawaSeries,
    PadicScalar,
    padic_exp,
    padic_log,
    vp_factorial,
)

DEFAULT_CAP = 10000

Coefficient = Union[int, Fraction, PadicScalar, IwasawaSeries]


def _is_zero(c) -> bool:
    if isinstance(c, IwasawaSeries):
        return not c.terms
    if isinstance(c, PadicScalar):
        return c.value == 0
    return c == 0


@dataclass(frozen=True)
class QExpansion:
    """A finite sum of c_alpha·(1+q)^alpha with exponents 0 <= alpha <= cap."""

    p: int
    terms: tuple[tuple[int, Coefficient], ...] = ()
    cap: int = DEFAULT_CAP

    @classmethod
    def from_dict(cls, p: int, coeffs: Mapping[int, Coefficient], cap: int = DEFAULT_CAP) -> "QExpansion":
        items = []
        for alpha, c in coeffs.items():
            alpha = int(alpha)
            if alpha < 0:
                raise DomainError("exponents must be non-negative")
            if alpha > cap:
                raise TruncationError(f"exponent {alpha} exceeds cap {cap}")
            if not _is_zero(c):
                items.append((alpha, c))
        items.sort(key=lambda t: t[0])
        return cls(p, tuple(items), cap)

    @classmethod
    def monomial(cls, p: int, alpha: int, c: Coefficient = 1, cap: int = DEFAULT_CAP) -> "QExpansion":
        return cls.from_dict(p, {alpha: c}, cap)

    @classmethod
    def zero(cls, p: int, cap: int = DEFAULT_CAP) -> "QExpansion":
        return cls(p, (), cap)

    def as_dict(self) -> dict[int, Coefficient]:
        return dict(self.terms)

    def coefficient(self, alpha: int) -> Coefficient:
        return self.as_dict().get(alpha, 0)

    def exponents(self) -> list[int]:
        return [a for a, _ in self.terms]

    def map_terms(self, fn: Callable[[int, Coefficient], Iterable[tuple[int, Coefficient]]]) -> "QExpansion":
        acc: dict[int, Coefficient] = {}
        for alpha, c in self.terms:
            for beta, d in fn(alpha, c):
                acc[beta] = acc[beta] + d if beta in acc else d
        return QExpansion.from_dict(self.p, acc, self.cap)

    def _check(self, other: "QExpansion") -> None:
        if other.p != self.p:
            raise DomainError("mixed primes")

    def __add__(self, other: "QExpansion") -> "QExpansion":
        self._check(other)
        acc = self.as_dict()
        for a, c in other.terms:
            acc[a] = acc[a] + c if a in acc else c
        return QExpansion.from_dict(self.p, acc, min(self.cap, other.cap))

    def __neg__(self) -> "QExpansion":
        return QExpansion(self.p, tuple((a, -c) for a, c in self.terms), self.cap)

    def __sub__(self, other: "QExpansion") -> "QExpansion":
        return self + (-other)

    def scale(self, s) -> "QExpansion":
        return QExpansion.from_dict(self.p, {a: s * c for a, c in self.terms}, self.cap)

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            return self.scale(other)
        self._check(other)
        cap = min(self.cap, other.cap)
        acc: dict[int, Coefficient] = {}
        for a, c in self.terms:
            for b, d in other.terms:
                if a + b > cap:
                    raise TruncationError(f"product exponent {a + b} exceeds cap {cap}")
                acc[a + b] = acc[a + b] + c * d if a + b in acc else c * d
        return QExpansion.from_dict(self.p, acc, cap)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QExpansion):
            return NotImplemented
        if self.p != other.p:
            return False
        a, b = self.as_dict(), other.as_dict()
        for k in set(a) | set(b):
            if k not in a:
                if not _is_zero(b[k]):
                    return False
            elif k not in b:
                if not _is_zero(a[k]):
                    return False
            elif not (a[k] == b[k]):
                return False
        return True

    def __hash__(self) -> int:
        return hash((self.p, self.terms))

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*f_{a}" for a, c in self.terms) or "0"
        return f"QExpansion({body})"

    def is_stable(self) -> bool:
        return all(a % self.p for a, _ in self.terms)


def u_p0(f: QExpansion) -> QExpansion:
    """U: f_alpha -> f_{alpha/p} if p | alpha, else 0."""
    p = f.p
    return f.map_terms(lambda a, c: [(a // p, c)] if a % p == 0 else [])


def v_p0(f: QExpansion) -> QExpansion:
    """V: f_alpha -> f_{p·alpha}."""
    p = f.p
    for a, _ in f.terms:
        if p * a > f.cap:
            raise TruncationError(f"V would produce exponent {p * a} above cap {f.cap}")
    return f.map_terms(lambda a, c: [(p * a, c)])


def theta(f: QExpansion) -> QExpansion:
    """Theta = (1+q) d/dq: f_alpha -> alpha·f_alpha."""
    return f.map_terms(lambda a, c: [(a, a * c)])


def depletion(f: QExpansion) -> QExpansion:
    """(1 - VU) f: removes every exponent divisible by p."""
    return f - v_p0(u_p0(f))


def e_ord_qexp(f: QExpansion, max_iter: int = 64) -> QExpansion:
    """lim U^{n!} f, reached once U fixes the iterate.

    In the monomial basis U lowers every exponent divisible by p and kills the
    others, so the limit keeps only the constant term c_0·f_0.
    """
    g = f
    for n in range(1, max_iter + 1):
        if u_p0(g) == g:
            return g
        for _ in range(n):
            g = u_p0(g)
    raise TruncationError(f"U^(n!) did not stabilise after {max_iter} steps")


@dataclass(frozen=True)
class UniversalExponent:
    """The p-adic weight variable: specialising T -> (1+p)^k - 1 gives the integer k.

    ``residue`` fixes the weight-space component, i.e. k mod (p - 1).
    """

    residue: int = 0
    D: int = DEFAULT_SERIES_DEGREE

    def specialisation_point(self, k: int, p: int, N: int) -> PadicScalar:
        return PadicScalar(p, N, (1 + p) ** k - 1)


def _unit_parts(alpha: int, p: int, N: int) -> tuple[PadicScalar, PadicScalar]:
    a = PadicScalar(p, N, alpha)
    w = a.teichmuller()
    return w, a * w.inverse()


def alpha_power(alpha: int, s, p: int, N: int = DEFAULT_PRECISION, residue: int | None = None):
    """alpha^s for a unit alpha, with s an integer, a p-adic scalar or universal."""
    if alpha % p == 0:
        raise DomainError(f"alpha^s is undefined for alpha = {alpha} divisible by p")
    if isinstance(s, int):
        if s >= 0:
            return alpha**s
        return PadicScalar(p, N, alpha) ** s
    if isinstance(s, PadicScalar):
        if residue is None:
            raise DomainError("a p-adic exponent needs its residue class mod p-1")
        w, u = _unit_parts(alpha, p, N)
        return w ** (residue % (p - 1)) * padic_exp(s.with_precision(N) * padic_log(u))
    if isinstance(s, UniversalExponent):
        guard = N + vp_factorial(s.D, p) + 2
        w, u = _unit_parts(alpha, p, guard)
        gamma = padic_log(u).divide_by_p(1) * padic_log(PadicScalar(p, guard, 1 + p)).divide_by_p(1).inverse()
        base = IwasawaSeries.variable(0, p, N, 1, s.D) + 1
        series = base.binomial_power(gamma)
        return series * w.with_precision(N) ** (s.residue % (p - 1))
    raise DomainError(f"unsupported exponent type {type(s).__name__}")


def theta_power_interpolate(
    f: QExpansion,
    s,
    residue: int | None = None,
    N: int = DEFAULT_PRECISION,
) -> QExpansion:
    """f_alpha -> alpha^s·f_alpha on a stable expansion."""
    if not f.is_stable():
        raise DomainError("theta_power_interpolate needs a stable expansion (all exponents prime to p)")
    if isinstance(s, int) and s >= 0:
        return f.map_terms(lambda a, c: [(a, a**s * c)])
    out = {}
    for a, c in f.terms:
        value = alpha_power(a, s, f.p, N, residue)
        if isinstance(value, IwasawaSeries):
            out[a] = value * (c if not isinstance(c, Fraction) else PadicScalar.of(c, f.p, N))
        else:
            cc = c if isinstance(c, PadicScalar) else PadicScalar.of(c, f.p, N)
            out[a] = value * cc
    return QExpansion.from_dict(f.p, out, f.cap)


def specialise(f: QExpansion, k: int, N: int = DEFAULT_PRECISION) -> QExpansion:
    """Specialise a q-expansion with Iwasawa coefficients at T = (1+p)^k - 1."""
    point = PadicScalar(f.p, N, (1 + f.p) ** k - 1)
    out = {}
    for a, c in f.terms:
        if isinstance(c, IwasawaSeries):
            out[a] = c.evaluate([point])
        else:
            out[a] = c
    return QExpansion.from_dict(f.p, out, f.cap)


def reduce_mod(f: QExpansion, N: int) -> QExpansion:
    """Coefficients as p-adic scalars at precision N (for comparisons)."""
    out = {}
    for a, c in f.terms:
        out[a] = c.with_precision(min(N, c.N)) if isinstance(c, PadicScalar) else PadicScalar.of(c, f.p, N)
    return QExpansion.from_dict(f.p, out, f.cap)


# ---------------------------------------------------------------------------
# text format


def _parse_coeff(text: str) -> int | Fraction:
    text = text.strip()
    v = Fraction(text)
    return int(v) if v.denominator == 1 else v


def parse_lines(p: int, lines: Iterable[str], cap: int = DEFAULT_CAP) -> QExpansion:
    acc: dict[int, Coefficient] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ConfigError(f"line {lineno}: expected 'alpha:coeff', got {raw.strip()!r}")
        a, c = line.split(":", 1)
        try:
            alpha = int(a)
            coeff = _parse_coeff(c)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        acc[alpha] = acc.get(alpha, 0) + coeff
    return QExpansion.from_dict(p, acc, cap)


def format_lines(f: QExpansion) -> list[str]:
    out = []
    for a, c in f.terms:
        if isinstance(c, PadicScalar):
            c = c.value
        out.append(f"{a}:{c}")
    return out
