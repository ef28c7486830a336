"""Truncated p-adic numbers, unramified extensions, Iwasawa series and characters.

Every value carries its prime and absolute precision ``N``; arithmetic is exact
modulo ``p**N``.  Operations that lose precision (division by ``p``, binomials
with a p-adic exponent) return values at an explicitly lowered precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Callable, Iterable, Sequence

from .errors import DomainError, PrecisionError, TruncationError

DEFAULT_PRECISION = 20
DEFAULT_SERIES_DEGREE = 12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def vp(n: int | Fraction, p: int) -> int | float:
    """p-adic valuation of a rational number; ``math.inf`` for zero."""
    if n == 0:
        return math.inf
    if isinstance(n, Fraction):
        return vp(n.numerator, p) - vp(n.denominator, p)
    n = abs(int(n))
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_factorial(n: int, p: int) -> int:
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def _check_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise DomainError(f"p must be an odd prime, got {p}")


# ---------------------------------------------------------------------------
# Z_p / p^N


@dataclass(frozen=True)
class PadicContext:
    p: int
    N: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if self.N < 1:
            raise DomainError("precision must be positive")

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def __call__(self, value: int | Fraction | "PadicScalar") -> "PadicScalar":
        return PadicScalar.of(value, self.p, self.N)


@dataclass(frozen=True)
class PadicScalar:
    """An element of Z_p known modulo p^N, stored as an integer in [0, p^N)."""

    p: int
    N: int
    value: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.p**self.N)

    @classmethod
    def of(cls, x: int | Fraction | "PadicScalar", p: int, N: int) -> "PadicScalar":
        if isinstance(x, PadicScalar):
            if x.p != p:
                raise DomainError("mixed primes")
            if x.N < N:
                raise PrecisionError(f"cannot raise precision from {x.N} to {N}")
            return cls(p, N, x.value)
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise DomainError(f"{x} is not p-integral")
            mod = p**N
            return cls(p, N, x.numerator * pow(x.denominator, -1, mod))
        return cls(p, N, int(x))

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _coerce(self, other: object) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise DomainError("mixed primes")
            if other.N != self.N:
                n = min(self.N, other.N)
                return PadicScalar(self.p, n, other.value)
            return other
        if isinstance(other, (int, Fraction)):
            return PadicScalar.of(other, self.p, self.N)
        return NotImplemented  # type: ignore[return-value]

    def _prec(self, other: "PadicScalar") -> int:
        return min(self.N, other.N)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = self._prec(o)
        return PadicScalar(self.p, n, self.value + o.value)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.p, self.N, -self.value)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return PadicScalar(self.p, self._prec(o), self.value - o.value)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return PadicScalar(self.p, self._prec(o), o.value - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return PadicScalar(self.p, self._prec(o), self.value * o.value)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PadicScalar(self.p, self.N, pow(self.value, e, self.modulus))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                return False
            n = min(self.N, other.N)
            return (self.value - other.value) % self.p**n == 0
        if isinstance(other, (int, Fraction)):
            try:
                return self == PadicScalar.of(other, self.p, self.N)
            except DomainError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.N, self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"PadicScalar({self.value} mod {self.p}^{self.N})"

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def is_zero(self) -> bool:
        return self.value == 0

    def valuation(self) -> int:
        """Valuation, with ``N`` meaning "zero modulo p^N"."""
        if self.value == 0:
            return self.N
        return int(vp(self.value, self.p))

    def inverse(self) -> "PadicScalar":
        if not self.is_unit():
            raise DomainError(f"{self!r} is not a unit")
        return PadicScalar(self.p, self.N, pow(self.value, -1, self.modulus))

    def signed(self) -> int:
        """Representative in (-p^N/2, p^N/2]."""
        m = self.modulus
        return self.value - m if self.value > m // 2 else self.value

    def with_precision(self, N: int) -> "PadicScalar":
        if N > self.N:
            raise PrecisionError(f"cannot raise precision from {self.N} to {N}")
        return PadicScalar(self.p, N, self.value)

    def divide_by_p(self, k: int = 1) -> "PadicScalar":
        """Exact division by p^k; the result has precision N - k."""
        if k == 0:
            return self
        if self.value % self.p**k:
            raise DomainError(f"{self!r} is not divisible by p^{k}")
        if k >= self.N:
            raise PrecisionError("division by p exhausts the precision")
        return PadicScalar(self.p, self.N - k, self.value // self.p**k)

    def log(self) -> "PadicScalar":
        return padic_log(self)

    def exp(self) -> "PadicScalar":
        return padic_exp(self)

    def teichmuller(self) -> "PadicScalar":
        if self.value % self.p == 0:
            return PadicScalar(self.p, self.N, 0)
        return PadicScalar(self.p, self.N, pow(self.value, self.p ** (self.N - 1), self.modulus))


def _log_terms(N: int, p: int) -> int:
    """Number of terms after which (x-1)^m/m vanishes mod p^N when v(x-1) >= 1."""
    # the m-th term has valuation >= m - log_p(m), increasing in m for p >= 3
    m = 1
    while m - math.log(m, p) < N:
        m += 1
    return m


def padic_log(x: "PadicScalar | UnramifiedScalar"):
    """The p-adic logarithm sum_{m>=1} (-1)^{m+1}(x-1)^m/m on 1 + pO."""
    if isinstance(x, UnramifiedScalar):
        return x.log()
    y = x - 1
    if y.value % x.p:
        raise DomainError(f"log needs x = 1 mod p, got {x!r}")
    p, N = x.p, x.N
    M = _log_terms(N, p)
    guard = N + int(math.log(M, p)) + 2
    mod_g = p**guard
    acc = 0
    ypow = 1
    for m in range(1, M + 1):
        ypow = ypow * y.value % mod_g
        e = int(vp(m, p))
        u = m // p**e
        term = (ypow // p**e) * pow(u, -1, p**N)
        acc += -term if m % 2 == 0 else term
    return PadicScalar(p, N, acc)


def padic_exp(z: "PadicScalar | UnramifiedScalar"):
    """The p-adic exponential on pO (p odd)."""
    if isinstance(z, UnramifiedScalar):
        return z.exp()
    if z.value % z.p:
        raise DomainError(f"exp needs v(z) >= 1, got {z!r}")
    p, N = z.p, z.N
    M = 1
    while M - (M - 1) / (p - 1) < N:
        M += 1
    guard = N + vp_factorial(M, p) + 1
    mod_g = p**guard
    acc = 1
    zpow = 1
    for m in range(1, M + 1):
        zpow = zpow * z.value % mod_g
        e = vp_factorial(m, p)
        u = math.factorial(m) // p**e
        acc += (zpow // p**e) * pow(u, -1, p**N)
    return PadicScalar(p, N, acc)


# ---------------------------------------------------------------------------
# Unramified extensions


def _poly_mod_p_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Rabin-style irreducibility test over F_p; coeffs low-to-high, monic."""
    f = len(coeffs) - 1
    if f == 1:
        return True

    def norm(a):
        a = [c % p for c in a]
        while a and a[-1] == 0:
            a.pop()
        return a

    P = norm(coeffs)

    def pmod(a, b):
        a = norm(a)
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            c = a[-1] * inv % p
            shift = len(a) - len(b)
            for i, bc in enumerate(b):
                a[shift + i] = (a[shift + i] - c * bc) % p
            a = norm(a)
        return a

    def pmul(a, b):
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return norm(out)

    def ppow_x(e):
        result, base = [1], [0, 1]
        while e:
            if e & 1:
                result = pmod(pmul(result, base), P)
            base = pmod(pmul(base, base), P)
            e >>= 1
        return result

    def pgcd(a, b):
        a, b = norm(a), norm(b)
        while b:
            a, b = b, pmod(a, b)
        return a

    for k in range(1, f // 2 + 1):
        xq = ppow_x(p**k)
        diff = norm([(xq[i] if i < len(xq) else 0) - (1 if i == 1 else 0) for i in range(max(len(xq), 2))])
        if len(pgcd(P, diff)) > 1:
            return False
    return True


@dataclass(frozen=True)
class UnramifiedRing:
    """W(F_q)/p^N presented as Z_p[theta]/(P(theta)) with P monic, irreducible mod p.

    ``poly`` lists the coefficients of P from the constant term up, leading 1 last.
    For ``f = 1`` use ``poly = (0, 1)`` (theta = 0), giving Z_p itself.
    """

    p: int
    N: int
    poly: tuple[int, ...]
    _frob_root: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_prime(self.p)
        poly = tuple(int(c) for c in self.poly)
        if len(poly) < 2 or poly[-1] != 1:
            raise DomainError("defining polynomial must be monic of degree >= 1")
        if not _poly_mod_p_irreducible(poly, self.p):
            raise DomainError(f"polynomial {poly} is reducible mod {self.p}")
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "_frob_root", self._compute_frobenius_root())

    @classmethod
    def rational(cls, p: int, N: int = DEFAULT_PRECISION) -> "UnramifiedRing":
        return cls(p, N, (0, 1))

    @property
    def f(self) -> int:
        return len(self.poly) - 1

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def with_precision(self, N: int) -> "UnramifiedRing":
        return UnramifiedRing(self.p, N, self.poly)

    def element(self, coeffs: Iterable[int | PadicScalar] | int | PadicScalar | Fraction) -> "UnramifiedScalar":
        if isinstance(coeffs, (int, PadicScalar, Fraction)):
            coeffs = [coeffs]
        vals = []
        for c in coeffs:
            if isinstance(c, PadicScalar):
                vals.append(c.value)
            elif isinstance(c, Fraction):
                vals.append(PadicScalar.of(c, self.p, self.N).value)
            else:
                vals.append(int(c))
        vals = vals + [0] * (self.f - len(vals))
        if len(vals) > self.f:
            vals = _reduce(vals, self.poly, self.modulus)
        return UnramifiedScalar(self, tuple(v % self.modulus for v in vals))

    def zero(self) -> "UnramifiedScalar":
        return self.element(0)

    def one(self) -> "UnramifiedScalar":
        return self.element(1)

    def theta(self) -> "UnramifiedScalar":
        if self.f == 1:
            return self.element(-self.poly[0])
        return self.element([0, 1])

    def residues(self) -> list["UnramifiedScalar"]:
        """All coefficient vectors in [0, p)^f: a set of representatives of F_q."""
        return [self.element(list(c)) for c in cartesian(range(self.p), repeat=self.f)]

    def teichmuller_representatives(self) -> list["UnramifiedScalar"]:
        return [r.teichmuller() for r in self.residues()]

    def _compute_frobenius_root(self) -> tuple[int, ...]:
        # root of P congruent to theta^p mod p, by Newton iteration
        if self.f == 1:
            return (-self.poly[0] % self.modulus,)
        mod = self.modulus
        theta = [0, 1] + [0] * (self.f - 2)
        r = _pow_vec(theta, self.p, self.poly, mod)
        dpoly = [i * c for i, c in enumerate(self.poly)][1:]
        for _ in range(self.N.bit_length() + 2):
            Pr = _eval_poly_at(self.poly, r, self.poly, mod)
            dPr = _eval_poly_at(dpoly, r, self.poly, mod)
            inv = _inverse_vec(dPr, self.poly, self.p, mod)
            corr = _mul_vec(Pr, inv, self.poly, mod)
            r = [(a - b) % mod for a, b in zip(r, corr)]
        return tuple(r)


def _reduce(vals: list[int], poly: tuple[int, ...], mod: int) -> list[int]:
    vals = list(vals)
    f = len(poly) - 1
    for i in range(len(vals) - 1, f - 1, -1):
        c = vals[i]
        if c:
            for j in range(f):
                vals[i - f + j] -= c * poly[j]
        vals[i] = 0
    return [v % mod for v in vals[:f]]


def _mul_vec(a: Sequence[int], b: Sequence[int], poly: tuple[int, ...], mod: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _reduce(out, poly, mod) if len(out) >= len(poly) - 1 else out + [0] * (len(poly) - 1 - len(out))


def _pow_vec(a: Sequence[int], e: int, poly: tuple[int, ...], mod: int) -> list[int]:
    f = len(poly) - 1
    result = [1] + [0] * (f - 1)
    base = list(a)
    while e:
        if e & 1:
            result = _mul_vec(result, base, poly, mod)
        base = _mul_vec(base, base, poly, mod)
        e >>= 1
    return result


def _eval_poly_at(coeffs: Sequence[int], x: Sequence[int], poly: tuple[int, ...], mod: int) -> list[int]:
    f = len(poly) - 1
    acc = [0] * f
    for c in reversed(coeffs):
        acc = _mul_vec(acc, x, poly, mod)
        acc[0] = (acc[0] + c) % mod
    return acc


def _inverse_vec(a: Sequence[int], poly: tuple[int, ...], p: int, mod: int) -> list[int]:
    f = len(poly) - 1
    if all(c % p == 0 for c in a):
        raise DomainError("element is not a unit")
    # a^(q-2) inverts modulo p; Newton x <- x(2 - a x) doubles the precision
    x = _pow_vec(a, p**f - 2, poly, mod)
    two = [2] + [0] * (f - 1)
    for _ in range(mod.bit_length() + 1):
        ax = _mul_vec(a, x, poly, mod)
        x = _mul_vec(x, [(t - s) % mod for t, s in zip(two, ax)], poly, mod)
        if _mul_vec(a, x, poly, mod) == [1] + [0] * (f - 1):
            break
    return x


@dataclass(frozen=True)
class UnramifiedScalar:
    """An element of W(F_q) modulo p^N, as coefficients in the theta basis."""

    ring: UnramifiedRing
    coeffs: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def N(self) -> int:
        return self.ring.N

    def _coerce(self, other) -> "UnramifiedScalar":
        if isinstance(other, UnramifiedScalar):
            if other.ring.poly != self.ring.poly or other.ring.p != self.ring.p:
                raise DomainError("mixed unramified rings")
            if other.ring.N != self.ring.N:
                raise PrecisionError("mixed precisions in unramified arithmetic")
            return other
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self.ring.element(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        m = self.ring.modulus
        return UnramifiedScalar(self.ring, tuple((a + b) % m for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        m = self.ring.modulus
        return UnramifiedScalar(self.ring, tuple(-a % m for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        r = self.ring
        return UnramifiedScalar(r, tuple(_mul_vec(self.coeffs, o.coeffs, r.poly, r.modulus)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        r = self.ring
        return UnramifiedScalar(r, tuple(_pow_vec(self.coeffs, e, r.poly, r.modulus)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, PadicScalar)):
            try:
                other = self.ring.element(other)
            except DomainError:
                return False
        if not isinstance(other, UnramifiedScalar):
            return NotImplemented
        return self.ring.poly == other.ring.poly and self.ring.N == other.ring.N and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ring.poly, self.ring.N, self.coeffs))

    def __repr__(self) -> str:
        return f"UnramifiedScalar({list(self.coeffs)} mod {self.p}^{self.N}, P={list(self.ring.poly)})"

    def is_unit(self) -> bool:
        return any(c % self.p for c in self.coeffs)

    def valuation(self) -> int:
        return min(PadicScalar(self.p, self.N, c).valuation() for c in self.coeffs)

    def in_base(self) -> bool:
        """True when the element lies in Z_p (all higher theta-coefficients vanish)."""
        return all(c == 0 for c in self.coeffs[1:])

    def to_padic(self) -> PadicScalar:
        if not self.in_base():
            raise DomainError("element does not lie in Z_p")
        return PadicScalar(self.p, self.N, self.coeffs[0])

    def inverse(self) -> "UnramifiedScalar":
        r = self.ring
        return UnramifiedScalar(r, tuple(_inverse_vec(self.coeffs, r.poly, r.p, r.modulus)))

    def frobenius(self, j: int = 1) -> "UnramifiedScalar":
        """The j-th power of the arithmetic Frobenius (lifting x -> x^p)."""
        out = self
        r = self.ring
        for _ in range(j % r.f):
            out = UnramifiedScalar(r, tuple(_eval_poly_at(out.coeffs, r._frob_root, r.poly, r.modulus)))
        return out

    def norm(self) -> PadicScalar:
        acc = self.ring.one()
        for j in range(self.ring.f):
            acc = acc * self.frobenius(j)
        return acc.to_padic()

    def trace(self) -> PadicScalar:
        acc = self.ring.zero()
        for j in range(self.ring.f):
            acc = acc + self.frobenius(j)
        return acc.to_padic()

    def teichmuller(self) -> "UnramifiedScalar":
        if not self.is_unit():
            return self.ring.zero()
        return self ** (self.ring.q ** (self.N - 1))

    def residue(self) -> tuple[int, ...]:
        return tuple(c % self.p for c in self.coeffs)

    def with_precision(self, N: int) -> "UnramifiedScalar":
        if N > self.N:
            raise PrecisionError(f"cannot raise precision from {self.N} to {N}")
        return self.ring.with_precision(N).element(list(self.coeffs))

    def lift_to(self, ring: UnramifiedRing) -> "UnramifiedScalar":
        """Reinterpret the integer coefficients in a higher-precision copy of the ring."""
        return ring.element(list(self.coeffs))

    def divide_by_p(self, k: int = 1) -> "UnramifiedScalar":
        if any(c % self.p**k for c in self.coeffs):
            raise DomainError("element not divisible by p^k")
        if k >= self.N:
            raise PrecisionError("division by p exhausts the precision")
        ring = self.ring.with_precision(self.N - k)
        return ring.element([c // self.p**k for c in self.coeffs])

    def log(self) -> "UnramifiedScalar":
        y = self - 1
        if any(c % self.p for c in y.coeffs):
            raise DomainError("log needs x = 1 mod p")
        p, N = self.p, self.N
        M = _log_terms(N, p)
        guard = N + int(math.log(M, p)) + 2
        big = self.ring.with_precision(guard)
        yb = y.lift_to(big)
        acc = [0] * self.ring.f
        ypow = big.one()
        mod = p**N
        for m in range(1, M + 1):
            ypow = ypow * yb
            e = int(vp(m, p))
            u = pow(m // p**e, -1, mod)
            sign = -1 if m % 2 == 0 else 1
            for i, c in enumerate(ypow.coeffs):
                acc[i] += sign * (c // p**e) * u
        return self.ring.element(acc)

    def exp(self) -> "UnramifiedScalar":
        if self.is_unit() or any(c % self.p for c in self.coeffs):
            raise DomainError("exp needs v(z) >= 1")
        p, N = self.p, self.N
        M = 1
        while M - (M - 1) / (p - 1) < N:
            M += 1
        guard = N + vp_factorial(M, p) + 1
        big = self.ring.with_precision(guard)
        zb = self.lift_to(big)
        acc = [1] + [0] * (self.ring.f - 1)
        zpow = big.one()
        mod = p**N
        for m in range(1, M + 1):
            zpow = zpow * zb
            e = vp_factorial(m, p)
            u = pow(math.factorial(m) // p**e, -1, mod)
            for i, c in enumerate(zpow.coeffs):
                acc[i] += (c // p**e) * u
        return self.ring.element(acc)


def norm_via_matrix(x: UnramifiedScalar) -> PadicScalar:
    """Norm as the determinant of multiplication by x (independent of Frobenius)."""
    r = x.ring
    f = r.f
    cols = []
    for i in range(f):
        basis = r.element([1 if j == i else 0 for j in range(f)])
        cols.append((x * basis).coeffs)
    mat = [[Fraction(cols[j][i]) for j in range(f)] for i in range(f)]
    from .linalg import det_fraction

    return PadicScalar.of(det_fraction(mat), r.p, r.N)


# ---------------------------------------------------------------------------
# Iwasawa series


def binomial_padic(gamma: int, n: int) -> int:
    """C(gamma, n) for an integer lift gamma (any sign)."""
    num = 1
    for i in range(n):
        num *= gamma - i
    return num // math.factorial(n)


Monomial = tuple[int, ...]


@dataclass(frozen=True)
class IwasawaSeries:
    """A truncated power series over Z_p/p^N in ``nvars`` variables.

    Terms of total degree > ``D`` are discarded.  ``exact`` records whether the
    series is known to be a polynomial whose every term is represented; products
    of exact series that would need discarded terms raise ``TruncationError``.
    """

    p: int
    N: int
    nvars: int
    D: int
    terms: tuple[tuple[Monomial, int], ...]
    exact: bool = True

    @classmethod
    def from_dict(cls, p: int, N: int, nvars: int, D: int, coeffs: dict, exact: bool = True) -> "IwasawaSeries":
        mod = p**N
        clean = []
        for mono, c in coeffs.items():
            mono = tuple(mono)
            if len(mono) != nvars:
                raise DomainError("monomial arity mismatch")
            if isinstance(c, PadicScalar):
                c = c.value
            elif isinstance(c, Fraction):
                c = PadicScalar.of(c, p, N).value
            c %= mod
            if c == 0:
                continue
            if sum(mono) > D:
                if exact:
                    raise TruncationError(f"term of degree {sum(mono)} exceeds bound {D}")
                continue
            clean.append((mono, c))
        clean.sort()
        return cls(p, N, nvars, D, tuple(clean), exact)

    @classmethod
    def constant(cls, c, p: int, N: int, nvars: int, D: int = DEFAULT_SERIES_DEGREE) -> "IwasawaSeries":
        return cls.from_dict(p, N, nvars, D, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, p: int, N: int, nvars: int, D: int = DEFAULT_SERIES_DEGREE) -> "IwasawaSeries":
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls.from_dict(p, N, nvars, D, {mono: 1})

    def as_dict(self) -> dict[Monomial, int]:
        return dict(self.terms)

    def coefficient(self, mono: Sequence[int]) -> PadicScalar:
        return PadicScalar(self.p, self.N, self.as_dict().get(tuple(mono), 0))

    def _like(self, coeffs: dict, exact: bool, N: int | None = None) -> "IwasawaSeries":
        return IwasawaSeries.from_dict(self.p, self.N if N is None else N, self.nvars, self.D, coeffs, exact)

    def _coerce(self, other) -> "IwasawaSeries":
        if isinstance(other, IwasawaSeries):
            if (other.p, other.nvars) != (self.p, self.nvars):
                raise DomainError("incompatible series")
            if other.D != self.D:
                raise DomainError("series with different truncation bounds")
            return other
        if isinstance(other, (int, Fraction, PadicScalar)):
            return IwasawaSeries.constant(other, self.p, self.N, self.nvars, self.D)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = min(self.N, o.N)
        acc = self.as_dict()
        for mono, c in o.terms:
            acc[mono] = acc.get(mono, 0) + c
        return IwasawaSeries.from_dict(self.p, n, self.nvars, self.D, acc, self.exact and o.exact)

    __radd__ = __add__

    def __neg__(self):
        return self._like({m: -c for m, c in self.terms}, self.exact)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = min(self.N, o.N)
        mod = self.p**n
        both_exact = self.exact and o.exact
        acc: dict[Monomial, int] = {}
        for m1, c1 in self.terms:
            d1 = sum(m1)
            for m2, c2 in o.terms:
                if d1 + sum(m2) > self.D:
                    if both_exact and (c1 * c2) % mod:
                        raise TruncationError(f"product of exact series exceeds degree bound {self.D}")
                    continue
                mono = tuple(a + b for a, b in zip(m1, m2))
                acc[mono] = (acc.get(mono, 0) + c1 * c2) % mod
        return IwasawaSeries.from_dict(self.p, n, self.nvars, self.D, acc, both_exact)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = IwasawaSeries.constant(1, self.p, self.N, self.nvars, self.D)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, PadicScalar)):
            other = IwasawaSeries.constant(other, self.p, self.N, self.nvars, self.D)
        if not isinstance(other, IwasawaSeries):
            return NotImplemented
        if (self.p, self.nvars, self.D) != (other.p, other.nvars, other.D):
            return False
        n = min(self.N, other.N)
        mod = self.p**n
        a, b = self.as_dict(), other.as_dict()
        return all((a.get(k, 0) - b.get(k, 0)) % mod == 0 for k in set(a) | set(b))

    def __hash__(self) -> int:
        return hash((self.p, self.nvars, self.D, self.terms))

    def __repr__(self) -> str:
        if not self.terms:
            return "IwasawaSeries(0)"
        parts = []
        for mono, c in self.terms:
            vars_ = "*".join(f"T{i + 1}^{e}" if e > 1 else f"T{i + 1}" for i, e in enumerate(mono) if e)
            parts.append(f"{c}*{vars_}" if vars_ else str(c))
        tail = "" if self.exact else f" + O(deg {self.D + 1})"
        return f"IwasawaSeries({' + '.join(parts)}{tail} mod {self.p}^{self.N})"

    def constant_term(self) -> PadicScalar:
        return self.coefficient((0,) * self.nvars)

    def truncated(self) -> "IwasawaSeries":
        return IwasawaSeries(self.p, self.N, self.nvars, self.D, self.terms, False)

    def with_precision(self, N: int) -> "IwasawaSeries":
        if N > self.N:
            raise PrecisionError("cannot raise precision")
        return IwasawaSeries.from_dict(self.p, N, self.nvars, self.D, self.as_dict(), self.exact)

    def inverse(self) -> "IwasawaSeries":
        c0 = self.constant_term()
        if not c0.is_unit():
            raise DomainError("series with non-unit constant term is not invertible")
        # 1/(c0 (1 + S)) = c0^{-1} sum (-S)^n
        inv0 = c0.inverse()
        S = (self * inv0 - 1).truncated()
        acc = IwasawaSeries.constant(1, self.p, self.N, self.nvars, self.D).truncated()
        term = acc
        for _ in range(self.D):
            term = term * (-S)
            acc = acc + term
        return acc * inv0

    def binomial_power(self, gamma: int | PadicScalar) -> "IwasawaSeries":
        """(self)^gamma for a series with constant term 1 and gamma in Z_p.

        For a p-adic gamma known mod p^Ng the coefficients are exact modulo
        p^(Ng - v_p(D!)); the result's precision is lowered accordingly.
        """
        if self.constant_term() != 1:
            raise DomainError("binomial power needs constant term 1")
        if isinstance(gamma, int) and gamma >= 0:
            return self**gamma
        S = (self - 1).truncated()
        if isinstance(gamma, PadicScalar):
            lift = gamma.value
            N = min(self.N, gamma.N - vp_factorial(self.D, self.p))
            if N < 1:
                raise PrecisionError("exponent precision too low for the degree bound")
        else:
            lift, N = int(gamma), self.N
        S = S.with_precision(N)
        acc = IwasawaSeries.constant(1, self.p, N, self.nvars, self.D).truncated()
        power = acc
        for n in range(1, self.D + 1):
            power = power * S
            if not power.terms:
                break
            acc = acc + power * binomial_padic(lift, n)
        return acc

    def compose(self, subs: Sequence["IwasawaSeries"]) -> "IwasawaSeries":
        """Substitute variable i by subs[i] (each with zero constant term)."""
        if len(subs) != self.nvars:
            raise DomainError("need one substitution per variable")
        target = subs[0]
        for s in subs:
            if s.constant_term() != 0:
                raise DomainError("substituted series must have zero constant term")
            if (s.p, s.nvars, s.D) != (target.p, target.nvars, target.D):
                raise DomainError("incompatible substitution series")
        N = min([self.N] + [s.N for s in subs])
        exact = self.exact and all(s.exact for s in subs)
        acc = IwasawaSeries.from_dict(self.p, N, target.nvars, target.D, {}, exact)
        powers: list[dict[int, IwasawaSeries]] = [{0: IwasawaSeries.constant(1, self.p, N, target.nvars, target.D)} for _ in subs]
        for mono, c in self.terms:
            term = IwasawaSeries.constant(c, self.p, N, target.nvars, target.D)
            if not exact:
                term = term.truncated()
            for i, e in enumerate(mono):
                if e not in powers[i]:
                    powers[i][e] = subs[i] ** e
                term = term * powers[i][e]
            acc = acc + term
        return acc

    def evaluate(self, point: Sequence[PadicScalar | int]) -> PadicScalar:
        """Value at a point with positive-valuation coordinates.

        For a truncated series the discarded tail has valuation at least
        (D+1)·min v(t_i), so the result's precision is capped there.
        """
        pts = [PadicScalar.of(t, self.p, self.N) if not isinstance(t, PadicScalar) else t for t in point]
        if len(pts) != self.nvars:
            raise DomainError("point arity mismatch")
        N = min([self.N] + [t.N for t in pts])
        vmin = min((t.valuation() for t in pts), default=N)
        if vmin < 1:
            raise DomainError("evaluation point must lie in the open unit polydisk")
        if not self.exact:
            N = min(N, (self.D + 1) * vmin)
        mod = self.p**N
        acc = 0
        for mono, c in self.terms:
            term = c
            for t, e in zip(pts, mono):
                term = term * pow(t.value, e, mod) % mod
            acc += term
        return PadicScalar(self.p, N, acc)

    def specialize(self, index: int, value: PadicScalar | int) -> "IwasawaSeries":
        """Substitute a scalar of positive valuation for one variable (keeping arity)."""
        v = PadicScalar.of(value, self.p, self.N) if not isinstance(value, PadicScalar) else value
        N = min(self.N, v.N)
        if v.valuation() < 1:
            raise DomainError("specialisation point must have positive valuation")
        if not self.exact:
            N = min(N, (self.D + 1) * v.valuation())
        mod = self.p**N
        acc: dict[Monomial, int] = {}
        for mono, c in self.terms:
            e = mono[index]
            new = mono[:index] + (0,) + mono[index + 1 :]
            acc[new] = (acc.get(new, 0) + c * pow(v.value, e, mod)) % mod
        return IwasawaSeries.from_dict(self.p, N, self.nvars, self.D, acc, self.exact)


def exp_log_power(base: IwasawaSeries, gamma: Fraction | int, N: int) -> IwasawaSeries:
    """(base)^gamma computed as exp(gamma·log(base)) with rational arithmetic.

    Independent of ``binomial_power``: log and exp are expanded over Q and the
    coefficients reduced mod p^N at the end (gamma must be p-integral).
    """
    if base.nvars != 1:
        raise DomainError("exp_log_power works in one variable")
    D = base.D
    S = {mono[0]: Fraction(c) for mono, c in base.terms}
    S[0] = S.get(0, Fraction(0)) - 1
    if S[0] != 0:
        raise DomainError("base must have constant term 1")

    def mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * (D + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(D + 1 - i):
                    out[i + j] += x * b[j]
        return out

    s = [S.get(i, Fraction(0)) for i in range(D + 1)]
    log = [Fraction(0)] * (D + 1)
    power = [Fraction(1)] + [Fraction(0)] * D
    for n in range(1, D + 1):
        power = mul(power, s)
        for i in range(D + 1):
            log[i] += Fraction((-1) ** (n + 1), n) * power[i]
    z = [Fraction(gamma) * c for c in log]
    out = [Fraction(1)] + [Fraction(0)] * D
    power = [Fraction(1)] + [Fraction(0)] * D
    for n in range(1, D + 1):
        power = mul(power, z)
        for i in range(D + 1):
            out[i] += power[i] / math.factorial(n)
    return IwasawaSeries.from_dict(base.p, N, 1, D, {(i,): c for i, c in enumerate(out)}, exact=False)


# ---------------------------------------------------------------------------
# Field layout and characters


@dataclass(frozen=True)
class PrimeSpec:
    """A prime above p: a name, residue degree f and defining polynomial mod p."""

    name: str
    f: int = 1
    poly: tuple[int, ...] = (0, 1)

    def __post_init__(self) -> None:
        if len(self.poly) - 1 != self.f:
            raise DomainError(f"prime {self.name}: polynomial degree must equal f={self.f}")


@dataclass(frozen=True)
class FieldLayout:
    """The primes of F above p; the first prime is p0 and must have f = 1."""

    p: int
    primes: tuple[PrimeSpec, ...] = (PrimeSpec("p0"),)
    N: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if not self.primes:
            raise DomainError("at least one prime is required")
        if self.primes[0].f != 1:
            raise DomainError("the distinguished prime p0 must have residue degree 1")
        names = [pr.name for pr in self.primes]
        if len(set(names)) != len(names):
            raise DomainError("duplicate prime names")

    @property
    def d(self) -> int:
        return sum(pr.f for pr in self.primes)

    def ring(self, index: int, N: int | None = None) -> UnramifiedRing:
        return UnramifiedRing(self.p, self.N if N is None else N, self.primes[index].poly)

    def embeddings(self) -> list[tuple[int, int]]:
        """Embeddings as (prime index, Frobenius power); tau0 = (0, 0) comes first."""
        return [(i, j) for i, pr in enumerate(self.primes) for j in range(pr.f)]

    def embedding_labels(self) -> list[str]:
        out = []
        for i, j in self.embeddings():
            pr = self.primes[i]
            out.append(pr.name if pr.f == 1 else f"{pr.name}:{j}")
        return out

    def prime_index(self, name: str) -> int:
        for i, pr in enumerate(self.primes):
            if pr.name == name:
                return i
        raise DomainError(f"unknown prime {name!r}")

    def embedding_slice(self, index: int) -> slice:
        start = sum(pr.f for pr in self.primes[:index])
        return slice(start, start + self.primes[index].f)

    def unit(self, components: Sequence) -> tuple[UnramifiedScalar, ...]:
        """Normalise a tuple of per-prime components into ring elements."""
        if len(components) != len(self.primes):
            raise DomainError(f"expected {len(self.primes)} components, got {len(components)}")
        out = []
        for i, c in enumerate(components):
            ring = self.ring(i)
            if isinstance(c, UnramifiedScalar):
                if c.ring.poly != ring.poly:
                    raise DomainError("component in the wrong ring")
                c = c.with_precision(ring.N) if c.N > ring.N else c
                out.append(c)
            elif isinstance(c, (list, tuple)):
                out.append(ring.element(list(c)))
            else:
                out.append(ring.element(c))
        return tuple(out)

    def default_basis(self) -> list[tuple[int, list[int]]]:
        """Topological generators e_i of 1 + pO: 1 + p·theta^j in each prime."""
        basis = []
        for i, pr in enumerate(self.primes):
            for j in range(pr.f):
                coeffs = [0] * pr.f
                coeffs[j] = self.p
                coeffs[0] += 1
                basis.append((i, coeffs))
        return basis

    def norm(self, t: Sequence[UnramifiedScalar]) -> PadicScalar:
        acc = PadicScalar(self.p, self.N, 1)
        for c in t:
            acc = acc * c.norm()
        return acc


@dataclass(frozen=True)
class CharValue:
    """A pure tensor of per-prime values; equals a Z_p scalar when every factor does."""

    factors: tuple[UnramifiedScalar, ...]

    def __mul__(self, other: "CharValue") -> "CharValue":
        return CharValue(tuple(a * b for a, b in zip(self.factors, other.factors)))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CharValue):
            if all(f.in_base() for f in self.factors) and all(f.in_base() for f in other.factors):
                return self.scalar() == other.scalar()
            return self.factors == other.factors
        if isinstance(other, (int, Fraction, PadicScalar)):
            try:
                return self.scalar() == other
            except DomainError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.factors)

    def scalar(self) -> PadicScalar:
        acc = None
        for f in self.factors:
            v = f.to_padic()
            acc = v if acc is None else acc * v
        return acc

    def is_unit(self) -> bool:
        return all(f.is_unit() for f in self.factors)


CLASSICAL = "classical"
UNIVERSAL = "universal"


@dataclass(frozen=True)
class Character:
    """A continuous character of O^x = prod O_P^x.

    CLASSICAL: t -> prod_tau tau(t)^{k_tau} · N(t)^nu, with ``exponents`` indexed
    like ``layout.embeddings()``.
    UNIVERSAL: determined by the images of the generators ``basis`` of 1 + pO
    (Iwasawa series congruent to 1) and an optional torsion part given by
    exponents of the Teichmuller character, which must be parallel on each prime.
    """

    layout: FieldLayout
    kind: str
    exponents: tuple[int, ...] = ()
    nu: int = 0
    images: tuple[IwasawaSeries, ...] = ()
    basis: tuple[tuple[int, tuple[int, ...]], ...] = ()
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind == CLASSICAL:
            if len(self.exponents) != self.layout.d:
                raise DomainError(f"classical character needs {self.layout.d} exponents")
        elif self.kind == UNIVERSAL:
            basis = self.basis or tuple((i, tuple(c)) for i, c in self.layout.default_basis())
            object.__setattr__(self, "basis", basis)
            if len(self.images) != len(basis):
                raise DomainError("one image per basis element is required")
            first = self.images[0]
            for im in self.images:
                if (im.p, im.nvars, im.D) != (first.p, first.nvars, first.D):
                    raise DomainError("images must live in a common Iwasawa ring")
                if im.constant_term() != 1:
                    raise DomainError("images of 1 + pO must be congruent to 1")
            if self.torsion and len(self.torsion) != self.layout.d:
                raise DomainError("torsion exponents need one entry per embedding")
            if self.torsion:
                for i in range(len(self.layout.primes)):
                    block = self.torsion[self.layout.embedding_slice(i)]
                    if len(set(block)) > 1:
                        raise DomainError("torsion exponents must be parallel on each prime")
        else:
            raise DomainError(f"unknown character kind {self.kind!r}")

    @classmethod
    def classical(cls, layout: FieldLayout, exponents: Sequence[int], nu: int = 0) -> "Character":
        return cls(layout, CLASSICAL, exponents=tuple(int(e) for e in exponents), nu=int(nu))

    @classmethod
    def trivial(cls, layout: FieldLayout) -> "Character":
        return cls.classical(layout, [0] * layout.d)

    @classmethod
    def universal(
        cls,
        layout: FieldLayout,
        images: Sequence[IwasawaSeries],
        basis: Sequence[tuple[int, Sequence[int]]] | None = None,
        torsion: Sequence[int] = (),
    ) -> "Character":
        b = tuple((i, tuple(c)) for i, c in basis) if basis else ()
        return cls(layout, UNIVERSAL, images=tuple(images), basis=b, torsion=tuple(torsion))

    @classmethod
    def universal_standard(cls, layout: FieldLayout, D: int = DEFAULT_SERIES_DEGREE) -> "Character":
        """The universal character with e_i -> 1 + T_i."""
        d = layout.d
        imgs = [IwasawaSeries.variable(i, layout.p, layout.N, d, D) + 1 for i in range(d)]
        return cls.universal(layout, imgs)


def _solve_mod(matrix: list[list[int]], rhs: list[int], p: int, mod: int) -> list[int]:
    """Solve matrix·x = rhs modulo p^k for a matrix invertible mod p."""
    n = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] % p), None)
        if piv is None:
            raise DomainError("basis logarithms are not independent mod p")
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, mod)
        a[col] = [x * inv % mod for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [(x - c * y) % mod for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def basis_coordinates(layout: FieldLayout, basis, t: Sequence[UnramifiedScalar]) -> list[PadicScalar]:
    """Coordinates gamma with <t> = prod e_i^{gamma_i}.

    The components share a precision W; the coordinates are exact modulo
    p^(W-1) because the logarithms are divided by p once.
    """
    p = layout.p
    by_prime: dict[int, list[int]] = {}
    for idx, (pi, _) in enumerate(basis):
        by_prime.setdefault(pi, []).append(idx)
    gammas: dict[int, PadicScalar] = {}
    for pi, x in enumerate(t):
        ring = x.ring
        unit = x * x.teichmuller().inverse()
        lt = unit.log().divide_by_p(1)
        idxs = by_prime.get(pi, [])
        f = ring.f
        if len(idxs) != f:
            raise DomainError(f"basis must contain {f} generators in prime {pi}")
        cols = [ring.element(list(basis[idx][1])).log().divide_by_p(1).coeffs for idx in idxs]
        mod = p ** (ring.N - 1)
        matrix = [[cols[j][i] for j in range(f)] for i in range(f)]
        sol = _solve_mod(matrix, list(lt.coeffs), p, mod)
        for idx, g in zip(idxs, sol):
            gammas[idx] = PadicScalar(p, ring.N - 1, g)
    return [gammas[idx] for idx in range(len(basis))]


def char_eval(chi: Character, t: Sequence, radius_valuation: Fraction | int | None = None):
    """Evaluate a character at t = (t_P) in O^x.

    CLASSICAL characters return a :class:`CharValue`; UNIVERSAL ones an
    :class:`IwasawaSeries`.  ``radius_valuation`` is the valuation of the
    parameter lambda describing an enlarged disc 1 + p^n lambda^{-1} O; the
    logarithm/exponential expansion converges only when it is < (p-2)/(p-1).
    """
    layout = chi.layout
    p = layout.p
    if radius_valuation is not None and Fraction(radius_valuation) >= Fraction(p - 2, p - 1):
        raise DomainError(f"radius valuation {radius_valuation} outside the analyticity bound (p-2)/(p-1)")
    comps = layout.unit(t) if chi.kind == CLASSICAL else t
    if chi.kind == CLASSICAL:
        for c in comps:
            if not c.is_unit():
                raise DomainError("character arguments must be units")
        factors = []
        nu_part = layout.norm(comps) ** chi.nu
        for i, c in enumerate(comps):
            acc = c.ring.one()
            for j, e in zip(range(layout.primes[i].f), chi.exponents[layout.embedding_slice(i)]):
                if e:
                    acc = acc * c.frobenius(j) ** e
            factors.append(acc)
        factors[0] = factors[0] * nu_part
        return CharValue(tuple(factors))

    img0 = chi.images[0]
    N = img0.N
    D = img0.D
    guard = N + vp_factorial(D, p) + 2
    work = guard
    for c in t:
        if isinstance(c, (UnramifiedScalar, PadicScalar)):
            work = min(work, c.N)
    raw = []
    for i, c in enumerate(t):
        ring = layout.ring(i, work)
        if isinstance(c, UnramifiedScalar):
            raw.append(ring.element(list(c.coeffs)))
        elif isinstance(c, PadicScalar):
            raw.append(ring.element(c.value))
        elif isinstance(c, (list, tuple)):
            raw.append(ring.element(list(c)))
        else:
            raw.append(ring.element(c))
    for c in raw:
        if not c.is_unit():
            raise DomainError("character arguments must be units")
    gammas = basis_coordinates(layout, chi.basis, raw)
    # binomial_power lowers the precision by v_p(D!) when gamma is inexact
    value = IwasawaSeries.constant(1, p, N, img0.nvars, D)
    for img, g in zip(chi.images, gammas):
        value = value * img.binomial_power(g)
    if chi.torsion:
        tors = PadicScalar(p, value.N, 1)
        for i, c in enumerate(raw):
            a = chi.torsion[layout.embedding_slice(i).start]
            if a:
                tors = tors * c.teichmuller().norm().with_precision(value.N) ** a
        value = value * tors
    return value
