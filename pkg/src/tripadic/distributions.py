"""Truncated locally analytic functions and distributions at a prime P of residue degree 1.

A function of weight k on O^x × O is f(x, y) = x^k·phi(y/x).  At level m and
degree D the dehomogenised phi is a polynomial of degree <= D on each residue
disc r + p^m Z_p, written in the rescaled variable w = (z - r)/p^m.  The basis
is phi^m_{r,j} = 1_{r + p^m Z_p}·w^j.  Distributions are stored by their values
on this basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import ConvergenceError, DomainError, TruncationError
from .padic import is_prime, vp


def round_padic(x, N: int, p: int):
    """x modulo p^N Z_p (absolute precision N), keeping a p-power denominator if present."""
    x = Fraction(x)
    e = vp(x.denominator, p)
    unit_den = x.denominator // p**e
    mod = p ** (N + e)
    if N + e <= 0:
        return 0
    c = x.numerator * pow(unit_den, -1, mod) % mod
    return c if e == 0 else Fraction(c, p**e)


def _p_integral_mod(x, mod: int, p: int) -> int:
    """x mod p^k for a p-integral rational x."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise DomainError(f"{x} is not p-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod


@dataclass(frozen=True)
class TruncatedSpace:
    """Level-m, degree-D truncation of C^k at a prime with residue field F_p."""

    p: int
    k: int
    m: int
    D: int

    def __post_init__(self) -> None:
        if not is_prime(self.p) or self.p == 2:
            raise DomainError("p must be an odd prime")
        if self.m < 0 or self.D < 0:
            raise DomainError("level and degree must be non-negative")

    @property
    def discs(self) -> int:
        return self.p**self.m

    @property
    def dim(self) -> int:
        return self.discs * (self.D + 1)

    def index(self, r: int, j: int) -> int:
        return r * (self.D + 1) + j

    def labels(self) -> list[tuple[int, int]]:
        return [(r, j) for r in range(self.discs) for j in range(self.D + 1)]

    def with_level(self, m: int) -> "TruncatedSpace":
        return TruncatedSpace(self.p, self.k, m, self.D)

    def with_weight(self, k: int, D: int | None = None) -> "TruncatedSpace":
        return TruncatedSpace(self.p, k, self.m, self.D if D is None else D)


@dataclass(frozen=True)
class LocallyAnalyticFunction:
    space: TruncatedSpace
    coeffs: tuple

    @classmethod
    def zero(cls, space: TruncatedSpace) -> "LocallyAnalyticFunction":
        return cls(space, (0,) * space.dim)

    @classmethod
    def basis(cls, space: TruncatedSpace, r: int, j: int) -> "LocallyAnalyticFunction":
        c = [0] * space.dim
        c[space.index(r, j)] = 1
        return cls(space, tuple(c))

    @classmethod
    def polynomial(cls, space: TruncatedSpace, poly: Sequence) -> "LocallyAnalyticFunction":
        """The global polynomial sum_j poly[j] z^j, re-expanded on every disc."""
        if len(poly) - 1 > space.D:
            raise TruncationError("polynomial degree exceeds D")
        c = [0] * space.dim
        pm = space.p**space.m
        for r in range(space.discs):
            for j, a in enumerate(poly):
                if not a:
                    continue
                # z^j = (r + p^m w)^j
                for l in range(j + 1):
                    c[space.index(r, l)] += a * math.comb(j, l) * r ** (j - l) * pm**l
        return cls(space, tuple(c))

    def __add__(self, other: "LocallyAnalyticFunction") -> "LocallyAnalyticFunction":
        return LocallyAnalyticFunction(self.space, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, s) -> "LocallyAnalyticFunction":
        return LocallyAnalyticFunction(self.space, tuple(s * a for a in self.coeffs))

    def disc(self, r: int) -> list:
        s = self.space
        return list(self.coeffs[s.index(r, 0) : s.index(r, 0) + s.D + 1])

    def evaluate(self, z) -> Fraction:
        """phi(z) for a p-integral rational z."""
        s = self.space
        pm = s.p**s.m
        r = _p_integral_mod(z, pm, s.p)
        w = (Fraction(z) - r) / pm
        return sum(Fraction(a) * w**j for j, a in enumerate(self.disc(r)))

    def evaluate_xy(self, x, y) -> Fraction:
        """f(x, y) = x^k phi(y/x) for a p-adic unit x."""
        x = Fraction(x)
        return x**self.space.k * self.evaluate(Fraction(y) / x)

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class Distribution:
    space: TruncatedSpace
    values: tuple

    @classmethod
    def zero(cls, space: TruncatedSpace) -> "Distribution":
        return cls(space, (0,) * space.dim)

    @classmethod
    def dual_basis(cls, space: TruncatedSpace, r: int, j: int) -> "Distribution":
        v = [0] * space.dim
        v[space.index(r, j)] = 1
        return cls(space, tuple(v))

    @classmethod
    def point_mass(cls, space: TruncatedSpace, x, y) -> "Distribution":
        """delta_(x, y): integrates f to f(x, y)."""
        vals = []
        for r, j in space.labels():
            vals.append(LocallyAnalyticFunction.basis(space, r, j).evaluate_xy(x, y))
        return cls(space, tuple(vals))

    def __call__(self, f: LocallyAnalyticFunction):
        return sum(a * b for a, b in zip(self.values, f.coeffs))

    def __add__(self, other: "Distribution") -> "Distribution":
        return Distribution(self.space, tuple(a + b for a, b in zip(self.values, other.values)))

    def scale(self, s) -> "Distribution":
        return Distribution(self.space, tuple(s * a for a in self.values))

    def is_zero(self) -> bool:
        return not any(self.values)


@dataclass(frozen=True)
class HeckeMatrix:
    """A square matrix over Q (N = None) or over Z/p^N, labelled by operator and prime."""

    entries: tuple[tuple, ...]
    p: int
    N: int | None = None
    name: str = "U"
    prime: str = "p"

    @classmethod
    def of(cls, rows: Sequence[Sequence], p: int, N: int | None = None, name: str = "U", prime: str = "p") -> "HeckeMatrix":
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DomainError("Hecke matrices must be square")
        if N is not None:
            rows = [[round_padic(x, N, p) for x in r] for r in rows]
        return cls(tuple(tuple(r) for r in rows), p, N, name, prime)

    @property
    def size(self) -> int:
        return len(self.entries)

    def rows(self) -> list[list]:
        return [list(r) for r in self.entries]

    def mod(self, N: int) -> "HeckeMatrix":
        return HeckeMatrix.of(self.rows(), self.p, N, self.name, self.prime)

    def __matmul__(self, other: "HeckeMatrix") -> "HeckeMatrix":
        N = _common_precision(self.N, other.N)
        prod = linalg.matmul(self.rows(), other.rows())
        return HeckeMatrix.of(prod, self.p, N, self.name, self.prime)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeckeMatrix):
            return NotImplemented
        N = _common_precision(self.N, other.N)
        if N is None:
            return self.entries == other.entries
        return all(
            round_padic(Fraction(a) - Fraction(b), N, self.p) == 0
            for r, s in zip(self.entries, other.entries)
            for a, b in zip(r, s)
        )

    def __hash__(self) -> int:
        return hash((self.entries, self.p, self.N))

    def is_idempotent(self) -> bool:
        return self @ self == self


def _common_precision(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ---------------------------------------------------------------------------
# substitution actions


def _poly_mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_pow(a: list, e: int, cap: int | None = None) -> list:
    out = [1]
    for _ in range(e):
        out = _poly_mul(out, a)
        if cap is not None:
            out = out[:cap]
    return out


def _series_inverse(a: list, n: int) -> list:
    """First n coefficients of 1/a(w) for a(0) != 0."""
    inv0 = Fraction(1) / Fraction(a[0])
    out = [inv0]
    for i in range(1, n):
        s = sum(Fraction(a[j]) * out[i - j] for j in range(1, min(i, len(a) - 1) + 1))
        out.append(-s * inv0)
    return out


def _check_k0p(g: Sequence[Sequence], p: int) -> tuple:
    (a, b), (c, d) = g
    for x in (a, b, c, d):
        if Fraction(x).denominator % p == 0:
            raise DomainError("matrix entries must be p-integral")
    if _p_integral_mod(c, p, p) != 0:
        raise DomainError("lower-left entry must be divisible by p")
    if _p_integral_mod(a, p, p) == 0 or _p_integral_mod(d, p, p) == 0:
        raise DomainError("diagonal entries must be units (g in the Iwahori group)")
    return Fraction(a), Fraction(b), Fraction(c), Fraction(d)


def _substitute(f: LocallyAnalyticFunction, a, b, c, d, weight_factor: bool, N: int | None) -> LocallyAnalyticFunction:
    """(x, y) -> (a x + c y, b x + d y), re-expanded on the level-m discs of f."""
    s = f.space
    p, m, D, k = s.p, s.m, s.D, s.k
    pm = p**m
    exact = c == 0
    if not exact and N is None:
        raise DomainError("a lower-triangular part needs a working precision N")
    L = D + 1 if exact else D + 1 + N
    out = [Fraction(0)] * s.dim
    for t in range(s.discs):
        # z = t + p^m w; numerator b + d z and denominator a + c z as polynomials in w
        num = [b + d * t, d * pm]
        den = [a + c * t, c * pm]
        if _p_integral_mod(den[0], p, p) == 0:
            raise DomainError("the substitution leaves O^x × O")
        inv = _series_inverse(den, L)
        mob = _poly_mul(num, inv)[:L]
        centre = mob[0]
        r = _p_integral_mod(centre, pm, p)
        # rescaled source variable ((M(z) - r)/p^m)
        src = [(mob[0] - r) / pm] + [x / pm for x in mob[1:]]
        for x in src:
            if Fraction(x).denominator % p == 0:
                raise DomainError("the substitution does not map residue discs to residue discs")
        weight = [1]
        if weight_factor and k:
            if k > 0:
                weight = _poly_pow(den, k, L)
            else:
                weight = _poly_pow(inv, -k, L)
        coeffs = f.disc(r)
        acc = [Fraction(0)] * L
        power = [Fraction(1)]
        for j, a_j in enumerate(coeffs):
            if j:
                power = _poly_mul(power, src)[:L]
            if a_j:
                term = _poly_mul(power, weight)[:L]
                for l, v in enumerate(term):
                    acc[l] += a_j * v
        for l in range(D + 1, len(acc)):
            if acc[l] != 0 and (exact or vp(acc[l], p) < N):
                raise TruncationError(f"the action produces a degree-{l} term beyond D = {D}")
        for l in range(D + 1):
            out[s.index(t, l)] = acc[l]
    return LocallyAnalyticFunction(s, tuple(_normalise(x) for x in out))


def _normalise(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def act_K0p(g: Sequence[Sequence], f: LocallyAnalyticFunction, N: int | None = None) -> LocallyAnalyticFunction:
    """(g * f)(x, y) = f((x, y) g) for g in the Iwahori group K_0(p).

    Upper-triangular g act exactly.  A nonzero lower-left entry gives an
    infinite expansion; it is computed modulo p^N and any term beyond degree D
    that is nonzero modulo p^N raises.
    """
    a, b, c, d = _check_k0p(g, f.space.p)
    return _substitute(f, a, b, c, d, True, N)


def g_bar_action(i: int, f: LocallyAnalyticFunction) -> LocallyAnalyticFunction:
    """ḡ_i = (1, i; 0, p): phi(z) -> phi(i + p z); the x-coordinate and weight factor are unchanged."""
    return _substitute(f, Fraction(1), Fraction(i), Fraction(0), Fraction(f.space.p), False, None)


def re_expand(f: LocallyAnalyticFunction, m: int) -> LocallyAnalyticFunction:
    """View a level-m' function at a finer level m >= m'."""
    s = f.space
    if m < s.m:
        raise DomainError("can only refine the level")
    target = s.with_level(m)
    p = s.p
    out = [0] * target.dim
    scale = p ** (m - s.m)
    for t in range(target.discs):
        r = t % s.discs
        shift = (t - r) // s.discs  # t = r + p^{m'} shift
        # w' = (z - r)/p^{m'} = shift + p^{m - m'} w
        for j, a in enumerate(f.disc(r)):
            if not a:
                continue
            for l in range(j + 1):
                out[target.index(t, l)] += a * math.comb(j, l) * shift ** (j - l) * scale**l
    return LocallyAnalyticFunction(target, tuple(out))


def _function_matrix(space: TruncatedSpace, images: list[LocallyAnalyticFunction]) -> list[list]:
    """Columns are the coefficient vectors of the images of the basis."""
    n = len(images)
    rows = len(images[0].coeffs) if images else 0
    return [[images[c].coeffs[r] for c in range(n)] for r in range(rows)]



def up_function_matrix(space: TruncatedSpace) -> list[list]:
    """Matrix of T = sum_i ḡ_i* on the function basis (columns are images)."""
    if space.m < 1:
        raise DomainError("U_P needs level m >= 1 to lower the level")
    images = []
    for r, j in space.labels():
        phi = LocallyAnalyticFunction.basis(space, r, j)
        acc = LocallyAnalyticFunction.zero(space)
        for i in range(space.p):
            acc = acc + g_bar_action(i, phi)
        images.append(acc)
    return _function_matrix(space, images)


def up_matrix(space: TruncatedSpace, prime: str = "p") -> HeckeMatrix:
    """U_P on distributions: (U mu)(phi) = mu(T phi), i.e. the transpose of T."""
    return HeckeMatrix.of(linalg.transpose(up_function_matrix(space)), space.p, None, "U", prime)


def up_operator(mu: Distribution, prime: str = "p") -> Distribution:
    mat = up_matrix(mu.space, prime)
    return Distribution(mu.space, tuple(linalg.matvec(mat.rows(), list(mu.values))))


def compactness_factorisation(space: TruncatedSpace) -> tuple[list[list], list[list]]:
    """(S, E) with T = E·S: S lowers to level m-1, E re-expands back to level m."""
    if space.m < 1:
        raise DomainError("U_P needs level m >= 1")
    lower = space.with_level(space.m - 1)
    p = space.p
    s_cols = []
    for r, j in space.labels():
        # only i = r mod p survives; the image is phi^{m-1}_{(r - i)/p, j}
        i = r % p
        s_cols.append(LocallyAnalyticFunction.basis(lower, (r - i) // p, j))
    S = _function_matrix(space, s_cols)
    e_cols = [re_expand(LocallyAnalyticFunction.basis(lower, r, j), space.m) for r, j in lower.labels()]
    E = _function_matrix(lower, e_cols)
    return S, E


# ---------------------------------------------------------------------------
# ordinary projector


def e_ord(U: HeckeMatrix, N: int | None = None, max_iter: int = 400) -> HeckeMatrix:
    """lim U^{n!} modulo p^N, stopped once the power is idempotent.

    An idempotent power U^M of U is the ordinary projector: on the unit part
    U^M(U^M - 1) = 0 forces U^M = 1, and on the topologically nilpotent part
    1 - U^M is invertible so U^M = 0.
    """
    N = U.N if N is None else N
    if N is None:
        raise DomainError("e_ord needs a working precision N")
    p = U.p
    mod = p**N
    rows = [[_p_integral_mod(x, mod, p) for x in r] for r in U.entries]
    power = linalg.reduce_mod(rows, mod)
    for n in range(2, max_iter + 2):
        if linalg.matmul(power, power, mod) == power:
            return HeckeMatrix(tuple(tuple(r) for r in power), p, N, "e_ord", U.prime)
        power = linalg.matpow_mod(power, n, mod)
    residual = linalg.matsub(linalg.matmul(power, power, mod), power)
    bad = max(vp(x % mod, p) if x % mod else N for r in residual for x in r)
    raise ConvergenceError(f"U^(n!) did not stabilise after {max_iter} steps (residual valuation {bad})")


# ---------------------------------------------------------------------------
# BGG map


def bgg_theta(f: LocallyAnalyticFunction, k: int | None = None) -> LocallyAnalyticFunction:
    """(k+1)-fold y-derivative: weight k -> weight -1, degree D -> D - k - 1.

    On a disc d/dz = p^{-m} d/dw, so w^j -> j!/(j-k-1)!·p^{-m(k+1)} w^{j-k-1}.
    """
    s = f.space
    k = s.k if k is None else k
    if k < 0:
        raise DomainError("the BGG map needs a classical weight k >= 0")
    if s.D < k + 1:
        raise DomainError(f"truncation degree D = {s.D} is below k + 1 = {k + 1}")
    target = TruncatedSpace(s.p, -1, s.m, s.D - k - 1)
    scale = Fraction(1, s.p ** (s.m * (k + 1)))
    out = [0] * target.dim
    for r in range(s.discs):
        for j, a in enumerate(f.disc(r)):
            if j >= k + 1 and a:
                out[target.index(r, j - k - 1)] += a * Fraction(math.factorial(j), math.factorial(j - k - 1)) * scale
    return LocallyAnalyticFunction(target, tuple(_normalise(x) for x in out))


def bgg_function_matrix(space: TruncatedSpace) -> list[list]:
    images = [bgg_theta(LocallyAnalyticFunction.basis(space, r, j)) for r, j in space.labels()]
    return _function_matrix(space, images)


def bgg_dual_matrix(space: TruncatedSpace) -> list[list]:
    """Theta^vee: distributions of weight -1 -> distributions of weight k (transpose)."""
    return linalg.transpose(bgg_function_matrix(space))


# ---------------------------------------------------------------------------
# classical specialisation and the dual pairing


def sym_polynomials(space: TruncatedSpace, k: int) -> list[LocallyAnalyticFunction]:
    """The monomials z^j (j <= k), i.e. x^{k-j} y^j, inside the truncation."""
    return [LocallyAnalyticFunction.polynomial(space, [0] * j + [1]) for j in range(k + 1)]


def classical_projection(mu: Distribution, k: int | None = None) -> list:
    """mu restricted to Sym^k: the vector (mu(x^{k-j} y^j))_{j <= k}."""
    s = mu.space
    k = s.k if k is None else k
    if k != s.k or k < 0:
        raise DomainError("classical projection needs the space's classical weight k >= 0")
    if s.D < k:
        raise TruncationError("degree truncation D is below k")
    return [_normalise(mu(P)) for P in sym_polynomials(s, k)]


def classical_up_matrix(k: int, p: int) -> list[list]:
    """T on Sym^k in the basis z^j: T z^j = sum_i (i + p z)^j (columns are images)."""
    out = linalg.zeros(k + 1, k + 1)
    for j in range(k + 1):
        for l in range(j + 1):
            out[l][j] = math.comb(j, l) * p**l * sum(i ** (j - l) for i in range(p))
    return out


@dataclass(frozen=True)
class DualDistribution:
    """A distribution on pO × O^x of classical weight k, by its moments mu(X^j Y^{k-j})."""

    p: int
    k: int
    moments: tuple

    def __post_init__(self) -> None:
        if len(self.moments) != self.k + 1:
            raise DomainError("need k + 1 moments")

    @classmethod
    def point_mass(cls, p: int, k: int, X, Y) -> "DualDistribution":
        if _p_integral_mod(X, p, p) != 0 or _p_integral_mod(Y, p, p) == 0:
            raise DomainError("point masses on the dual side need X in pO and Y a unit")
        return cls(p, k, tuple(_normalise(Fraction(X) ** j * Fraction(Y) ** (k - j)) for j in range(k + 1)))


def pairing_weights(k: int) -> list[int]:
    """(xY - Xy)^k = sum_j C(k, j) (-1)^j (x^{k-j} y^j)(X^j Y^{k-j})."""
    return [math.comb(k, j) * (-1) ** j for j in range(k + 1)]


def pair_dual(mu1: Distribution, mu2: DualDistribution, k: int | None = None):
    """The double integral of (xY - Xy)^k against mu1 ⊗ mu2."""
    k = mu1.space.k if k is None else k
    if not isinstance(k, int):
        raise DomainError("the dual pairing is implemented for classical weights only")
    if mu2.k != k:
        raise DomainError("weights of the two sides differ")
    a = classical_projection(mu1, k)
    return _normalise(sum(w * x * y for w, x, y in zip(pairing_weights(k), a, mu2.moments)))


def dual_up(mu2: DualDistribution) -> DualDistribution:
    """The adjoint of U for pair_dual, defined as a transpose (see dual_up_matrix)."""
    vals = linalg.matvec(dual_up_matrix(mu2.k, mu2.p), list(mu2.moments))
    return DualDistribution(mu2.p, mu2.k, tuple(_normalise(x) for x in vals))


def dual_up_coset(mu2: DualDistribution) -> DualDistribution:
    """Coset form of the adjoint: sum over i of the substitution (X, Y) -> (pX, Y - iX)."""
    p, k = mu2.p, mu2.k
    out = []
    for j in range(k + 1):
        # (pX)^j (Y - iX)^{k-j} = p^j sum_l C(k-j, l) (-i)^l X^{j+l} Y^{k-j-l}
        total = 0
        for i in range(p):
            for l in range(k - j + 1):
                total += p**j * math.comb(k - j, l) * (-i) ** l * mu2.moments[j + l]
        out.append(total)
    return DualDistribution(p, k, tuple(out))


def dual_up_matrix(k: int, p: int) -> list[list]:
    """Adjoint of U for the pairing, as P^{-1} T P with P the diagonal pairing weights."""
    T = classical_up_matrix(k, p)
    w = pairing_weights(k)
    return [[Fraction(T[i][j] * w[j], w[i]) for j in range(k + 1)] for i in range(k + 1)]
