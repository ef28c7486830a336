"""Local jet model of nearly overconvergent forms: nabla, epsilon, projections, trilinear products.

A jet is f(X) = sum_j b_j X^j with coefficients in a base ring R that carries a
derivation D and a distinguished element c.  Two base rings are provided:
polynomials in one variable t with D = g(t)·d/dt, and q-expansions with
D = Theta and c = 0 (the unit-root frame).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DomainError, IdentityFailure
from .serre_tate import QExpansion, theta


# ---------------------------------------------------------------------------
# polynomial base ring


def _trim(coeffs: Sequence) -> tuple:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True)
class Poly:
    """A polynomial in t with rational coefficients, lowest degree first."""

    coeffs: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly((other,))
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly(tuple(x + y for x, y in zip(a, b)) + a[len(b):])

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(tuple(other * x for x in self.coeffs))
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return Poly()
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(o.coeffs):
                    out[i + j] += x * y
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly((other,))
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*t^{i}" for i, c in enumerate(self.coeffs) if c)

    def derivative(self) -> "Poly":
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def is_zero(self) -> bool:
        return not self.coeffs


@dataclass(frozen=True)
class BaseRing:
    """A differential base ring: zero element, derivation D and constant c."""

    name: str
    zero: object
    derivation: Callable
    c: object
    unit_root_frame: bool = False

    def D(self, x):
        return self.derivation(x)

    def is_zero(self, x) -> bool:
        if isinstance(x, Poly):
            return x.is_zero()
        if isinstance(x, QExpansion):
            return not x.terms
        return x == 0


def poly_base(g: Poly | None = None, c: Poly | None = None) -> BaseRing:
    """Polynomials in t with D = g(t)·d/dt (g = 0 gives the trivial derivation)."""
    g = Poly() if g is None else g
    c = Poly() if c is None else c
    return BaseRing("poly", Poly(), lambda x: g * x.derivative(), c)


def qexp_base(p: int, cap: int = 10000) -> BaseRing:
    """q-expansions with D = Theta and c = 0: the frame where u_2 spans the unit-root line."""
    return BaseRing("qexp", QExpansion.zero(p, cap), theta, QExpansion.zero(p, cap), unit_root_frame=True)


# ---------------------------------------------------------------------------
# jets


@dataclass(frozen=True)
class Jet:
    """f(X) = sum b_j X^j over a base ring; ``weight`` k and ``order`` m >= deg f."""

    base: BaseRing
    coeffs: tuple
    weight: int
    order: int

    def __post_init__(self) -> None:
        coeffs = list(self.coeffs)
        while coeffs and self.base.is_zero(coeffs[-1]):
            coeffs.pop()
        if len(coeffs) - 1 > self.order:
            raise DomainError(f"jet of degree {len(coeffs) - 1} exceeds its order {self.order}")
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def constant(cls, base: BaseRing, b0, weight: int) -> "Jet":
        return cls(base, (b0,), weight, 0)

    def coefficient(self, j: int):
        return self.coeffs[j] if j < len(self.coeffs) else self.base.zero

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def _padded(self, n: int) -> list:
        return [self.coefficient(j) for j in range(n)]

    def __add__(self, other: "Jet") -> "Jet":
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self._padded(n), other._padded(n)
        return Jet(self.base, tuple(x + y for x, y in zip(a, b)), self.weight, max(self.order, other.order))

    def __neg__(self) -> "Jet":
        return Jet(self.base, tuple(-x for x in self.coeffs), self.weight, self.order)

    def __sub__(self, other: "Jet") -> "Jet":
        return self + (-other)

    def scale(self, s) -> "Jet":
        return Jet(self.base, tuple(x * s for x in self.coeffs), self.weight, self.order)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        if not self.coeffs or not other.coeffs:
            return Jet(self.base, (), self.weight + other.weight, self.order + other.order)
        out = [self.base.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return Jet(self.base, tuple(out), self.weight + other.weight, self.order + other.order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(x == y for x, y in zip(self._padded(n), other._padded(n)))

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs


def nabla(f: Jet, k: int | None = None) -> Jet:
    """nabla_k f = D f - (X^2 - c) f' + k X f, of order m+1 and weight k+2."""
    k = f.weight if k is None else k
    base = f.base
    n = len(f.coeffs)
    out = []
    for i in range(n + 1):
        term = base.zero
        if i < n:
            term = term + base.D(f.coeffs[i])
        if 1 <= i <= n:
            term = term + f.coeffs[i - 1] * (k - (i - 1))
        if i + 1 < n:
            term = term + base.c * f.coeffs[i + 1] * (i + 1)
        out.append(term)
    return Jet(base, tuple(out), k + 2, f.order + 1)


def epsilon(f: Jet) -> Jet:
    """The X-derivative, of order m-1 and weight k-2."""
    out = tuple(f.coeffs[j] * j for j in range(1, len(f.coeffs)))
    return Jet(f.base, out, f.weight - 2, max(f.order - 1, 0))


def nabla_power(f: Jet, k: int | None = None, j: int = 1) -> Jet:
    """j-fold composition of nabla, the weight increasing by 2 at each step."""
    k = f.weight if k is None else k
    out = Jet(f.base, f.coeffs, k, f.order)
    for _ in range(j):
        out = nabla(out)
    return out


def nabla_chain(f: Jet, k: int, n: int) -> list[Jet]:
    """[f, nabla f, ..., nabla^n f] with f read in weight k."""
    out = [Jet(f.base, f.coeffs, k, f.order)]
    for _ in range(n):
        out.append(nabla(out[-1]))
    return out


def projection_constant(m: int, k: int) -> int:
    """m!(k-m-1)!/(k-2m-1)!, the scalar with eps^m nabla^m g = const·g for g of weight k-2m."""
    if 2 * m >= k:
        raise DomainError(f"overconvergent projection needs 2m < k (m={m}, k={k})")
    return math.factorial(m) * math.factorial(k - m - 1) // math.factorial(k - 2 * m - 1)


def overconvergent_projection(f: Jet, k: int | None = None) -> list[Jet]:
    """The unique g_0..g_m (order 0, weights k-2j) with f = sum_j nabla^j g_j."""
    k = f.weight if k is None else k
    m = f.order
    if 2 * m >= k:
        raise DomainError(f"overconvergent projection needs 2m < k (m={m}, k={k})")
    gs: list[Jet] = [None] * (m + 1)  # type: ignore[list-item]
    rest = Jet(f.base, f.coeffs, k, m)
    for j in range(m, -1, -1):
        e = rest
        for _ in range(j):
            e = epsilon(e)
        c = projection_constant(j, k)
        g = Jet(f.base, tuple(x * Fraction(1, c) for x in e.coeffs[:1]), k - 2 * j, 0)
        gs[j] = g
        rest = rest - nabla_power(g, k - 2 * j, j)
        if rest.degree >= j and not rest.is_zero():
            raise IdentityFailure(f"projection step {j} left a term of degree {rest.degree}")
    if not rest.is_zero():
        raise IdentityFailure("overconvergent projection did not reassemble")
    return gs


def reassemble(gs: Sequence[Jet], k: int) -> Jet:
    acc = None
    for j, g in enumerate(gs):
        term = nabla_power(g, k - 2 * j, j)
        acc = term if acc is None else acc + term
    return acc


def unit_root_projection(f: Jet, frame: bool | None = None) -> Jet:
    """f(X) -> b_0, valid in a frame where u_2 spans the unit-root line."""
    flag = f.base.unit_root_frame if frame is None else frame
    if not flag:
        raise DomainError("unit-root projection needs a jet expressed in the unit-root frame")
    return Jet(f.base, f.coeffs[:1], f.weight, 0)


# ---------------------------------------------------------------------------
# trilinear products


@dataclass(frozen=True)
class TrilinearCoeffs:
    k1: int
    k2: int
    k3: int
    coeffs: tuple[int, ...]

    @property
    def m3(self) -> int:
        return (self.k3 - self.k1 - self.k2) // 2

    @property
    def m(self) -> int:
        return (self.k1 + self.k2 + self.k3) // 2


def check_unbalanced_leg(k1: int, k2: int, k3: int) -> None:
    if k1 < 1 or k2 < 1:
        raise DomainError("k1, k2 must be at least 1")
    if (k1 + k2 + k3) % 2:
        raise DomainError("k1 + k2 + k3 must be even")
    if k3 < k1 + k2:
        raise DomainError("the tau0-leg must satisfy k3 >= k1 + k2")


def trilinear_coeffs(k1: int, k2: int, k3: int) -> TrilinearCoeffs:
    """c_j = (-1)^j C(m3, j) C(m-2, k1+j-1)."""
    check_unbalanced_leg(k1, k2, k3)
    m3 = (k3 - k1 - k2) // 2
    m = (k1 + k2 + k3) // 2
    cs = tuple((-1) ** j * math.comb(m3, j) * math.comb(m - 2, k1 + j - 1) for j in range(m3 + 1))
    return TrilinearCoeffs(k1, k2, k3, cs)


def trilinear_recurrence_residuals(tc: TrilinearCoeffs) -> list[int]:
    """c_{n+1}(n+1)(k1+n) + c_n(m3-n)(k2+m3-n-1) for n = 0..m3-1 (all zero)."""
    c, k1, k2, m3 = tc.coeffs, tc.k1, tc.k2, tc.m3
    return [c[n + 1] * (n + 1) * (k1 + n) + c[n] * (m3 - n) * (k2 + m3 - n - 1) for n in range(m3)]


def trilinear_product(f1: Jet, f2: Jet, k1: int, k2: int, k3: int) -> Jet:
    """sum_j c_j nabla^j f1 · nabla^{m3-j} f2, certified to have no X-terms."""
    tc = trilinear_coeffs(k1, k2, k3)
    m3 = tc.m3
    if f1.order or f2.order:
        raise DomainError("trilinear product takes order-0 jets")
    chain1, chain2 = nabla_chain(f1, k1, m3), nabla_chain(f2, k2, m3)
    acc = None
    for j, cj in enumerate(tc.coeffs):
        term = (chain1[j] * chain2[m3 - j]).scale(cj)
        acc = term if acc is None else acc + term
    if not epsilon(acc).is_zero():
        raise IdentityFailure("trilinear product has a nonzero epsilon-component")
    return Jet(f1.base, acc.coeffs[:1], k3, 0)


# ---------------------------------------------------------------------------
# Delta pairing on classical Sym-duals


@dataclass(frozen=True)
class SymDual:
    """A functional on homogeneous polynomials of degree d, stored by its moments mu(x^{d-j} y^j)."""

    degree: int
    moments: tuple

    @classmethod
    def point_mass(cls, x, y, degree: int) -> "SymDual":
        return cls(degree, tuple(x ** (degree - j) * y**j for j in range(degree + 1)))

    @classmethod
    def from_values(cls, values: Sequence) -> "SymDual":
        return cls(len(values) - 1, tuple(values))

    def __call__(self, j: int):
        return self.moments[j]


def _det_power_terms(m: int):
    """(u·v' - v·u')^m = sum_a C(m,a)(-1)^a (u v')^{m-a} (v u')^a."""
    return [(math.comb(m, a) * (-1) ** a, a) for a in range(m + 1)]


def delta_polynomial_terms(m1: int, m2: int, m3: int) -> dict[tuple[int, int, int], int]:
    """Coefficients of Delta in the monomials y1^j1 y2^j2 y3^j3 (x-degrees are complementary).

    Delta = (x3 y2 - y3 x2)^m1 (x3 y1 - y3 x1)^m2 (x1 y2 - y1 x2)^m3.
    """
    for e in (m1, m2, m3):
        if not isinstance(e, int) or e < 0:
            raise DomainError("delta pairing needs classical non-negative exponents")
    out: dict[tuple[int, int, int], int] = {}
    for c1, a in _det_power_terms(m1):
        # (x3 y2)^{m1-a} (y3 x2)^a
        for c2, b in _det_power_terms(m2):
            # (x3 y1)^{m2-b} (y3 x1)^b
            for c3, c in _det_power_terms(m3):
                # (x1 y2)^{m3-c} (y1 x2)^c
                j1 = (m2 - b) + c
                j2 = (m1 - a) + (m3 - c)
                j3 = a + b
                key = (j1, j2, j3)
                out[key] = out.get(key, 0) + c1 * c2 * c3
    return {k: v for k, v in out.items() if v}


def delta_pairing(mu1, mu2, mu3, m1: int, m2: int, m3: int):
    """Contract Delta against mu1 ⊗ mu2 ⊗ mu3 (degrees m2+m3, m1+m3, m1+m2)."""
    degs = (m2 + m3, m1 + m3, m1 + m2)
    mus = []
    for mu, d in zip((mu1, mu2, mu3), degs):
        if not isinstance(mu, SymDual):
            mu = SymDual.from_values(list(mu))
        if mu.degree != d:
            raise DomainError(f"Sym-dual of degree {mu.degree} where {d} is needed")
        mus.append(mu)
    acc = 0
    for (j1, j2, j3), c in delta_polynomial_terms(m1, m2, m3).items():
        acc = acc + c * mus[0](j1) * mus[1](j2) * mus[2](j3)
    return acc


def delta_pairing_point_masses(points, exponents):
    """Delta at three points, with exponents that are integers or characters.

    Character exponents (single-prime layouts) are evaluated on the three
    determinants with ``char_eval``; the determinants must then be units.
    """
    from .padic import Character, CharValue, char_eval

    (x1, y1), (x2, y2), (x3, y3) = points
    dets = (x3 * y2 - y3 * x2, x3 * y1 - y3 * x1, x1 * y2 - y1 * x2)
    acc = None
    for det, e in zip(dets, exponents):
        if isinstance(e, Character):
            value = char_eval(e, [det])
            if isinstance(value, CharValue):
                value = value.scalar()
        else:
            value = det**e
        acc = value if acc is None else acc * value
    return acc
