"""Spherical test vectors, inner-product recursions, and the Euler factors of the interpolation formula.

Local computations take place in the span of the test vectors v_n, with
V v_n = eps^{-1} v_{n+1}, U v_0 = a v_0 - q^{-1} v_1 and U v_{n+1} = eps v_n.
Everything is computed with generic sympy symbols and specialised at the end,
so the hermitian conjugation can act on the generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import sympy as sp

from .errors import DegenerateError, DomainError
from .weights import WeightTriple, interpolation_point_check, m_values

# generic generators of the local field of scalars
A, E, R, Q = sp.symbols("a epsilon r q")
AL, BE = sp.symbols("alpha beta")


def conj(expr):
    """The hermitian conjugation: alpha -> beta·r/eps, beta -> alpha·r/eps, a -> a·r/eps, eps -> r²/eps.

    ``r`` stands for |eps| and ``q`` are fixed.  The map is an involution and
    satisfies conj(a)·eps/r = a by construction.
    """
    return sp.sympify(expr).subs({AL: BE * R / E, BE: AL * R / E, A: A * R / E, E: R**2 / E}, simultaneous=True)


@dataclass(frozen=True)
class SphericalData:
    """Local data of a spherical representation: a, eps(ϖ), |eps(ϖ)|, q and optionally the roots."""

    a: object = A
    eps: object = E
    abs_eps: object = R
    q: object = Q
    alpha: object | None = None
    beta: object | None = None

    @classmethod
    def from_roots(cls, alpha, beta, q, abs_eps=R) -> "SphericalData":
        alpha, beta, q = sp.sympify(alpha), sp.sympify(beta), sp.sympify(q)
        return cls(alpha + beta, q * alpha * beta, sp.sympify(abs_eps), q, alpha, beta)

    @classmethod
    def symbolic(cls, abs_eps=R) -> "SphericalData":
        return cls.from_roots(AL, BE, Q, abs_eps)

    def __post_init__(self) -> None:
        if self.alpha is not None:
            if sp.simplify(self.alpha + self.beta - self.a) != 0:
                raise DomainError("alpha + beta must equal a")
            if sp.simplify(self.alpha * self.beta * self.q - self.eps) != 0:
                raise DomainError("alpha·beta must equal eps·q^{-1}")

    @property
    def has_roots(self) -> bool:
        return self.alpha is not None

    def substitution(self) -> dict:
        if self.has_roots:
            return {A: AL + BE, E: Q * AL * BE, AL: self.alpha, BE: self.beta, R: self.abs_eps, Q: self.q}
        return {A: self.a, E: self.eps, R: self.abs_eps, Q: self.q}

    def evaluate(self, expr):
        """Specialise a generic expression at this data."""
        expr = sp.sympify(expr)
        if self.has_roots:
            expr = expr.subs({A: AL + BE, E: Q * AL * BE}, simultaneous=True)
            expr = expr.subs({AL: self.alpha, BE: self.beta, R: self.abs_eps, Q: self.q}, simultaneous=True)
        else:
            expr = expr.subs({A: self.a, E: self.eps, R: self.abs_eps, Q: self.q}, simultaneous=True)
        return sp.cancel(expr)


def _rho(n: int):
    """<v_n, v_0> / <v_0, v_0> as a polynomial in a, eps, 1/q."""
    if n < 0:
        raise DomainError("n must be non-negative")
    prev, cur = sp.Integer(1), A / (1 + 1 / Q)
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, sp.expand(A * cur - E * prev / Q)
    return cur


def petersson_generic(n: int, m: int):
    """<v_n, v_m> / <v_0, v_0> in the generic generators.

    For n >= m, <v_n, v_m> = r^m <v_{n-m}, v_0>: the translate diag(1, ϖ^m) has
    determinant ϖ^m and scales the form by |eps(ϖ)|^m.  For n < m we use
    hermitian symmetry.
    """
    if n < 0 or m < 0:
        raise DomainError("indices must be non-negative")
    if n >= m:
        return R**m * _rho(n - m)
    return conj(R**n * _rho(m - n))


def petersson(n: int, m: int, d: SphericalData | None = None):
    """<v_n, v_m> as a multiple of <v_0, v_0>, specialised at ``d``."""
    value = petersson_generic(n, m)
    return value if d is None else d.evaluate(value)


# ---------------------------------------------------------------------------
# test vectors


@dataclass(frozen=True)
class TestVector:
    """A finite combination sum c_n v_n with generic symbolic coefficients."""

    __test__ = False  # not a pytest class

    coeffs: tuple[tuple[int, object], ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[int, object]) -> "TestVector":
        items = []
        for n in sorted(d):
            c = sp.cancel(sp.sympify(d[n]))
            if c != 0:
                items.append((int(n), c))
        return cls(tuple(items))

    @classmethod
    def basis(cls, n: int) -> "TestVector":
        return cls.from_dict({n: 1})

    def as_dict(self) -> dict[int, object]:
        return dict(self.coeffs)

    def __add__(self, other: "TestVector") -> "TestVector":
        acc = self.as_dict()
        for n, c in other.coeffs:
            acc[n] = acc.get(n, 0) + c
        return TestVector.from_dict(acc)

    def __sub__(self, other: "TestVector") -> "TestVector":
        return self + other.scale(-1)

    def scale(self, s) -> "TestVector":
        return TestVector.from_dict({n: s * c for n, c in self.coeffs})

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluated(self, d: SphericalData) -> dict[int, object]:
        return {n: d.evaluate(c) for n, c in self.coeffs}


def apply_V(v: TestVector) -> TestVector:
    """V v_n = eps^{-1} v_{n+1}."""
    return TestVector.from_dict({n + 1: c / E for n, c in v.coeffs})


def apply_U(v: TestVector) -> TestVector:
    """U v_0 = a v_0 - q^{-1} v_1 and U v_{n+1} = eps v_n."""
    acc: dict[int, object] = {}
    for n, c in v.coeffs:
        if n == 0:
            acc[0] = acc.get(0, 0) + A * c
            acc[1] = acc.get(1, 0) - c / Q
        else:
            acc[n - 1] = acc.get(n - 1, 0) + E * c
    return TestVector.from_dict(acc)


def inner(v: TestVector, w: TestVector, d: SphericalData | None = None):
    """Sesquilinear pairing <v, w>, linear in v and conjugate-linear in w."""
    total = sp.Integer(0)
    for n, c in v.coeffs:
        for m, e in w.coeffs:
            total += c * conj(e) * petersson_generic(n, m)
    total = sp.cancel(total)
    return total if d is None else d.evaluate(total)


def stabilize(d: SphericalData | None = None) -> TestVector:
    """v_alpha = (1 - beta V) v_0 = v_0 - beta·eps^{-1} v_1.

    With roots supplied and beta = 0 the V-term carries the factor 0 and the
    result is v_0, even though eps = q·alpha·beta then vanishes.
    """
    if d is not None and d.has_roots and sp.sympify(d.beta) == 0:
        return TestVector.basis(0)
    if d is not None and sp.sympify(d.eps) == 0:
        raise DegenerateError("stabilisation needs eps(ϖ) != 0")
    return TestVector.basis(0) - apply_V(TestVector.basis(0)).scale(BE)


def dual_stabilize(d: SphericalData | None = None) -> TestVector:
    """v*_beta = v_1 - alpha v_0."""
    return TestVector.basis(1) - TestVector.basis(0).scale(AL)


def depletion_vector(v: TestVector) -> TestVector:
    """v^[p] = (1 - VU) v."""
    return v - apply_V(apply_U(v))


def adjoint_matrix_from_gram() -> list[list]:
    """Matrix of U* on span{v_0, v_1} determined by <U v_n, v'> = chi <v_n, U* v'>.

    chi = eps/r.  Columns are the images of v_0 and v_1.  The relations for
    n = 0, 1 pin down the four entries.
    """
    chi = E / R
    unknowns = sp.symbols("u00 u10 u01 u11")
    # U* v_j = u0j v_0 + u1j v_1, coefficients enter conjugated on the right
    eqs = []
    for j in range(2):
        u0, u1 = unknowns[2 * j], unknowns[2 * j + 1]
        for n in range(2):
            lhs = inner(apply_U(TestVector.basis(n)), TestVector.basis(j))
            rhs = chi * (sp.conjugate(u0) * petersson_generic(n, 0) + sp.conjugate(u1) * petersson_generic(n, 1))
            eqs.append(sp.Eq(lhs, rhs))
    conj_syms = sp.symbols("c00 c10 c01 c11")
    eqs = [eq.subs({sp.conjugate(u): c for u, c in zip(unknowns, conj_syms)}) for eq in eqs]
    sol = sp.solve(eqs, conj_syms, dict=True)
    if len(sol) != 1:
        raise DegenerateError("adjoint relations do not determine U* uniquely")
    s = sol[0]
    vals = [conj(sp.cancel(s[c])) for c in conj_syms]
    return [[sp.cancel(vals[0]), sp.cancel(vals[2])], [sp.cancel(vals[1]), sp.cancel(vals[3])]]


def apply_U_star(v: TestVector, matrix: list[list] | None = None) -> TestVector:
    """U* on span{v_0, v_1}: U* v_0 = v_1 and U* v_1 = a v_1 - (eps/q) v_0."""
    mat = matrix or [[0, -E / Q], [1, A]]
    acc: dict[int, object] = {}
    for n, c in v.coeffs:
        if n > 1:
            raise DomainError("U* is modelled on span{v_0, v_1} only")
        acc[0] = acc.get(0, 0) + mat[0][n] * c
        acc[1] = acc.get(1, 0) + mat[1][n] * c
    return TestVector.from_dict(acc)


def stabilized_pairing_closed_form():
    """The displayed closed form of <v_alpha, v*_beta>/<v_0, v_0> in the roots."""
    ab, bb = conj(AL), conj(BE)
    return (bb - ab + ab / Q * (ab / bb - 1)) / (1 + 1 / Q)


# ---------------------------------------------------------------------------
# Euler ratio


def _is_symbolic(*xs) -> bool:
    return any(isinstance(x, sp.Basic) for x in xs)


def _inv(x):
    if isinstance(x, int):
        return Fraction(1, x)
    return 1 / x


def _is_zero(x) -> bool:
    if isinstance(x, sp.Basic):
        return sp.simplify(x) == 0
    return x == 0


def euler_ratio(a1, b1, a2, b2, a3, b3, depleted: bool = False):
    """Closed form of <t(v_alpha1, v_alpha2), v*_beta3> / <v_alpha3, v*_beta3> over <t(v0,v0),v0>/<v0,v0>."""
    if _is_zero(a3 - b3):
        raise DegenerateError("alpha_3 = beta_3: the U-eigenline projection is undefined")
    if _is_zero(a3):
        raise DegenerateError("alpha_3 must be invertible")
    i3 = _inv(a3)
    num = (1 - b1 * a2 * i3) * (1 - a1 * b2 * i3) * (1 - b1 * b2 * i3)
    den_factors = {
        "1 - alpha1·beta1·alpha2·beta2/alpha3^2": 1 - a1 * b1 * a2 * b2 * i3 * i3,
        "1 - beta3/alpha3": 1 - b3 * i3,
    }
    for name, f in den_factors.items():
        if _is_zero(f):
            raise DegenerateError(f"pole: the factor ({name}) vanishes")
    value = num / (den_factors["1 - alpha1·beta1·alpha2·beta2/alpha3^2"] * den_factors["1 - beta3/alpha3"])
    if depleted:
        value = value * (1 - a1 * a2 * i3)
    if _is_symbolic(value):
        value = sp.cancel(value)
    return value


def euler_ratio_symbols():
    return sp.symbols("alpha1 beta1 alpha2 beta2 alpha3 beta3")


def trilinear_relations(a1, b1, a2, b2, a3, b3, q, nmax: int = 2, mmax: int = 1):
    """Unknowns L[n, m] = <t(v_n, v_m), v*_beta3> and the relations they satisfy.

    With V v = eps^{-1} v_{+1}:
      L(Vv, Vv') = alpha3^{-1} L(v, v')
      L(v, Vv')  = alpha3^{-1} L(Uv, v')
      L(Vv, v')  = alpha3^{-1} L(v, Uv')
    plus the normalisation L[0, 0] = 1.
    """
    e1, e2 = q * a1 * b1, q * a2 * b2
    s1, s2 = a1 + b1, a2 + b2
    L = {(n, m): sp.Symbol(f"L_{n}_{m}") for n in range(nmax + 1) for m in range(mmax + 1)}

    def u_image(n, s, e):
        # U v_n as {index: coefficient}
        return {0: s, 1: -1 / q} if n == 0 else {n - 1: e}

    eqs = [sp.Eq(L[0, 0], 1)]
    for n in range(nmax + 1):
        for m in range(mmax + 1):
            if (n + 1, m + 1) in L:
                eqs.append(sp.Eq(L[n + 1, m + 1] / (e1 * e2), L[n, m] / a3))
            img = u_image(n, s1, e1)
            if (n, m + 1) in L and all((k, m) in L for k in img):
                eqs.append(sp.Eq(L[n, m + 1] / e2, sum(c * L[k, m] for k, c in img.items()) / a3))
            img = u_image(m, s2, e2)
            if (n + 1, m) in L and all((n, k) in L for k in img):
                eqs.append(sp.Eq(L[n + 1, m] / e1, sum(c * L[n, k] for k, c in img.items()) / a3))
    return L, eqs


def euler_ratio_oracle(depleted: bool = False):
    """Solve the trilinear relations from scratch and normalise by the stabilised pairing.

    Returns a rational function in alpha1..beta3 (q and |eps_3| cancel out).
    """
    a1, b1, a2, b2, a3, b3 = euler_ratio_symbols()
    q = Q
    L, eqs = trilinear_relations(a1, b1, a2, b2, a3, b3, q)
    sol = sp.solve(eqs, list(L.values()), dict=True)
    if len(sol) != 1:
        raise DegenerateError("trilinear relations are not uniquely solvable")
    Ls = {k: sp.cancel(v.subs(sol[0])) for k, v in L.items()}
    e1, e2 = q * a1 * b1, q * a2 * b2

    def stab(a, b, e):
        return {0: sp.Integer(1), 1: -b / e}

    v1 = stab(a1, b1, e1)
    if depleted:
        # (1 - VU) v_alpha1 = v_alpha1 - alpha1 V v_alpha1
        v1 = dict(v1)
        for n, c in list(stab(a1, b1, e1).items()):
            v1[n + 1] = v1.get(n + 1, 0) - a1 * c / e1
    v2 = stab(a2, b2, e2)
    value = sum(c * d * Ls[n, m] for n, c in v1.items() for m, d in v2.items())
    # L[0,0] = <t(v0,v0), v*_beta3> = (conj(<v1,v0>) - conj(alpha3)) <t(v0,v0), v0>
    third = {AL: a3, BE: b3}
    to_third = lambda x: x.subs({A: AL + BE, E: Q * AL * BE}, simultaneous=True).subs(third, simultaneous=True)
    l00 = to_third(conj(_rho(1)) - conj(AL))
    pair = to_third(inner(stabilize(), dual_stabilize()))
    return sp.cancel(value * l00 / pair)


# ---------------------------------------------------------------------------
# Euler factors of the interpolation formula


@dataclass(frozen=True)
class HeckeEigenData:
    """Per-prime pairs (alpha, beta) for the labels x, y, z, in arithmetic normalisation."""

    pairs: Mapping[str, Mapping[str, tuple]] = field(default_factory=dict)

    def get(self, prime: str, label: str) -> tuple:
        if prime not in self.pairs:
            raise DomainError(f"missing eigen-data for prime {prime!r}")
        block = self.pairs[prime]
        if label not in block:
            raise DomainError(f"missing eigenvalues {prime}.{label}")
        pair = block[label]
        if len(pair) != 2 or any(x is None for x in pair):
            raise DomainError(f"incomplete eigenvalues {prime}.{label}")
        return pair


def _power(p: int, e: int, symbolic: bool):
    if symbolic:
        return sp.Integer(p) ** e
    return Fraction(p) ** e


def _prime_exponents(t: WeightTriple, prime_index: int) -> tuple[int, int]:
    """(sum over Sigma_P of (m_tau + 2), sum over Sigma_P of k3_tau)."""
    mv = m_values(t)
    sl = t.layout.embedding_slice(prime_index)
    ms = mv.m[sl]
    k3 = t.k3[sl]
    return sum(m + 2 for m in ms), sum(k3)


def euler_factor_Ep(t: WeightTriple, e: HeckeEigenData, prime: str):
    """The four-factor product E_P(x, y, z) at one prime above p."""
    factors = euler_factor_Ep_factors(t, e, prime)
    value = 1
    for f in factors:
        value = value * f
    return sp.expand(value) if isinstance(value, sp.Basic) else value


def euler_factor_Ep_factors(t: WeightTriple, e: HeckeEigenData, prime: str) -> list:
    """The individual linear factors of E_P, in display order."""
    layout = t.layout
    idx = layout.prime_index(prime)
    ax, bx = e.get(prime, "x")
    ay, by = e.get(prime, "y")
    az, bz = e.get(prime, "z")
    sym = _is_symbolic(ax, bx, ay, by, az, bz)
    p = layout.p
    if idx == 0:
        s = _power(p, 1 - m_values(t).m0, sym)
        terms = [ax * ay * bz, ax * by * bz, bx * ay * bz, bx * by * bz]
    else:
        s = _power(p, -_prime_exponents(t, idx)[0], sym)
        terms = [bx * by * az, ax * by * bz, bx * ay * bz, bx * by * bz]
    return [1 - term * s for term in terms]


def euler_factor_Ep1(t: WeightTriple, e: HeckeEigenData, prime: str):
    """The two-factor product E_{P,1}(z)."""
    layout = t.layout
    idx = layout.prime_index(prime)
    _, bz = e.get(prime, "z")
    sym = _is_symbolic(bz)
    p = layout.p
    if idx == 0:
        k3 = t.k3[0]
        f1, f2 = 1 - bz**2 * _power(p, -k3, sym), 1 - bz**2 * _power(p, 1 - k3, sym)
    else:
        sl = layout.embedding_slice(idx)
        k3s = t.k3[sl]
        f1 = 1 - bz**2 * _power(p, -sum(k + 2 for k in k3s), sym)
        f2 = 1 - bz**2 * _power(p, -sum(k + 1 for k in k3s), sym)
    value = f1 * f2
    return sp.expand(value) if sym else value


def interpolation_factor(t: WeightTriple, e: HeckeEigenData):
    """prod over the primes above p of E_P / E_{P,1}."""
    if not interpolation_point_check(t):
        raise DomainError("not an interpolation point")
    total = 1
    for pr in t.layout.primes:
        den = euler_factor_Ep1(t, e, pr.name)
        if _is_zero(den):
            raise DegenerateError(f"exceptional zero: E_{{{pr.name},1}} vanishes")
        num = euler_factor_Ep(t, e, pr.name)
        total = total * num / den if not isinstance(den, int) else total * num * Fraction(1, den)
    return sp.cancel(total) if isinstance(total, sp.Basic) else total


def archimedean_factor(t: WeightTriple, nu3: int | None = None) -> Fraction:
    """(-1)^{nu3} / 2^{4 - 2 m3} · C(k3 - 2, k2 + m3 - 1)^2 at tau0."""
    k1, k2, k3 = t.k1[0], t.k2[0], t.k3[0]
    if k3 < k1 + k2 or (k1 + k2 + k3) % 2:
        raise DomainError("archimedean factor needs an unbalanced tau0-leg")
    nu3 = t.nu3 if nu3 is None else nu3
    m3 = (k3 - k1 - k2) // 2
    sign = -1 if nu3 % 2 else 1
    return sign * Fraction(2) ** (2 * m3 - 4) * math.comb(k3 - 2, k2 + m3 - 1) ** 2


def to_arithmetic(alpha_unitary, k: tuple[int, ...] | int, nu: int, p: int, at_p0: bool):
    """Rescale a unitary U-eigenvalue to the family normalisation.

    Away from p0 the factor is ϖ^{((nu+2)·1 + k_P)/2}, read as p to the sum
    over the embeddings of P; at p0 it is p^{(nu + k)/2}.
    """
    ks = (k,) if isinstance(k, int) else tuple(k)
    if at_p0:
        twice = nu + ks[0]
    else:
        twice = sum(nu + 2 + x for x in ks)
    if twice % 2 == 0 and not isinstance(alpha_unitary, sp.Basic):
        return alpha_unitary * Fraction(p) ** (twice // 2)
    return sp.sympify(alpha_unitary) * sp.Integer(p) ** sp.Rational(twice, 2)
