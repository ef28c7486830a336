"""The interpolation pipeline on synthetic eigen-data, the eigenline coefficient and interpolation reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy as sp

from . import hecke_euler as he
from .errors import DegenerateError, DomainError
from .jets import Jet, nabla_power, overconvergent_projection, trilinear_coeffs, unit_root_projection
from .serre_tate import QExpansion, depletion, e_ord_qexp, theta_power_interpolate
from .weights import WeightTriple, interpolation_point_check, m_values


@dataclass(frozen=True)
class SyntheticFamily:
    """A q-expansion with local spherical data whose U-eigenline is v_alpha."""

    label: str
    qexp: QExpansion
    local: he.SphericalData | None = None

    @classmethod
    def zero(cls, p: int, label: str = "x") -> "SyntheticFamily":
        return cls(label, QExpansion.zero(p))

    @property
    def eigenvalue(self):
        if self.local is None or not self.local.has_roots:
            raise DomainError(f"family {self.label} carries no local eigen-data")
        return self.local.alpha

    def eigenline(self) -> he.TestVector:
        return he.stabilize()

    def check(self) -> bool:
        """U acts on the declared eigenline by the declared eigenvalue."""
        v = self.eigenline()
        diff = he.apply_U(v) - v.scale(he.AL)
        return all(self.local.evaluate(c) == 0 for c in diff.as_dict().values())


def pipeline_eval(
    f1: SyntheticFamily,
    f2: SyntheticFamily,
    t: WeightTriple,
    delta_exponents: Sequence[int] = (0, 0, 0),
    points: Sequence[tuple[int, int]] = ((1, 0), (0, 1), (1, 1)),
) -> QExpansion:
    """e_ord( Theta^{m3}(f1^[p]) · f2 · Delta ) at a classical point.

    Delta is evaluated on point masses at ``points`` with the given exponents,
    so the default exponents make it the constant 1.
    """
    from .jets import delta_pairing_point_masses

    m3 = m_values(t).m3_tau0
    if m3 < 0:
        raise DomainError("the pipeline needs m3 >= 0 at tau0")
    g = depletion(f1.qexp)
    g = theta_power_interpolate(g, m3)
    h = g * f2.qexp
    delta = delta_pairing_point_masses(points, tuple(delta_exponents))
    return e_ord_qexp(h.scale(delta))


def depletion_factor_trace():
    """Symbolic ratio of the depleted to the undepleted local trilinear form: 1 - alpha1·alpha2/alpha3."""
    return sp.factor(sp.cancel(he.euler_ratio_oracle(True) / he.euler_ratio_oracle(False)))


def eigenline_coefficient(v: he.TestVector, f3: SyntheticFamily):
    """<v, v*_beta> / <v_alpha, v*_beta> evaluated at f3's local data."""
    d = f3.local
    if d is None or not d.has_roots:
        raise DomainError("eigenline coefficient needs local roots")
    if sp.simplify(d.alpha - d.beta) == 0:
        raise DegenerateError("alpha = beta: the U-eigenline projection is undefined")
    dual = he.dual_stabilize()
    num = he.inner(v, dual, d)
    den = he.inner(he.stabilize(), dual, d)
    if den == 0:
        raise DegenerateError("<v_alpha, v*_beta> vanishes")
    return sp.cancel(num / den)


def beta_eigenvector() -> he.TestVector:
    """v_0 - alpha·eps^{-1} v_1, the U-eigenvector with eigenvalue beta."""
    return he.TestVector.basis(0) - he.TestVector.basis(1).scale(he.AL / he.E)


# ---------------------------------------------------------------------------
# identities of the interpolation argument


def delta_correction_factor(ax, bx, ay, by, az, p, k1: int, k2: int, k3: int):
    """1 - p^{m3}·alpha_z/(alpha_x·alpha_y): the correction from the dual U-operator at a prime P != p0.

    Returns (value, displayed) where displayed is 1 - beta_x·beta_y·alpha_z·p^{-m-2};
    the two agree once alpha_x·beta_x = p^{k1+1} and alpha_y·beta_y = p^{k2+1}.
    """
    if (k1 + k2 + k3) % 2:
        raise DomainError("odd weight sum")
    m = (k1 + k2 + k3) // 2
    m3 = m - k3
    value = 1 - sp.Integer(p) ** m3 * az / (ax * ay)
    displayed = 1 - bx * by * az * sp.Integer(p) ** (-m - 2)
    return value, displayed


def delta_correction_identity(k1: int, k2: int, k3: int, p=None) -> bool:
    """Symbolic check of the correction factor under the eigenvalue normalisations."""
    ax, ay, az = sp.symbols("alpha_x alpha_y alpha_z")
    pp = sp.Symbol("varpi", positive=True) if p is None else sp.Integer(p)
    bx = pp ** (k1 + 1) / ax
    by = pp ** (k2 + 1) / ay
    m = (k1 + k2 + k3) // 2
    value = 1 - pp ** (m - k3) * az / (ax * ay)
    displayed = 1 - bx * by * az * pp ** (-m - 2)
    return sp.simplify(value - displayed) == 0


def ordinary_projection_pair(f: Jet, k: int) -> tuple[QExpansion, QExpansion]:
    """(e_ord(gamma(f)), e_ord(H^r(f))) for a jet over the q-expansion base."""
    gamma_f = unit_root_projection(f)
    gs = overconvergent_projection(f, k)
    return e_ord_qexp(gamma_f.coefficient(0)), e_ord_qexp(gs[0].coefficient(0))


def rearrangement_coefficients(k1: int, k2: int, k3: int) -> tuple[Fraction, list[Fraction]]:
    """The constant (-1)^{m3}·C^{-1} and the a_i with C = C(k3-2, m3+k2-1).

    a_i = (-1)^{i+m3+1} C^{-1} sum_{j <= i} C(m3, j) C(m-2, k1+j-1).
    """
    tc = trilinear_coeffs(k1, k2, k3)
    m3, m = tc.m3, tc.m
    C = math.comb(k3 - 2, m3 + k2 - 1)
    const = Fraction((-1) ** m3, C)
    a = []
    partial = 0
    for i in range(m3):
        partial += math.comb(m3, i) * math.comb(m - 2, k1 + i - 1)
        a.append(Fraction((-1) ** (i + m3 + 1) * partial, C))
    return const, a


def rearrangement_residual(f1: Jet, f2: Jet, k1: int, k2: int, k3: int) -> Jet:
    """(nabla^{m3} f1)·f2 - const·t(f1, f2) - nabla(sum_i a_i nabla^i f1 · nabla^{m3-1-i} f2).

    Both sides are expanded as jets; the residual is zero exactly.
    """
    const, a = rearrangement_coefficients(k1, k2, k3)
    m3 = (k3 - k1 - k2) // 2
    lhs = nabla_power(f1, k1, m3) * f2
    t = _trilinear_full(f1, f2, k1, k2, m3)
    rhs = t.scale(const)
    if m3:
        acc = None
        for i, ai in enumerate(a):
            term = (nabla_power(f1, k1, i) * nabla_power(f2, k2, m3 - 1 - i)).scale(ai)
            acc = term if acc is None else acc + term
        rhs = rhs + nabla_power(acc, k1 + k2 + 2 * (m3 - 1), 1)
    return lhs - rhs


def _trilinear_full(f1: Jet, f2: Jet, k1: int, k2: int, m3: int) -> Jet:
    """sum_j c_j nabla^j f1 · nabla^{m3-j} f2 as a jet, without the order-0 check."""
    tc = trilinear_coeffs(k1, k2, k1 + k2 + 2 * m3)
    acc = None
    for j, c in enumerate(tc.coeffs):
        term = (nabla_power(f1, k1, j) * nabla_power(f2, k2, m3 - j)).scale(c)
        acc = term if acc is None else acc + term
    return acc


def rearrangement_formal_residuals(k1: int, k2: int, k3: int) -> list[Fraction]:
    """Coefficient-wise check in the basis nabla^j f1 · nabla^{m3-j} f2 (Leibniz for nabla)."""
    const, a = rearrangement_coefficients(k1, k2, k3)
    tc = trilinear_coeffs(k1, k2, k3)
    m3 = tc.m3
    out = []
    for j in range(m3 + 1):
        lhs = 1 if j == m3 else 0
        rhs = const * tc.coeffs[j]
        if j - 1 >= 0:
            rhs += a[j - 1]
        if j < m3:
            rhs += a[j]
        out.append(Fraction(lhs) - rhs)
    return out


# ---------------------------------------------------------------------------
# reports


@dataclass
class LValueReport:
    weights: WeightTriple
    E: dict[str, object] = field(default_factory=dict)
    E1: dict[str, object] = field(default_factory=dict)
    archimedean: Fraction | None = None
    combined: object | None = None
    flags: list[str] = field(default_factory=list)
    excluded: tuple[str, ...] = ("constant K", "central L-value")

    def rows(self) -> list[tuple[str, str]]:
        out = []
        for name in self.E:
            out.append((f"E[{name}]", str(self.E[name])))
            out.append((f"E1[{name}]", str(self.E1[name])))
        out.append(("archimedean", str(self.archimedean)))
        out.append(("combined", str(self.combined)))
        out.append(("flags", ",".join(self.flags) or "none"))
        return out


def report(t: WeightTriple, e: he.HeckeEigenData) -> LValueReport:
    """Every computable quantity of the interpolation formula at a classical point."""
    if not interpolation_point_check(t):
        raise DomainError("not an interpolation point")
    rep = LValueReport(t)
    combined = 1
    for pr in t.layout.primes:
        num = he.euler_factor_Ep(t, e, pr.name)
        den = he.euler_factor_Ep1(t, e, pr.name)
        rep.E[pr.name] = num
        rep.E1[pr.name] = den
        if he._is_zero(den):
            rep.flags.append(f"exceptional-zero:{pr.name}")
            combined = None
        elif combined is not None:
            combined = combined * num * (Fraction(1, den) if isinstance(den, int) else 1 / den)
    if isinstance(combined, sp.Basic):
        combined = sp.cancel(combined)
    rep.combined = combined
    rep.archimedean = he.archimedean_factor(t)
    return rep
