"""Weights for G' and G, the map between the two weight spaces, and weight triples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .padic import (
    CLASSICAL,
    DEFAULT_SERIES_DEGREE,
    Character,
    FieldLayout,
    IwasawaSeries,
    PadicScalar,
    vp_factorial,
)


@dataclass(frozen=True)
class WeightG:
    """A weight (r, nu) of G.

    Classical weights store integer exponents ``r`` (one per embedding) and an
    integer ``nu``.  Universal weights store ``r`` and ``nu`` as characters; ``nu``
    is then a character of Z_p^x given by the image of exp(p), an Iwasawa series.
    """

    layout: FieldLayout
    r: tuple[int, ...] | Character
    nu: int | IwasawaSeries
    classical_flag: bool = False

    @classmethod
    def classical(cls, layout: FieldLayout, r: Sequence[int], nu: int, flag: bool = False) -> "WeightG":
        r = tuple(int(x) for x in r)
        if len(r) != layout.d:
            raise DomainError(f"expected {layout.d} exponents")
        # k_tau0 = nu - 2 r_tau0 is congruent to nu mod 2 by construction
        return cls(layout, r, int(nu), flag)

    @property
    def is_classical(self) -> bool:
        return isinstance(self.r, tuple) and isinstance(self.nu, int)


def weight_map_k(w: WeightG) -> Character:
    """The character t -> nu(N(t)) · r(t)^{-2}."""
    layout = w.layout
    if w.is_classical:
        return Character.classical(layout, [w.nu - 2 * x for x in w.r], 0)
    if not isinstance(w.r, Character) or not isinstance(w.nu, IwasawaSeries):
        raise DomainError("universal weights need a character r and a series nu")
    r = w.r
    if r.kind == CLASSICAL:
        raise DomainError("mixed classical/universal weights are not supported")
    nu_img = w.nu
    # nu(N(e_i)) = nu(exp(p))^{beta_i} with log N(e_i) = p·beta_i
    images = []
    for (pi, coeffs), img in zip(r.basis, r.images):
        ring = layout.ring(pi, img.N + vp_factorial(img.D, layout.p) + 2)
        norm_e = ring.element(list(coeffs)).norm()
        beta = norm_e.log().divide_by_p(1)
        rinv2 = img.inverse() ** 2
        images.append(rinv2 * _embed(nu_img, img).binomial_power(beta))
    return Character.universal(layout, images, basis=r.basis)


def _embed(series: IwasawaSeries, like: IwasawaSeries) -> IwasawaSeries:
    """View a series in the (possibly larger) variable set of ``like``."""
    if series.nvars == like.nvars:
        return series
    if series.nvars > like.nvars:
        raise DomainError("cannot embed into fewer variables")
    pad = like.nvars - series.nvars
    coeffs = {mono + (0,) * pad: c for mono, c in series.terms}
    return IwasawaSeries.from_dict(series.p, series.N, like.nvars, like.D, coeffs, series.exact)


def universal_weight(layout: FieldLayout, D: int = DEFAULT_SERIES_DEGREE) -> WeightG:
    """The universal weight (r_n, nu_n): e_i -> 1 + T_i and exp(p) -> 1 + T."""
    d = layout.d
    nvars = d + 1
    p, N = layout.p, layout.N
    imgs = [IwasawaSeries.variable(i, p, N, nvars, D) + 1 for i in range(d)]
    r = Character.universal(layout, imgs)
    nu = IwasawaSeries.variable(d, p, N, nvars, D) + 1
    return WeightG(layout, r, nu)


def nu_eval(nu: IwasawaSeries, x: PadicScalar | int, p: int) -> IwasawaSeries:
    """Evaluate the universal character of Z_p^x (exp(p) -> nu) at a unit x (torsion-free part)."""
    x = PadicScalar.of(x, p, nu.N + 4) if not isinstance(x, PadicScalar) else x
    unit = x * x.teichmuller().inverse()
    gamma = unit.log().divide_by_p(1)
    return nu.binomial_power(gamma)


# ---------------------------------------------------------------------------
# weight triples


@dataclass(frozen=True)
class WeightTriple:
    """Three classical weights k_i in Z[Sigma_F] (tau0 first) with their nu_i."""

    layout: FieldLayout
    k1: tuple[int, ...]
    k2: tuple[int, ...]
    k3: tuple[int, ...]
    nu1: int = 0
    nu2: int = 0
    nu3: int = 0

    @classmethod
    def make(cls, layout: FieldLayout, k1, k2, k3, nu=(0, 0, 0)) -> "WeightTriple":
        def vec(k):
            if isinstance(k, int):
                k = (k,)
            k = tuple(int(x) for x in k)
            if len(k) != layout.d:
                raise DomainError(f"weight vector must have {layout.d} entries")
            return k

        return cls(layout, vec(k1), vec(k2), vec(k3), *[int(x) for x in nu])

    @property
    def ks(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return (self.k1, self.k2, self.k3)

    def swapped(self) -> "WeightTriple":
        return WeightTriple(self.layout, self.k2, self.k1, self.k3, self.nu2, self.nu1, self.nu3)


@dataclass(frozen=True)
class MValues:
    m: tuple[int, ...]
    m3_tau0: int
    m0: int
    m_primes: dict[str, tuple[int, ...]]
    m_i: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


def _check_positive(t: WeightTriple) -> None:
    for k in t.ks:
        if any(x <= 0 for x in k):
            raise DomainError("weights must be positive integers")


def is_unbalanced(t: WeightTriple) -> bool:
    _check_positive(t)
    d = t.layout.d
    for tau in range(d):
        s = t.k1[tau] + t.k2[tau] + t.k3[tau]
        if s % 2:
            return False
        if tau == 0:
            if t.k3[0] < t.k1[0] + t.k2[0]:
                return False
        else:
            if any(2 * k[tau] > s for k in t.ks):
                return False
    return True


def interpolation_point_check(x: WeightTriple) -> bool:
    """Whether a classical triple lies in the interpolation range (unbalanced, positive, nu3 = nu1 + nu2)."""
    if not isinstance(x, WeightTriple):
        raise DomainError("interpolation_point_check needs classical weights")
    if any(v <= 0 for k in x.ks for v in k):
        return False
    if x.nu3 != x.nu1 + x.nu2:
        return False
    return is_unbalanced(x)


def interpolation_point_check_weights(x: WeightG, y: WeightG, z: WeightG) -> bool:
    """Same predicate on three classical weights of G, using k = nu - 2r."""
    for w in (x, y, z):
        if not w.is_classical:
            raise DomainError("interpolation_point_check needs classical weights")
    ks = [tuple(w.nu - 2 * r for r in w.r) for w in (x, y, z)]
    if any(v <= 0 for k in ks for v in k):
        return False
    t = WeightTriple(x.layout, ks[0], ks[1], ks[2], x.nu, y.nu, z.nu)
    return interpolation_point_check(t)


def m_values(t: WeightTriple) -> MValues:
    layout = t.layout
    d = layout.d
    m = []
    for tau in range(d):
        s = t.k1[tau] + t.k2[tau] + t.k3[tau]
        if s % 2:
            raise DomainError(f"odd weight sum at embedding {tau}")
        m.append(s // 2)
    m3_tau0 = t.k3[0] - t.k1[0] - t.k2[0]
    if m3_tau0 % 2:
        raise DomainError("k3 - k1 - k2 must be even at tau0")
    m3_tau0 //= 2
    m_primes = {}
    for i, pr in enumerate(layout.primes):
        sl = layout.embedding_slice(i)
        m_primes[pr.name] = tuple(m[sl])
    m_i = tuple(tuple(m[tau] - k[tau] for tau in range(d)) for k in t.ks)
    return MValues(tuple(m), m3_tau0, m[0], m_primes, m_i)
