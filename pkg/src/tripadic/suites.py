"""Named invariant suites, one per module, run by ``tripadic verify``."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import sympy as sp

from . import distributions as dist
from . import hecke_euler as he
from . import jets, lfunction, linalg, oracles, serre_tate, spectral, weights
from .errors import DomainError, TripadicError
from .padic import Character, FieldLayout, IwasawaSeries, PadicScalar, PrimeSpec, char_eval, padic_exp, padic_log

Check = tuple[str, Callable[[], bool]]


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    seconds: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{status}  {self.suite}:{self.name}  [{self.seconds:.2f}s]{extra}"


# ---------------------------------------------------------------------------
# random data


def random_poly(rng: random.Random, degree: int = 3, bound: int = 5) -> jets.Poly:
    return jets.Poly(tuple(rng.randint(-bound, bound) for _ in range(rng.randint(0, degree) + 1)))


def random_poly_base(rng: random.Random) -> jets.BaseRing:
    return jets.poly_base(random_poly(rng, 2, 3), random_poly(rng, 2, 3))


def random_jet(rng: random.Random, base: jets.BaseRing, weight: int, order: int = 0) -> jets.Jet:
    return jets.Jet(base, tuple(random_poly(rng) for _ in range(order + 1)), weight, order)


def random_qexp(rng: random.Random, p: int, size: int = 6, top: int = 60, stable: bool = False) -> serre_tate.QExpansion:
    coeffs = {}
    for _ in range(size):
        a = rng.randint(0, top)
        if stable and a % p == 0:
            a += 1
        coeffs[a] = rng.randint(-9, 9)
    return serre_tate.QExpansion.from_dict(p, coeffs)


# ---------------------------------------------------------------------------
# suites


def _padic_checks(rng: random.Random) -> Iterator[Check]:
    p, N = 5, 4

    def log_exp() -> bool:
        one = PadicScalar(p, N, 1)
        x = PadicScalar(p, N, 1 + p)
        ok = padic_log(one).value == 0
        ok &= padic_exp(padic_log(x)) == x
        ok &= padic_log(x * x) == padic_log(x) * 2
        return ok

    def ring_axioms() -> bool:
        for _ in range(200):
            a, b, c = (PadicScalar(7, 12, rng.randrange(7**12)) for _ in range(3))
            if (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c:
                return False
        return True

    def exp_log_inverse() -> bool:
        for _ in range(50):
            x = PadicScalar(7, 12, 1 + 7 * rng.randrange(7**11))
            if padic_exp(padic_log(x)) != x:
                return False
        return True

    def char_classical() -> bool:
        layout = FieldLayout(5, (PrimeSpec("p0"),), 4)
        chi = Character.classical(layout, [2])
        return char_eval(chi, [3]).scalar() == PadicScalar(5, 4, 9)

    def char_multiplicative() -> bool:
        layout = FieldLayout(7, (PrimeSpec("p0"),), 10)
        chi = Character.classical(layout, [3], 1)
        for _ in range(200):
            s, t = (rng.choice([x for x in range(1, 7**3) if x % 7]) for _ in range(2))
            if char_eval(chi, [s * t]) != char_eval(chi, [s]) * char_eval(chi, [t]):
                return False
        return True

    def char_universal() -> bool:
        layout = FieldLayout(5, (PrimeSpec("p0"),), 6)
        chi = Character.universal_standard(layout, D=4)
        value = char_eval(chi, [1 + 5])
        return value == IwasawaSeries.variable(0, 5, value.N, 1, 4) + 1

    yield "log-exp basics", log_exp
    yield "ring axioms", ring_axioms
    yield "exp-log inverse", exp_log_inverse
    yield "classical character", char_classical
    yield "character multiplicative", char_multiplicative
    yield "universal character at 1+p", char_universal


def _weights_checks(rng: random.Random) -> Iterator[Check]:
    L1 = FieldLayout(3)
    L2 = FieldLayout(3, (PrimeSpec("p0"), PrimeSpec("p1")))

    def unbalanced_examples() -> bool:
        ok = weights.is_unbalanced(weights.WeightTriple.make(L1, 2, 2, 6))
        ok &= not weights.is_unbalanced(weights.WeightTriple.make(L1, 2, 2, 3))
        ok &= weights.is_unbalanced(weights.WeightTriple.make(L2, (2, 4), (2, 2), (6, 2)))
        return ok

    def swap_invariance() -> bool:
        for _ in range(100):
            ks = [tuple(rng.randint(1, 8) for _ in range(2)) for _ in range(3)]
            t = weights.WeightTriple.make(L2, *ks)
            if weights.is_unbalanced(t) != weights.is_unbalanced(t.swapped()):
                return False
        return True

    def m_value_examples() -> bool:
        mv = weights.m_values(weights.WeightTriple.make(L1, 2, 2, 6))
        ok = mv.m0 == 5 and mv.m3_tau0 == 1
        mv = weights.m_values(weights.WeightTriple.make(L1, 1, 1, 2))
        ok &= mv.m == (2,) and mv.m3_tau0 == 0
        mv = weights.m_values(weights.WeightTriple.make(L2, (2, 2), (2, 2), (6, 2)))
        ok &= mv.m[1] == 3 and all(m[1] == 1 for m in mv.m_i)
        return ok

    def weight_map_grid() -> bool:
        for _ in range(100):
            r = [rng.randint(-5, 5) for _ in range(2)]
            nu = rng.randint(-5, 5)
            k = weights.weight_map_k(weights.WeightG.classical(L2, r, nu))
            if k.exponents != tuple(nu - 2 * x for x in r):
                return False
        return True

    yield "is_unbalanced examples", unbalanced_examples
    yield "k1<->k2 swap invariance", swap_invariance
    yield "m-values", m_value_examples
    yield "weight map exponents", weight_map_grid


def _distribution_checks(rng: random.Random) -> Iterator[Check]:
    p = 3

    def coset_rule() -> bool:
        S = dist.TruncatedSpace(p, 2, 2, 3)
        for r in range(S.discs):
            for i in range(p):
                img = dist.g_bar_action(i, dist.LocallyAnalyticFunction.basis(S, r, 2))
                if (r - i) % p:
                    if not img.is_zero():
                        return False
                else:
                    low = dist.LocallyAnalyticFunction.basis(S.with_level(1), (r - i) // p % p, 2)
                    if img != dist.re_expand(low, 2):
                        return False
        return True

    def compactness() -> bool:
        for m in (1, 2):
            S = dist.TruncatedSpace(p, 2, m, 3)
            T = dist.up_function_matrix(S)
            Sm, E = dist.compactness_factorisation(S)
            if linalg.matmul(E, Sm) != T:
                return False
        return True

    def classical_equivariance() -> bool:
        for k in (0, 1, 2, 3):
            S = dist.TruncatedSpace(p, k, 1, k + 2)
            C = linalg.transpose(oracles.classical_up_sym(k, p))
            for _ in range(5):
                mu = dist.Distribution(S, tuple(rng.randint(-9, 9) for _ in range(S.dim)))
                lhs = dist.classical_projection(dist.up_operator(mu))
                if lhs != linalg.matvec(C, dist.classical_projection(mu)):
                    return False
        return True

    def bgg_intertwining() -> bool:
        for k in (0, 1, 2, 3):
            S = dist.TruncatedSpace(p, k, 1, k + 3)
            U = dist.up_matrix(S).rows()
            Um = dist.up_matrix(S.with_weight(-1, S.D - k - 1)).rows()
            Th = dist.bgg_dual_matrix(S)
            if linalg.scale(linalg.matmul(Th, Um), p ** (k + 1)) != linalg.matmul(U, Th):
                return False
        return True

    def pairing_adjoint() -> bool:
        for k in (0, 1, 2, 3):
            S = dist.TruncatedSpace(p, k, 1, k + 1)
            for _ in range(5):
                mu1 = dist.Distribution(S, tuple(rng.randint(-9, 9) for _ in range(S.dim)))
                mu2 = dist.DualDistribution(p, k, tuple(rng.randint(-9, 9) for _ in range(k + 1)))
                if dist.pair_dual(dist.up_operator(mu1), mu2) != dist.pair_dual(mu1, dist.dual_up(mu2)):
                    return False
                if dist.dual_up(mu2) != dist.dual_up_coset(mu2):
                    return False
        return True

    def e_ord_examples() -> bool:
        E = dist.e_ord(dist.HeckeMatrix.of([[1, 0], [0, p]], p, 10))
        ok = E == dist.HeckeMatrix.of([[1, 0], [0, 0]], p, 10)
        ok &= dist.e_ord(dist.HeckeMatrix.of([[0, 0], [0, 0]], p, 10)).entries == ((0, 0), (0, 0))
        return ok

    yield "coset rule for ḡ_i", coset_rule
    yield "compactness factorisation", compactness
    yield "classical projection equivariance", classical_equivariance
    yield "BGG intertwining", bgg_intertwining
    yield "dual pairing adjoint", pairing_adjoint
    yield "e_ord examples", e_ord_examples


def _serre_tate_checks(rng: random.Random) -> Iterator[Check]:
    p = 3
    U, V, Th, dep = serre_tate.u_p0, serre_tate.v_p0, serre_tate.theta, serre_tate.depletion

    def operators() -> bool:
        for _ in range(500):
            f = random_qexp(rng, p)
            if U(V(f)) != f or U(Th(f)) != Th(U(f)).scale(p):
                return False
            proj = serre_tate.QExpansion.from_dict(p, {a: c for a, c in f.terms if a % p == 0})
            if V(U(f)) != proj:
                return False
            d = dep(f)
            if dep(d) != d or U(d).terms or d + proj != f:
                return False
        return True

    def theta_powers() -> bool:
        for _ in range(20):
            f = random_qexp(rng, p, stable=True)
            for k in range(6):
                g = f
                for _ in range(k):
                    g = Th(g)
                if serre_tate.theta_power_interpolate(f, k) != g:
                    return False
        return True

    yield "U, V, Theta, depletion", operators
    yield "Theta-power specialisation k=0..5", theta_powers


def _nearly_checks(rng: random.Random) -> Iterator[Check]:
    def eps_gm() -> bool:
        for _ in range(20):
            base = random_poly_base(rng)
            for k in range(1, 13):
                f = random_jet(rng, base, k)
                chain = [f]
                for _ in range(5):
                    chain.append(jets.nabla(chain[-1]))
                for j in range(1, 6):
                    if jets.epsilon(chain[j]) != chain[j - 1].scale(j * (k + j - 1)):
                        return False
        return True

    def commutator() -> bool:
        for _ in range(30):
            base = random_poly_base(rng)
            k, m = rng.randint(1, 10), rng.randint(0, 3)
            f = random_jet(rng, base, k, m)
            lhs = jets.epsilon(jets.nabla(f)) - jets.nabla(jets.epsilon(f), k - 2)
            if lhs != jets.Jet(base, f.coeffs, k, m + 1).scale(k):
                return False
        return True

    def projection() -> bool:
        for _ in range(40):
            base = random_poly_base(rng)
            k = rng.randint(2, 10)
            m = rng.randint(0, (k - 1) // 2)
            f = random_jet(rng, base, k, m)
            gs = jets.overconvergent_projection(f, k)
            if jets.reassemble(gs, k) != jets.Jet(base, f.coeffs, k, m):
                return False
        return True

    def trilinear() -> bool:
        for k1 in range(1, 5):
            for k2 in range(1, 5):
                for m3 in range(4):
                    k3 = k1 + k2 + 2 * m3
                    tc = jets.trilinear_coeffs(k1, k2, k3)
                    if any(jets.trilinear_recurrence_residuals(tc)):
                        return False
                    lhs, rhs = oracles.vandermonde_sum(k1, k2, k3)
                    if lhs != rhs:
                        return False
                    base = random_poly_base(rng)
                    jets.trilinear_product(random_jet(rng, base, k1), random_jet(rng, base, k2), k1, k2, k3)
        return True

    def delta() -> bool:
        pts = ((1, 0), (0, 1), (2, 3))
        for ex in ((0, 0, 0), (0, 0, 1), (1, 1, 1), (2, 1, 0)):
            degs = (ex[1] + ex[2], ex[0] + ex[2], ex[0] + ex[1])
            mus = [jets.SymDual.point_mass(x, y, d) for (x, y), d in zip(pts, degs)]
            if jets.delta_pairing(*mus, *ex) != oracles.delta_brute_force(pts, ex):
                return False
        return True

    yield "epsilon-nabla^j identity", eps_gm
    yield "epsilon/nabla commutator", commutator
    yield "overconvergent projection reassembly", projection
    yield "trilinear kernel and Vandermonde", trilinear
    yield "Delta contraction vs expansion", delta


def _euler_checks(rng: random.Random) -> Iterator[Check]:
    def oracle_equivalence() -> bool:
        a1, b1, a2, b2, a3, b3 = he.euler_ratio_symbols()
        for depleted in (False, True):
            closed = he.euler_ratio(a1, b1, a2, b2, a3, b3, depleted)
            if sp.cancel(closed - he.euler_ratio_oracle(depleted)) != 0:
                return False
        return True

    def petersson_closed_form() -> bool:
        d = he.SphericalData.symbolic()
        return d.evaluate(he.inner(he.stabilize(), he.dual_stabilize()) - he.stabilized_pairing_closed_form()) == 0

    def eigenvectors() -> bool:
        d = he.SphericalData.symbolic()
        v = he.stabilize()
        w = he.dual_stabilize()
        ok = all(d.evaluate(c) == 0 for c in (he.apply_U(v) - v.scale(he.AL)).as_dict().values())
        ok &= all(d.evaluate(c) == 0 for c in (he.apply_U_star(w) - w.scale(he.BE)).as_dict().values())
        return ok

    def petersson_value() -> bool:
        d = he.SphericalData(2, 1, 1, 3)
        return he.petersson(1, 0, d) == sp.Rational(3, 2)

    def sample_row() -> bool:
        L = FieldLayout(3)
        t = weights.WeightTriple.make(L, 2, 2, 6)
        e = he.HeckeEigenData({"p0": {"x": (1, 3), "y": (1, 3), "z": (1, 243)}})
        return (
            he.euler_factor_Ep(t, e, "p0") == 3328
            and he.euler_factor_Ep1(t, e, "p0") == 19360
            and he.interpolation_factor(t, e) == Fraction(104, 605)
        )

    yield "Euler ratio vs linear-system oracle", oracle_equivalence
    yield "<v_alpha, v*_beta> closed form", petersson_closed_form
    yield "U and U* eigenvectors", eigenvectors
    yield "petersson(1,0) at a=2, q=3", petersson_value
    yield "sample (2,2,6) Euler row", sample_row


def _spectral_checks(rng: random.Random) -> Iterator[Check]:
    p, N = 3, 12

    def traces() -> bool:
        for _ in range(10):
            a = [[rng.randrange(p**N) for _ in range(6)] for _ in range(6)]
            U = dist.HeckeMatrix.of(a, p, N)
            if spectral.char_series(U) != spectral.CharSeries.make(oracles.exterior_power_traces(a), p, N):
                return False
        return True

    def diagonal_slopes() -> bool:
        for _ in range(20):
            vals = sorted(rng.randint(0, 4) for _ in range(5))
            diag = [p**v * rng.choice([1, 2, 4, 5]) for v in vals]
            U = dist.HeckeMatrix.of([[diag[i] if i == j else 0 for j in range(5)] for i in range(5)], p)
            if spectral.newton_polygon(spectral.char_series(U)).slopes != [Fraction(v) for v in vals]:
                return False
        return True

    def projector_vs_e_ord() -> bool:
        for _ in range(10):
            diag = [rng.choice([1, 2, 4, 3, 6, 9]) for _ in range(5)]
            U = dist.HeckeMatrix.of(oracles.random_unimodular_conjugate(diag, p, N, rng), p, N)
            if spectral.slope_projector(U, "0+") != dist.e_ord(U):
                return False
        return True

    def thresholds() -> bool:
        L = FieldLayout(3, (PrimeSpec("p0"), PrimeSpec("p1", 2, (2, 2, 1))))
        b = spectral.classicity_thresholds(L, (6, 2, 4))
        return b == {"p0": 5, "p1": 3}

    yield "char series vs exterior powers", traces
    yield "diagonal slopes recovered", diagonal_slopes
    yield "slope projector at 0+ equals e_ord", projector_vs_e_ord
    yield "classicity thresholds", thresholds


def _lfunction_checks(rng: random.Random) -> Iterator[Check]:
    def depletion_trace() -> bool:
        a1, b1, a2, b2, a3, b3 = he.euler_ratio_symbols()
        return sp.cancel(lfunction.depletion_factor_trace() - (1 - a1 * a2 / a3)) == 0

    def eigenline() -> bool:
        fam = lfunction.SyntheticFamily("z", serre_tate.QExpansion.zero(3), he.SphericalData.from_roots(2, sp.Rational(1, 5), 3, 1))
        return (
            fam.check()
            and lfunction.eigenline_coefficient(he.stabilize(), fam) == 1
            and lfunction.eigenline_coefficient(lfunction.beta_eigenvector(), fam) == 0
        )

    def correction() -> bool:
        return all(lfunction.delta_correction_identity(*k) for k in ((2, 2, 6), (4, 4, 2), (3, 5, 4)))

    def rearrangement() -> bool:
        for k1 in range(1, 4):
            for k2 in range(1, 4):
                for m3 in range(4):
                    k3 = k1 + k2 + 2 * m3
                    if any(lfunction.rearrangement_formal_residuals(k1, k2, k3)):
                        return False
                    base = random_poly_base(rng)
                    res = lfunction.rearrangement_residual(random_jet(rng, base, k1), random_jet(rng, base, k2), k1, k2, k3)
                    if not res.is_zero():
                        return False
        return True

    def ordinary_pair() -> bool:
        base = jets.qexp_base(3)
        for _ in range(10):
            k = rng.randint(3, 8)
            m = rng.randint(0, (k - 1) // 2)
            gs = [jets.Jet(base, (random_qexp(rng, 3),), k - 2 * j, 0) for j in range(m + 1)]
            f = jets.reassemble(gs, k)
            a, b = lfunction.ordinary_projection_pair(f, k)
            if a != b:
                return False
        return True

    def report_sample() -> bool:
        L = FieldLayout(3)
        t = weights.WeightTriple.make(L, 2, 2, 6)
        e = he.HeckeEigenData({"p0": {"x": (1, 3), "y": (1, 3), "z": (1, 243)}})
        r = lfunction.report(t, e)
        return r.combined == he.interpolation_factor(t, e) and not r.flags

    yield "depletion factor trace", depletion_trace
    yield "eigenline coefficient", eigenline
    yield "Delta correction factor", correction
    yield "nabla rearrangement", rearrangement
    yield "e_ord of gamma vs overconvergent projection", ordinary_pair
    yield "report matches hecke-euler", report_sample


SUITES: dict[str, Callable[[random.Random], Iterator[Check]]] = {
    "padic-arith": _padic_checks,
    "weights": _weights_checks,
    "distributions": _distribution_checks,
    "serre-tate": _serre_tate_checks,
    "nearly-ovc": _nearly_checks,
    "euler": _euler_checks,
    "spectral": _spectral_checks,
    "lfunction": _lfunction_checks,
}
ALIASES = {"hecke-euler": "euler"}


def suite_names() -> list[str]:
    return sorted(SUITES)


def run_suite(name: str, seed: int = 0) -> list[CheckResult]:
    name = ALIASES.get(name, name)
    if name == "all":
        out: list[CheckResult] = []
        for n in suite_names():
            out.extend(run_suite(n, seed))
        return out
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join(suite_names() + ['all'])}")
    rng = random.Random(seed)
    results = []
    for check_name, fn in SUITES[name](rng):
        start = time.perf_counter()
        detail = ""
        try:
            passed = bool(fn())
        except TripadicError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, check_name, passed, time.perf_counter() - start, detail))
    return results
