from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy as sp

from conftest import make_base, make_jet, make_qexp
from tripadic import hecke_euler as he
from tripadic import jets, lfunction
from tripadic.errors import DegenerateError, DomainError
from tripadic.padic import FieldLayout, PrimeSpec
from tripadic.serre_tate import QExpansion, depletion, e_ord_qexp
from tripadic.weights import WeightTriple

P = 3
L1 = FieldLayout(P)
SAMPLE = WeightTriple.make(L1, 2, 2, 6)
SAMPLE_EIGEN = he.HeckeEigenData({"p0": {"x": (1, 3), "y": (1, 3), "z": (1, 243)}})


def family(label: str, qexp: QExpansion, alpha=2, beta=Fraction(1, 5)) -> lfunction.SyntheticFamily:
    return lfunction.SyntheticFamily(label, qexp, he.SphericalData.from_roots(alpha, beta, P, 1))


def test_pipeline_without_theta_or_delta():
    rng = random.Random(1)
    f1 = family("x", make_qexp(rng, P) + QExpansion.monomial(P, 0, 4))
    f2 = family("y", make_qexp(rng, P) + QExpansion.monomial(P, 0, 3))
    t = WeightTriple.make(L1, 1, 1, 2)
    assert lfunction.pipeline_eval(f1, f2, t) == e_ord_qexp(depletion(f1.qexp) * f2.qexp)


def test_pipeline_of_zero_family():
    rng = random.Random(2)
    zero = lfunction.SyntheticFamily.zero(P)
    f2 = family("y", make_qexp(rng, P))
    assert lfunction.pipeline_eval(zero, f2, SAMPLE) == QExpansion.zero(P)


def test_pipeline_scales_by_delta():
    rng = random.Random(3)
    f1, f2 = family("x", make_qexp(rng, P)), family("y", make_qexp(rng, P))
    base = lfunction.pipeline_eval(f1, f2, SAMPLE)
    scaled = lfunction.pipeline_eval(f1, f2, SAMPLE, (1, 1, 1), ((1, 0), (0, 1), (1, 1)))
    assert scaled == base.scale(jets.delta_pairing_point_masses(((1, 0), (0, 1), (1, 1)), (1, 1, 1)))


def test_depletion_factor_trace():
    a1, b1, a2, b2, a3, b3 = he.euler_ratio_symbols()
    assert sp.cancel(lfunction.depletion_factor_trace() - (1 - a1 * a2 / a3)) == 0


def test_family_eigenline():
    fam = family("z", QExpansion.zero(P))
    assert fam.check()
    assert fam.eigenvalue == 2
    with pytest.raises(DomainError):
        _ = lfunction.SyntheticFamily.zero(P).eigenvalue


def test_eigenline_coefficient_examples():
    fam = family("z", QExpansion.zero(P))
    assert lfunction.eigenline_coefficient(he.stabilize(), fam) == 1
    assert lfunction.eigenline_coefficient(lfunction.beta_eigenvector(), fam) == 0


def test_eigenline_coefficient_matches_linear_solve():
    # v = 3 v_alpha + 5 v_beta, written in the basis v_0, v_1 and decomposed again
    fam = family("z", QExpansion.zero(P), alpha=2, beta=Fraction(1, 5))
    d = fam.local
    va = {n: d.evaluate(c) for n, c in he.stabilize().as_dict().items()}
    vb = {n: d.evaluate(c) for n, c in lfunction.beta_eigenvector().as_dict().items()}
    v = he.TestVector.from_dict({n: 3 * va.get(n, 0) + 5 * vb.get(n, 0) for n in (0, 1)})
    x, y = sp.symbols("x y")
    sol = sp.solve([x * va.get(n, 0) + y * vb.get(n, 0) - v.as_dict().get(n, 0) for n in (0, 1)], [x, y])
    assert lfunction.eigenline_coefficient(v, fam) == sol[x] == 3


def test_eigenline_coefficient_degenerate():
    with pytest.raises(DegenerateError):
        lfunction.eigenline_coefficient(he.stabilize(), family("z", QExpansion.zero(P), alpha=1, beta=1))


@pytest.mark.parametrize("ks", [(2, 2, 6), (4, 4, 2), (3, 5, 4), (1, 1, 2)])
def test_delta_correction_identity(ks):
    assert lfunction.delta_correction_identity(*ks)
    assert lfunction.delta_correction_identity(*ks, p=P)


def test_delta_correction_numeric():
    k1, k2, k3 = 4, 4, 2
    ax, ay, az = Fraction(2), Fraction(5), Fraction(7)
    bx, by = Fraction(P ** (k1 + 1)) / ax, Fraction(P ** (k2 + 1)) / ay
    value, displayed = lfunction.delta_correction_factor(ax, bx, ay, by, az, P, k1, k2, k3)
    assert value == displayed


@pytest.mark.parametrize("k1, k2, m3", [(k1, k2, m3) for k1 in range(1, 4) for k2 in range(1, 4) for m3 in range(4)])
def test_rearrangement(k1, k2, m3):
    k3 = k1 + k2 + 2 * m3
    assert not any(lfunction.rearrangement_formal_residuals(k1, k2, k3))
    rng = random.Random(k1 * 100 + k2 * 10 + m3)
    base = make_base(rng)
    res = lfunction.rearrangement_residual(make_jet(rng, base, k1), make_jet(rng, base, k2), k1, k2, k3)
    assert res.is_zero()


def test_ordinary_projection_pair():
    rng = random.Random(5)
    base = jets.qexp_base(P)
    for _ in range(10):
        k = rng.randint(3, 8)
        m = rng.randint(0, (k - 1) // 2)
        gs = [jets.Jet(base, (make_qexp(rng, P),), k - 2 * j, 0) for j in range(m + 1)]
        a, b = lfunction.ordinary_projection_pair(jets.reassemble(gs, k), k)
        assert a == b


def test_report_trivial_betas():
    e = he.HeckeEigenData({"p0": {"x": (1, 0), "y": (1, 0), "z": (1, 0)}})
    r = lfunction.report(SAMPLE, e)
    assert r.combined == 1 and not r.flags


def test_report_matches_module_outputs():
    r = lfunction.report(SAMPLE, SAMPLE_EIGEN)
    assert r.E["p0"] == he.euler_factor_Ep(SAMPLE, SAMPLE_EIGEN, "p0") == 3328
    assert r.E1["p0"] == he.euler_factor_Ep1(SAMPLE, SAMPLE_EIGEN, "p0") == 19360
    assert r.combined == he.interpolation_factor(SAMPLE, SAMPLE_EIGEN) == Fraction(104, 605)
    assert r.archimedean == he.archimedean_factor(SAMPLE) == 9
    assert ("combined", "104/605") in r.rows()
    assert "central L-value" in r.excluded


def test_report_flags_exceptional_zero():
    e = he.HeckeEigenData({"p0": {"x": (1, 3), "y": (1, 3), "z": (1, 27)}})
    r = lfunction.report(SAMPLE, e)
    assert r.flags == ["exceptional-zero:p0"] and r.combined is None


def test_report_two_primes():
    L2 = FieldLayout(P, (PrimeSpec("p0"), PrimeSpec("p1")))
    t = WeightTriple.make(L2, (2, 4), (2, 4), (6, 2))
    e = he.HeckeEigenData({pr: {lab: (1, 3) for lab in "xyz"} for pr in ("p0", "p1")})
    r = lfunction.report(t, e)
    assert r.combined == he.interpolation_factor(t, e)


def test_report_rejects_non_interpolation_point():
    with pytest.raises(DomainError):
        lfunction.report(WeightTriple.make(L1, 2, 2, 2), SAMPLE_EIGEN)
