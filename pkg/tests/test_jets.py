from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_base, make_jet, make_qexp
from tripadic import jets, oracles
from tripadic.errors import DomainError
from tripadic.jets import Jet, Poly

seeds = st.integers(0, 2**32 - 1)
TRIVIAL = jets.poly_base()


def X(j: int, base=TRIVIAL, weight: int = 0) -> Jet:
    return Jet(base, (Poly(),) * j + (Poly.const(1),), weight, j)


def test_nabla_of_constant():
    f = Jet.constant(TRIVIAL, Poly.const(3), 4)
    assert jets.nabla(f) == Jet(TRIVIAL, (Poly(), Poly.const(12)), 6, 1)


def test_nabla_of_x_at_weight_zero():
    assert jets.nabla(X(1)) == Jet(TRIVIAL, (Poly(), Poly(), Poly.const(-1)), 2, 2)


def test_nabla_linear_over_constants():
    rng = random.Random(3)
    base = make_base(rng)
    f, g = make_jet(rng, base, 4, 1), make_jet(rng, base, 4, 1)
    assert jets.nabla(f.scale(3) + g) == jets.nabla(f).scale(3) + jets.nabla(g)


def test_epsilon_examples():
    assert jets.epsilon(Jet.constant(TRIVIAL, Poly.const(5), 2)).is_zero()
    for j in range(1, 5):
        assert jets.epsilon(X(j, weight=2)) == X(j - 1, weight=0).scale(j)


@settings(max_examples=60)
@given(seeds, st.integers(1, 10), st.integers(0, 3))
def test_epsilon_nabla_commutator(seed, k, m):
    rng = random.Random(seed)
    base = make_base(rng)
    f = make_jet(rng, base, k, m)
    lhs = jets.epsilon(jets.nabla(f)) - jets.nabla(jets.epsilon(f), k - 2)
    assert lhs == Jet(base, f.coeffs, k, m + 1).scale(k)


def test_nabla_power_zero_is_identity():
    rng = random.Random(5)
    f = make_jet(rng, make_base(rng), 3)
    assert jets.nabla_power(f, 3, 0) == f


@settings(max_examples=40)
@given(seeds, st.integers(1, 12), st.integers(1, 5))
def test_epsilon_of_nabla_power(seed, k, j):
    rng = random.Random(seed)
    f = make_jet(rng, make_base(rng), k)
    lhs = jets.epsilon(jets.nabla_power(f, k, j))
    assert lhs == jets.nabla_power(f, k, j - 1).scale(j * (k + j - 1))


def test_epsilon_nabla_cube_at_weight_five():
    rng = random.Random(8)
    f = make_jet(rng, make_base(rng), 5)
    assert jets.epsilon(jets.nabla_power(f, 5, 3)) == jets.nabla_power(f, 5, 2).scale(21)


def test_projection_of_order_zero():
    rng = random.Random(1)
    f = make_jet(rng, make_base(rng), 4)
    assert jets.overconvergent_projection(f, 4) == [f]


def test_projection_of_pure_nabla_image():
    rng = random.Random(2)
    base = make_base(rng)
    g = make_jet(rng, base, 3)
    g0, g1 = jets.overconvergent_projection(jets.nabla(g), 5)
    assert g0.is_zero() and g1 == g


def test_projection_constant():
    assert jets.projection_constant(2, 6) == 12


@pytest.mark.parametrize("m, k", [(m, k) for k in range(1, 11) for m in range((k + 1) // 2) if 2 * m < k])
def test_projection_reassembles(m, k):
    rng = random.Random(100 * k + m)
    for _ in range(5):
        base = make_base(rng)
        f = make_jet(rng, base, k, m)
        assert jets.reassemble(jets.overconvergent_projection(f, k), k) == Jet(base, f.coeffs, k, m)


@pytest.mark.parametrize("m, k", [(1, 2), (2, 3), (2, 4), (3, 5)])
def test_projection_rejects_degenerate(m, k):
    rng = random.Random(0)
    with pytest.raises(DomainError):
        jets.overconvergent_projection(make_jet(rng, make_base(rng), k, m), k)


def test_unit_root_projection():
    rng = random.Random(4)
    base = jets.qexp_base(3)
    f = Jet(base, (make_qexp(rng, 3), make_qexp(rng, 3)), 4, 1)
    assert jets.unit_root_projection(f) == Jet(base, f.coeffs[:1], 4, 0)
    g = Jet(base, (make_qexp(rng, 3),), 4, 0)
    assert jets.unit_root_projection(g) == g
    xm = Jet(base, (base.zero, make_qexp(rng, 3)), 4, 1)
    assert jets.unit_root_projection(xm).is_zero()
    with pytest.raises(DomainError):
        jets.unit_root_projection(X(1))


def test_trilinear_coefficient_examples():
    assert jets.trilinear_coeffs(1, 1, 2).coeffs == (1,)
    tc = jets.trilinear_coeffs(1, 1, 4)
    assert tc.coeffs == (1, -1) and tc.m3 == 1
    assert jets.trilinear_recurrence_residuals(tc) == [0]
    assert oracles.vandermonde_sum(1, 1, 4) == (2, 2)


@pytest.mark.parametrize("ks", [(2, 2, 3), (3, 3, 2), (0, 2, 2)])
def test_trilinear_rejects_bad_legs(ks):
    with pytest.raises(DomainError):
        jets.trilinear_coeffs(*ks)


@settings(max_examples=40)
@given(seeds, st.integers(1, 5), st.integers(1, 5), st.integers(0, 3))
def test_trilinear_product_has_no_x_terms(seed, k1, k2, m3):
    rng = random.Random(seed)
    base = make_base(rng)
    k3 = k1 + k2 + 2 * m3
    f1, f2 = make_jet(rng, base, k1), make_jet(rng, base, k2)
    t = jets.trilinear_product(f1, f2, k1, k2, k3)
    assert t.order == 0 and t.weight == k3
    assert all(x == 0 for x in jets.trilinear_recurrence_residuals(jets.trilinear_coeffs(k1, k2, k3)))


def test_trilinear_product_without_derivatives():
    rng = random.Random(6)
    f1, f2 = make_jet(rng, TRIVIAL, 1), make_jet(rng, TRIVIAL, 1)
    assert jets.trilinear_product(f1, f2, 1, 1, 2).coefficient(0) == (f1 * f2).coefficient(0)
    jets.trilinear_product(f1, f2, 1, 1, 4)


def test_trilinear_product_needs_order_zero():
    rng = random.Random(7)
    base = make_base(rng)
    with pytest.raises(DomainError):
        jets.trilinear_product(make_jet(rng, base, 2, 1), make_jet(rng, base, 2), 2, 2, 6)


def test_delta_pairing_trivial_exponents():
    mus = [jets.SymDual.from_values([v]) for v in (2, 3, 5)]
    assert jets.delta_pairing(*mus, 0, 0, 0) == 30


def test_delta_pairing_single_determinant():
    mus = [jets.SymDual.point_mass(1, 0, 1), jets.SymDual.point_mass(0, 1, 1), jets.SymDual.point_mass(4, 7, 0)]
    assert jets.delta_pairing(*mus, 0, 0, 1) == 1


@pytest.mark.parametrize("ex", [(1, 1, 1), (2, 1, 0), (0, 2, 3), (1, 0, 2)])
def test_delta_pairing_matches_expansion(ex):
    pts = ((1, 0), (0, 1), (2, 3))
    degs = (ex[1] + ex[2], ex[0] + ex[2], ex[0] + ex[1])
    mus = [jets.SymDual.point_mass(x, y, d) for (x, y), d in zip(pts, degs)]
    assert jets.delta_pairing(*mus, *ex) == oracles.delta_brute_force(pts, ex)


def test_delta_pairing_checks_degrees():
    with pytest.raises(DomainError):
        jets.delta_pairing(jets.SymDual.from_values([1]), jets.SymDual.from_values([1]), jets.SymDual.from_values([1]), 1, 0, 0)
