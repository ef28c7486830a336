from __future__ import annotations

import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tripadic import serre_tate as s
from tripadic.errors import ConfigError, DomainError, TruncationError

P = 3


def f(alpha: int, c=1) -> s.QExpansion:
    return s.QExpansion.monomial(P, alpha, c)


qexps = st.dictionaries(st.integers(0, 200), st.integers(-20, 20), max_size=8).map(
    lambda d: s.QExpansion.from_dict(P, d)
)
stable_qexps = st.dictionaries(
    st.integers(1, 200).filter(lambda a: a % P), st.integers(-20, 20), max_size=8
).map(lambda d: s.QExpansion.from_dict(P, d))


def test_monomial_rules():
    assert s.u_p0(f(6)) == f(2)
    assert s.u_p0(f(5)) == s.QExpansion.zero(P)
    assert s.u_p0(f(0)) == f(0)
    assert s.v_p0(f(2)) == f(6)
    assert s.v_p0(f(0)) == f(0)
    assert s.theta(f(4)) == f(4, 4)
    assert s.theta(f(0)) == s.QExpansion.zero(P)
    assert s.depletion(f(6) + f(5)) == f(5)
    assert s.depletion(f(0)) == s.QExpansion.zero(P)


@given(qexps)
def test_u_after_v_is_identity(g):
    assert s.u_p0(s.v_p0(g)) == g


@given(qexps)
def test_v_after_u_keeps_divisible_exponents(g):
    expected = s.QExpansion.from_dict(P, {a: c for a, c in g.terms if a % P == 0})
    assert s.v_p0(s.u_p0(g)) == expected


@given(qexps)
def test_u_theta_commutation(g):
    assert s.u_p0(s.theta(g)) == s.theta(s.u_p0(g)).scale(P)


@given(qexps)
def test_depletion_idempotent_with_image_in_kernel_of_u(g):
    d = s.depletion(g)
    assert s.depletion(d) == d
    assert s.u_p0(d) == s.QExpansion.zero(P)
    assert d.is_stable()


def test_v_respects_cap():
    with pytest.raises(TruncationError):
        s.v_p0(s.QExpansion.monomial(P, 50, 1, cap=100))


def test_theta_power_examples():
    assert s.theta_power_interpolate(f(4), 0) == f(4)
    assert s.theta_power_interpolate(f(4), 2) == f(4, 16)
    with pytest.raises(DomainError):
        s.theta_power_interpolate(f(3), 2)


@given(stable_qexps, st.integers(0, 5))
def test_theta_power_matches_iteration(g, k):
    h = g
    for _ in range(k):
        h = s.theta(h)
    assert s.theta_power_interpolate(g, k) == h


@pytest.mark.parametrize("k", range(6))
def test_universal_theta_power_specialises(k):
    g = s.QExpansion.from_dict(P, {1: 2, 4: -1, 5: 3, 7: 1, 11: 5})
    h = g
    for _ in range(k):
        h = s.theta(h)
    ue = s.UniversalExponent(residue=k % (P - 1), D=10)
    spec = s.specialise(s.theta_power_interpolate(g, ue, N=8), k, 8)
    assert spec == s.reduce_mod(h, 8)


def test_padic_theta_power_at_integer_point():
    from tripadic.padic import PadicScalar

    g = s.QExpansion.from_dict(P, {2: 1, 5: 1})
    value = s.theta_power_interpolate(g, PadicScalar(P, 8, 3), residue=3, N=8)
    assert value == s.reduce_mod(s.theta_power_interpolate(g, 3), 8)


def test_alpha_power_needs_unit():
    with pytest.raises(DomainError):
        s.alpha_power(6, 2, P)


def test_e_ord_on_q_expansions_keeps_constant_term():
    assert s.e_ord_qexp(f(0, 5) + f(7)) == f(0, 5)


def test_text_round_trip():
    g = s.parse_lines(P, io.StringIO("1:2\n9:1/2\n# comment\n9:1/2\n").readlines())
    assert g == s.QExpansion.from_dict(P, {1: 2, 9: 1})
    assert s.format_lines(g) == ["1:2", "9:1"]


def test_text_error_names_line():
    with pytest.raises(ConfigError, match="line 2"):
        s.parse_lines(P, ["1:2", "oops"])
