from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripadic import linalg, oracles, spectral
from tripadic.distributions import HeckeMatrix, e_ord
from tripadic.errors import DomainError, PrecisionError
from tripadic.padic import FieldLayout, PrimeSpec
from tripadic.spectral import CharSeries

P = 3


def diag(values, N=None) -> HeckeMatrix:
    n = len(values)
    return HeckeMatrix.of([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], P, N)


def test_char_series_examples():
    assert spectral.char_series(diag([P, 1])) == CharSeries.make([1, -(P + 1), P], P)
    assert spectral.char_series(diag([0, 0, 0])) == CharSeries.make([1], P)
    assert spectral.char_series(diag([P, 1])) == CharSeries.make([1, -P], P) * CharSeries.make([1, -1], P)


def test_char_series_constant_term():
    with pytest.raises(DomainError):
        CharSeries((2, 1), P)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_char_series_matches_exterior_powers(seed):
    rng = random.Random(seed)
    N = 10
    a = [[rng.randrange(P**N) for _ in range(5)] for _ in range(5)]
    assert spectral.char_series(HeckeMatrix.of(a, P, N)) == CharSeries.make(oracles.exterior_power_traces(a), P, N)


def test_newton_polygon_examples():
    np_ = spectral.newton_polygon(CharSeries.make([1, -(P + 1), P], P))
    assert np_.as_dict() == {0: 1, 1: 1}
    assert spectral.newton_polygon(CharSeries.make([1, -2, 1], P)).as_dict() == {0: 2}


def test_newton_polygon_fractional_slope():
    # 1 - p X^2 has two roots of valuation 1/2
    assert spectral.newton_polygon(CharSeries.make([1, 0, -P], P)).as_dict() == {Fraction(1, 2): 2}


@settings(max_examples=40)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=6), st.integers(0, 2**32 - 1))
def test_diagonal_slopes_recovered(vals, seed):
    rng = random.Random(seed)
    entries = [P**v * rng.choice([1, 2, 4, 5, 7]) for v in vals]
    assert spectral.newton_polygon(spectral.char_series(diag(entries))).slopes == sorted(Fraction(v) for v in vals)


def test_ambiguous_precision():
    s = spectral.char_series(diag([1, P**5, P**6], N=8))
    with pytest.raises(PrecisionError):
        spectral.newton_polygon(s)
    np_ = spectral.newton_polygon(s, allow_unresolved=True)
    assert np_.slopes[:1] == [0] and np_.unresolved >= 1


def test_count_below():
    np_ = spectral.newton_polygon(spectral.char_series(diag([1, 3, 9, 9])))
    assert np_.count_below(2) == 2 and np_.count_below(Fraction(1, 5)) == 1


def test_slope_projector_examples():
    U = diag([1, P], N=10)
    assert spectral.slope_projector(U, Fraction(1, 2)) == diag([1, 0], N=10)
    assert spectral.slope_projector(U, 5) == diag([1, 1], N=10)
    assert spectral.slope_projector(U, "0+") == diag([1, 0], N=10)


def test_slope_projector_rejects_collision():
    with pytest.raises(DomainError):
        spectral.slope_projector(diag([1, P], N=10), 1)


def _conjugated_projector(values, h, rng):
    """(projector, U) for U = A·diag·A^{-1} over Q, the projector built from the diagonal."""
    n = len(values)
    while True:
        A = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
        if linalg.det_fraction(A) % P:
            break
    Ai = linalg.inverse_fraction(A)
    D = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
    keep = [[1 if i == j and spectral.vp(values[i], P) < h else 0 for j in range(n)] for i in range(n)]
    U = linalg.matmul(linalg.matmul(A, D), Ai)
    E = linalg.matmul(linalg.matmul(A, keep), Ai)
    return E, HeckeMatrix.of(U, P)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)]))
def test_slope_projector_matches_eigenbasis(seed, h):
    rng = random.Random(seed)
    N = 8
    values = [P ** rng.randint(0, 3) * rng.choice([1, 2, 4]) for _ in range(4)]
    expected, U = _conjugated_projector(values, h, rng)
    E = spectral.slope_projector(U, h, N)
    assert E == HeckeMatrix.of(expected, P, N)
    assert spectral.rank_mod(E) == sum(1 for v in values if spectral.vp(v, P) < h)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_slope_projector_at_zero_plus_is_e_ord(seed):
    rng = random.Random(seed)
    values = [rng.choice([1, 2, 4, 3, 6, 9]) for _ in range(5)]
    U = HeckeMatrix.of(oracles.random_unimodular_conjugate(values, P, 10, rng), P, 10)
    assert spectral.slope_projector(U, "0+") == e_ord(U)


def test_root_valuations_count_zero_roots_out():
    np_ = spectral.root_valuations(HeckeMatrix.of([[0, 1], [0, 0]], P))
    assert np_.segments == ()


def test_classicity_thresholds():
    L1 = FieldLayout(3)
    assert spectral.classicity_thresholds(L1, (6,)) == {"p0": 5}
    L = FieldLayout(3, (PrimeSpec("p0"), PrimeSpec("p1", 2, (2, 2, 1))))
    assert spectral.classicity_thresholds(L, (6, 2, 4)) == {"p0": 5, "p1": 3}
    with pytest.raises(DomainError):
        spectral.classicity_thresholds(L, (6, 2))


def test_slope_table_normalisation():
    assert spectral.slope_table(diag([3, 9]), 1) == [(0, 1), (1, 1)]
