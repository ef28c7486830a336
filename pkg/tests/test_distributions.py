from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripadic import distributions as dist
from tripadic import linalg, oracles
from tripadic.distributions import Distribution, HeckeMatrix, LocallyAnalyticFunction, TruncatedSpace
from tripadic.errors import DomainError, TruncationError
from tripadic.padic import vp

P = 3


def random_function(rng: random.Random, space: TruncatedSpace) -> LocallyAnalyticFunction:
    return LocallyAnalyticFunction(space, tuple(rng.randint(-9, 9) for _ in range(space.dim)))


def random_distribution(rng: random.Random, space: TruncatedSpace) -> Distribution:
    return Distribution(space, tuple(rng.randint(-9, 9) for _ in range(space.dim)))


def test_space_shape():
    S = TruncatedSpace(P, 2, 2, 3)
    assert S.discs == 9 and S.dim == 36
    assert S.labels()[S.index(4, 2)] == (4, 2)
    with pytest.raises(DomainError):
        TruncatedSpace(2, 2, 1, 3)


def test_polynomial_evaluation():
    S = TruncatedSpace(P, 2, 2, 4)
    f = LocallyAnalyticFunction.polynomial(S, [1, -2, 0, 5])
    for z in (0, 1, 7, Fraction(2, 5)):
        assert f.evaluate(z) == 1 - 2 * Fraction(z) + 5 * Fraction(z) ** 3


def test_identity_action():
    rng = random.Random(1)
    f = random_function(rng, TruncatedSpace(P, 2, 1, 3))
    assert dist.act_K0p([[1, 0], [0, 1]], f) == f


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_scalar_matrices_act_by_kth_power(k):
    rng = random.Random(k)
    f = random_function(rng, TruncatedSpace(P, k, 1, 3))
    assert dist.act_K0p([[2, 0], [0, 2]], f) == f.scale(2**k)


def test_upper_triangular_action_matches_evaluation():
    S = TruncatedSpace(P, 2, 1, 3)
    f = LocallyAnalyticFunction.polynomial(S, [1, 1, 2])
    g = dist.act_K0p([[1, 2], [0, 1]], f)
    for x, y in ((1, 0), (1, 4), (2, 7), (4, 1)):
        assert g.evaluate_xy(x, y) == f.evaluate_xy(x, 2 * x + y)


def test_lower_triangular_action_needs_precision():
    S = TruncatedSpace(P, 1, 1, 3)
    f = LocallyAnalyticFunction.polynomial(S, [0, 0, 1])
    with pytest.raises(DomainError):
        dist.act_K0p([[1, 0], [3, 1]], f)
    # the tail beyond degree D has valuation about 2l at degree l
    with pytest.raises(TruncationError):
        dist.act_K0p([[1, 0], [3, 1]], f, N=30)
    g = dist.act_K0p([[1, 0], [3, 1]], f, N=6)
    for x, y in ((1, 0), (1, 1), (2, 5), (4, 7)):
        assert vp(g.evaluate_xy(x, y) - f.evaluate_xy(x + 3 * y, y), P) >= 6


def test_non_iwahori_matrix_rejected():
    S = TruncatedSpace(P, 1, 1, 3)
    with pytest.raises(DomainError):
        dist.act_K0p([[1, 0], [1, 1]], LocallyAnalyticFunction.zero(S))


def test_coset_rule():
    S = TruncatedSpace(P, 2, 2, 3)
    for r in range(S.discs):
        for i in range(P):
            img = dist.g_bar_action(i, LocallyAnalyticFunction.basis(S, r, 2))
            if (r - i) % P:
                assert img.is_zero()
            else:
                low = LocallyAnalyticFunction.basis(S.with_level(1), (r - i) // P % P, 2)
                assert img == dist.re_expand(low, 2)


def test_up_kills_zero():
    S = TruncatedSpace(P, 2, 1, 3)
    assert dist.up_operator(Distribution.zero(S)).is_zero()


def test_up_needs_positive_level():
    with pytest.raises(DomainError):
        dist.up_matrix(TruncatedSpace(P, 2, 0, 3))


@pytest.mark.parametrize("r", range(9))
def test_up_of_dual_basis_support(r):
    S = TruncatedSpace(P, 1, 2, 2)
    mu = dist.up_operator(Distribution.dual_basis(S, r, 1))
    reachable = {(P * r + i) % S.discs for i in range(P)}
    support = {S.labels()[n][0] for n, v in enumerate(mu.values) if v}
    assert support <= reachable


@pytest.mark.parametrize("m", [1, 2])
def test_compactness_factorisation(m):
    S = TruncatedSpace(P, 2, m, 3)
    Sm, E = dist.compactness_factorisation(S)
    assert linalg.matmul(E, Sm) == dist.up_function_matrix(S)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_classical_up_matches_polynomial_oracle(k):
    assert dist.classical_up_matrix(k, P) == oracles.classical_up_sym(k, P)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_classical_projection_equivariance(k):
    rng = random.Random(k)
    S = TruncatedSpace(P, k, 1, k + 2)
    C = linalg.transpose(oracles.classical_up_sym(k, P))
    for _ in range(5):
        mu = random_distribution(rng, S)
        assert dist.classical_projection(dist.up_operator(mu)) == linalg.matvec(C, dist.classical_projection(mu))


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_classical_eigenvalues_appear_in_distribution_module(k):
    # every classical eigenvalue valuation shows up among the slopes of the truncated module
    from tripadic.spectral import root_valuations

    U = dist.up_matrix(TruncatedSpace(P, k, 1, k + 2))
    C = HeckeMatrix.of(oracles.classical_up_sym(k, P), P)
    assert set(root_valuations(C).slopes) <= set(root_valuations(U).slopes)


def test_classical_projection_of_point_mass():
    S = TruncatedSpace(P, 3, 1, 4)
    assert dist.classical_projection(Distribution.point_mass(S, 1, 0)) == [1, 0, 0, 0]
    assert dist.classical_projection(Distribution.point_mass(S, 1, 2)) == [1, 2, 4, 8]
    assert dist.classical_projection(Distribution.zero(S)) == [0, 0, 0, 0]


def test_e_ord_examples():
    E = dist.e_ord(HeckeMatrix.of([[1, 0], [0, P]], P, 10))
    assert E == HeckeMatrix.of([[1, 0], [0, 0]], P, 10)
    assert dist.e_ord(HeckeMatrix.of([[0, 0], [0, 0]], P, 10)).entries == ((0, 0), (0, 0))
    identity = HeckeMatrix.of(linalg.identity(3), P, 10)
    assert dist.e_ord(identity) == identity


def test_e_ord_needs_precision():
    with pytest.raises(DomainError):
        dist.e_ord(HeckeMatrix.of([[1]], P))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_e_ord_idempotent_and_commutes(seed):
    rng = random.Random(seed)
    N = 8
    diag = [rng.choice([1, 2, 4, 3, 6, 9, 27]) for _ in range(4)]
    U = HeckeMatrix.of(oracles.random_unimodular_conjugate(diag, P, N, rng), P, N)
    E = dist.e_ord(U)
    assert E.is_idempotent()
    assert E @ U == U @ E


def test_bgg_kills_classical_polynomials():
    k = 2
    S = TruncatedSpace(P, k, 1, 5)
    for j in range(k + 1):
        assert dist.bgg_theta(LocallyAnalyticFunction.polynomial(S, [0] * j + [1])).is_zero()


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_bgg_on_next_monomial(k):
    S = TruncatedSpace(P, k, 1, k + 2)
    image = dist.bgg_theta(LocallyAnalyticFunction.polynomial(S, [0] * (k + 1) + [1]))
    one = LocallyAnalyticFunction.polynomial(image.space, [1])
    assert image == one.scale(math.factorial(k + 1))


def test_bgg_target_weight_and_degree():
    S = TruncatedSpace(P, 2, 1, 6)
    image = dist.bgg_theta(LocallyAnalyticFunction.zero(S))
    assert (image.space.k, image.space.D) == (-1, 3)
    with pytest.raises(DomainError):
        dist.bgg_theta(LocallyAnalyticFunction.zero(TruncatedSpace(P, 2, 1, 2)))


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_bgg_intertwining(k):
    S = TruncatedSpace(P, k, 1, k + 3)
    U = dist.up_matrix(S).rows()
    Um = dist.up_matrix(S.with_weight(-1, S.D - k - 1)).rows()
    Th = dist.bgg_dual_matrix(S)
    assert linalg.scale(linalg.matmul(Th, Um), P ** (k + 1)) == linalg.matmul(U, Th)


def test_pairing_weight_zero():
    S = TruncatedSpace(P, 0, 1, 2)
    rng = random.Random(3)
    mu1 = random_distribution(rng, S)
    mu2 = dist.DualDistribution(P, 0, (7,))
    assert dist.pair_dual(mu1, mu2) == mu1(LocallyAnalyticFunction.polynomial(S, [1])) * 7


def test_pairing_of_point_masses():
    S = TruncatedSpace(P, 1, 1, 2)
    mu1 = Distribution.point_mass(S, 1, 0)
    assert dist.pair_dual(mu1, dist.DualDistribution.point_mass(P, 1, 0, 1)) == 1
    with pytest.raises(DomainError):
        dist.DualDistribution.point_mass(P, 1, 1, 1)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_pairing_adjoint(k):
    rng = random.Random(10 + k)
    S = TruncatedSpace(P, k, 1, k + 1)
    for _ in range(5):
        mu1 = random_distribution(rng, S)
        mu2 = dist.DualDistribution(P, k, tuple(rng.randint(-9, 9) for _ in range(k + 1)))
        assert dist.pair_dual(dist.up_operator(mu1), mu2) == dist.pair_dual(mu1, dist.dual_up(mu2))
        assert dist.dual_up(mu2) == dist.dual_up_coset(mu2)


def test_round_padic():
    assert dist.round_padic(Fraction(1, 2), 3, P) == pow(2, -1, 27)
    assert dist.round_padic(29, 3, P) == 2
    assert dist.round_padic(Fraction(28, 3), 2, P) == Fraction(1, 3)
