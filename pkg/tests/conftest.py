from __future__ import annotations

import random

import pytest

from tripadic import jets, serre_tate


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


def make_poly(rng: random.Random, degree: int = 3, bound: int = 5) -> jets.Poly:
    return jets.Poly(tuple(rng.randint(-bound, bound) for _ in range(rng.randint(0, degree) + 1)))


def make_base(rng: random.Random) -> jets.BaseRing:
    return jets.poly_base(make_poly(rng, 2, 3), make_poly(rng, 2, 3))


def make_jet(rng: random.Random, base: jets.BaseRing, weight: int, order: int = 0) -> jets.Jet:
    return jets.Jet(base, tuple(make_poly(rng) for _ in range(order + 1)), weight, order)


def make_qexp(rng: random.Random, p: int, size: int = 6, top: int = 60, stable: bool = False) -> serre_tate.QExpansion:
    coeffs = {}
    for _ in range(size):
        a = rng.randint(0, top)
        if stable and a % p == 0:
            a += 1
        coeffs[a] = rng.randint(-9, 9)
    return serre_tate.QExpansion.from_dict(p, coeffs)
