"""Brute-force reference computations, written independently of the main code paths."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Sequence

import sympy as sp

from . import linalg


def exterior_power_traces(a: Sequence[Sequence]) -> list[Fraction]:
    """(-1)^i tr Λ^i(a) for i = 0..n, i.e. signed sums of principal minors."""
    n = len(a)
    out = [Fraction(1)]
    for i in range(1, n + 1):
        total = Fraction(0)
        for idx in itertools.combinations(range(n), i):
            total += linalg.det_fraction([[a[r][c] for c in idx] for r in idx])
        out.append((-1) ** i * total)
    return out


def classical_up_sym(k: int, p: int, N: int | None = None) -> list[list]:
    """U on Sym^k through explicit polynomials: P(x, y) -> sum_i P(x, i x + p y).

    Basis x^{k-j} y^j; columns are images.  Reduced mod p^N when N is given.
    """
    x, y = sp.symbols("x y")
    basis = [x ** (k - j) * y**j for j in range(k + 1)]
    cols = []
    for P in basis:
        img = sp.expand(sum(P.subs(y, i * x + p * y, simultaneous=True) for i in range(p)))
        poly = sp.Poly(img, x, y)
        cols.append([int(poly.coeff_monomial(x ** (k - j) * y**j)) for j in range(k + 1)])
    mat = linalg.transpose(cols)
    if N is not None:
        mat = linalg.reduce_mod(mat, p**N)
    return mat


def delta_brute_force(points, exponents) -> int:
    """Expand prod of the three determinants as polynomials and evaluate at the points."""
    xs = sp.symbols("x1 y1 x2 y2 x3 y3")
    x1, y1, x2, y2, x3, y3 = xs
    m1, m2, m3 = exponents
    poly = sp.expand((x3 * y2 - y3 * x2) ** m1 * (x3 * y1 - y3 * x1) ** m2 * (x1 * y2 - y1 * x2) ** m3)
    subs = dict(zip(xs, [c for pt in points for c in pt]))
    return int(poly.subs(subs))


def random_unimodular_conjugate(diag: Sequence[int], p: int, N: int, rng: random.Random) -> list[list[int]]:
    """P·diag·P^{-1} mod p^N for a random P invertible mod p."""
    n = len(diag)
    mod = p**N
    while True:
        P = [[rng.randrange(mod) for _ in range(n)] for _ in range(n)]
        try:
            Pi = linalg.inverse_mod(P, p, mod)
            break
        except ValueError:
            continue
    D = [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)]
    return linalg.matmul(linalg.matmul(P, D, mod), Pi, mod)


def vandermonde_sum(k1: int, k2: int, k3: int) -> tuple[int, int]:
    """(sum_j C(m3, j) C(m-2, k1+j-1), C(k3-2, k2+m3-1))."""
    m3 = (k3 - k1 - k2) // 2
    m = (k1 + k2 + k3) // 2
    lhs = sum(math.comb(m3, j) * math.comb(m - 2, k1 + j - 1) for j in range(m3 + 1))
    return lhs, math.comb(k3 - 2, k2 + m3 - 1)
