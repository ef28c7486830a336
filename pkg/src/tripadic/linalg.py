"""Exact dense linear algebra over Q and over Z/p^N (small matrices, lists of lists)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list]


def identity(n: int, one=1) -> Matrix:
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def matmul(a: Matrix, b: Matrix, mod: int | None = None) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    bt = [[b[k][j] for k in range(inner)] for j in range(cols)]
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        new = []
        for col in bt:
            s = sum(x * col[k] for k, x in nz)
            new.append(s % mod if mod else s)
        out.append(new)
    return out


def matvec(a: Matrix, v: Sequence, mod: int | None = None) -> list:
    out = []
    for row in a:
        s = sum(x * y for x, y in zip(row, v) if x)
        out.append(s % mod if mod else s)
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def matadd(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def scale(a: Matrix, c) -> Matrix:
    return [[c * x for x in r] for r in a]


def reduce_mod(a: Matrix, mod: int) -> Matrix:
    return [[x % mod for x in r] for r in a]


def matpow_mod(a: Matrix, e: int, mod: int) -> Matrix:
    n = len(a)
    result = identity(n)
    base = reduce_mod(a, mod)
    while e:
        if e & 1:
            result = matmul(result, base, mod)
        e >>= 1
        if e:
            base = matmul(base, base, mod)
    return result


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    n, m = len(a), len(b)
    out = zeros(n + m, n + m)
    for i in range(n):
        out[i][:n] = list(a[i])
    for i in range(m):
        out[n + i][n:] = list(b[i])
    return out


def to_fraction(a: Matrix) -> Matrix:
    return [[Fraction(x) for x in r] for r in a]


def det_fraction(a: Matrix) -> Fraction:
    m = to_fraction(a)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    m = to_fraction(a)
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a: Matrix) -> list[list[Fraction]]:
    """Basis of {x : a x = 0} over Q."""
    cols = len(a[0]) if a else 0
    m, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Solve a·x = b exactly over Q (a of full column rank); raises on inconsistency."""
    rows = len(a)
    n = len(a[0])
    aug = [list(a[i]) + list(b[i]) for i in range(rows)]
    m, pivots = rref(aug)
    k = len(b[0])
    if any(p >= n for p in pivots):
        raise ValueError("inconsistent linear system")
    if len(pivots) < n:
        raise ValueError("linear system is underdetermined")
    x = zeros(n, k)
    for i, pc in enumerate(pivots):
        x[pc] = m[i][n:]
    return x


def inverse_fraction(a: Matrix) -> Matrix:
    return solve(a, identity(len(a)))


def inverse_mod(a: Matrix, p: int, mod: int) -> Matrix:
    """Inverse of a matrix over Z/p^N that is invertible mod p."""
    n = len(a)
    m = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(reduce_mod(a, mod))]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] % p), None)
        if piv is None:
            raise ValueError("matrix is not invertible mod p")
        m[c], m[piv] = m[piv], m[c]
        inv = pow(m[c][c], -1, mod)
        m[c] = [x * inv % mod for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [(x - f * y) % mod for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def charpoly_fraction(a: Matrix) -> list[Fraction]:
    """Coefficients c_0..c_n of det(X·I - a) via Hessenberg reduction over Q."""
    n = len(a)
    h = to_fraction(a)
    for j in range(n - 2):
        piv = next((i for i in range(j + 1, n) if h[i][j] != 0), None)
        if piv is None:
            continue
        if piv != j + 1:
            h[piv], h[j + 1] = h[j + 1], h[piv]
            for row in h:
                row[piv], row[j + 1] = row[j + 1], row[piv]
        inv = 1 / h[j + 1][j]
        for i in range(j + 2, n):
            if h[i][j] != 0:
                f = h[i][j] * inv
                h[i] = [x - f * y for x, y in zip(h[i], h[j + 1])]
                for row in h:
                    row[j + 1] += f * row[i]
    # characteristic polynomials of leading principal blocks
    polys: list[list[Fraction]] = [[Fraction(1)]]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        new = [Fraction(0)] + prev  # X * p_{m-1}
        for i in range(len(prev)):
            new[i] -= h[m - 1][m - 1] * prev[i]
        prod = Fraction(1)
        for i in range(m - 1, 0, -1):
            prod *= h[i][i - 1]
            coef = prod * h[i - 1][m - 1]
            if coef:
                for t, c in enumerate(polys[i - 1]):
                    new[t] -= coef * c
        polys.append(new)
    return polys[n]
