"""Characteristic series, Newton polygons, slope projectors and classicity thresholds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .distributions import HeckeMatrix, round_padic
from .errors import ConvergenceError, DomainError, PrecisionError
from .padic import FieldLayout, vp


@dataclass(frozen=True)
class CharSeries:
    """Coefficients q_0 = 1, q_1, ..., q_n of det(1 - X·U); N = None means exact."""

    coeffs: tuple
    p: int
    N: int | None = None

    def __post_init__(self) -> None:
        if not self.coeffs or self.coeffs[0] != 1:
            raise DomainError("a characteristic series has constant term 1")

    @property
    def exact(self) -> bool:
        return self.N is None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __mul__(self, other: "CharSeries") -> "CharSeries":
        N = _min_precision(self.N, other.N)
        prod = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                prod[i + j] += a * b
        return CharSeries.make(prod, self.p, N)

    @classmethod
    def make(cls, coeffs: Sequence, p: int, N: int | None = None) -> "CharSeries":
        if N is None:
            vals = tuple(_clean(x) for x in coeffs)
        else:
            vals = tuple(round_padic(x, N, p) for x in coeffs)
        return cls(vals, p, N)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CharSeries):
            return NotImplemented
        N = _min_precision(self.N, other.N)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        if N is None:
            return all(Fraction(x) == Fraction(y) for x, y in zip(a, b))
        return all(round_padic(Fraction(x) - Fraction(y), N, self.p) == 0 for x, y in zip(a, b))

    def __hash__(self) -> int:
        return hash((self.coeffs, self.p, self.N))


def _min_precision(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _clean(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def char_series(U: HeckeMatrix) -> CharSeries:
    """det(1 - X·U): the reversed characteristic polynomial of an integer or rational lift."""
    n = U.size
    if n == 0:
        return CharSeries((1,), U.p, U.N)
    c = linalg.charpoly_fraction(U.rows())  # det(X - U) = sum c_i X^i
    return CharSeries.make([c[n - j] for j in range(n + 1)], U.p, U.N)


@dataclass(frozen=True)
class NewtonPolygon:
    """Slopes with multiplicities, nondecreasing.  ``unresolved`` counts roots beyond precision."""

    segments: tuple[tuple[Fraction, int], ...]
    unresolved: int = 0

    @property
    def slopes(self) -> list[Fraction]:
        return [s for s, mult in self.segments for _ in range(mult)]

    def count_below(self, h) -> int:
        h = Fraction(h)
        return sum(mult for s, mult in self.segments if s < h)

    def as_dict(self) -> dict[Fraction, int]:
        return {s: mult for s, mult in self.segments}


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    """Lower convex hull, keeping only the vertices (leftmost on collinear runs)."""
    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(s: CharSeries, allow_unresolved: bool = False) -> NewtonPolygon:
    """Lower convex hull of (i, v(q_i)); its slopes are the valuations of the nonzero eigenvalues.

    For inexact series a coefficient that vanishes modulo p^N has unknown
    valuation >= N.  If such a coefficient could move the hull, a
    PrecisionError is raised; with ``allow_unresolved`` the certain initial
    segments are returned and the remaining roots are counted as unresolved.
    """
    p = s.p
    known = []
    unknown = []
    for i, q in enumerate(s.coeffs):
        if q == 0:
            if s.N is not None:
                unknown.append(i)
            continue
        v = vp(Fraction(q), p)
        if s.N is not None and v >= s.N:
            unknown.append(i)
        else:
            known.append((i, Fraction(v)))
    hull = _lower_hull(known)
    segments: list[tuple[Fraction, int]] = []
    certain_to = 0
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = (y2 - y1) / (x2 - x1)
        # an unknown point at height N on or below this segment (or its extension) is ambiguous
        threat = s.N is not None and any(i > x1 and s.N <= y1 + slope * (i - x1) for i in unknown)
        if threat:
            break
        if segments and segments[-1][0] == slope:
            segments[-1] = (slope, segments[-1][1] + x2 - x1)
        else:
            segments.append((slope, x2 - x1))
        certain_to = x2
    last_known = hull[-1][0] if hull else 0
    pending = [i for i in unknown if i > certain_to]
    if s.N is not None and (certain_to < last_known or pending):
        # roots beyond the certain part: either a hull edge is threatened or the degree is uncertain
        if not allow_unresolved:
            raise PrecisionError(
                f"Newton polygon undetermined at precision N={s.N} beyond index {certain_to}"
            )
        return NewtonPolygon(tuple(segments), s.degree - certain_to)
    return NewtonPolygon(tuple(segments))


# ---------------------------------------------------------------------------
# slope projector


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _coupled_solve(F: list, G: list, rhs: list, degF_unknown: int, degG_unknown: int) -> tuple[list, list]:
    """Solve G·A + F·B = rhs with deg A < degF_unknown and deg B < degG_unknown."""
    n = degF_unknown + degG_unknown
    rhs = list(rhs) + [0] * (n - len(rhs))
    if len(rhs) > n:
        raise ConvergenceError("right-hand side has too large a degree")
    cols = []
    for i in range(degF_unknown):
        col = [0] * n
        for j, g in enumerate(G):
            if i + j < n:
                col[i + j] = g
        cols.append(col)
    for i in range(degG_unknown):
        col = [0] * n
        for j, f in enumerate(F):
            if i + j < n:
                col[i + j] = f
        cols.append(col)
    mat = linalg.transpose(cols)
    sol = linalg.solve(mat, [[x] for x in rhs])
    flat = [row[0] for row in sol]
    return flat[:degF_unknown], flat[degF_unknown:]


def _round_poly(a: list, prec: int, p: int) -> list:
    return [Fraction(round_padic(x, prec, p)) for x in a]


def _hensel_split(Q: list, s: int, p: int, prec: int, max_iter: int = 200) -> tuple[list, list]:
    """Factor a p-integral Q with Q ≡ u·Y^s (mod p) as F·G, F monic of degree s, F ≡ Y^s.

    Newton iteration on G·dF + F·dG = Q - F·G; the coupled system has a unit
    determinant so every step stays p-integral and the error squares.
    """
    n = len(Q) - 1
    F = [Fraction(0)] * s + [Fraction(1)]
    G = [Fraction(x) for x in Q[s:]]
    for _ in range(max_iter):
        E = _poly_sub(Q, _poly_mul(F, G))
        if all(x == 0 or vp(x, p) >= prec for x in E):
            return F, G
        dF, dG = _coupled_solve(F, G, E, s, n - s + 1)
        F = _round_poly([a + b for a, b in zip(F, dF + [0])], prec, p)
        F[-1] = Fraction(1)
        G = _round_poly([a + b for a, b in zip(G, dG)], prec, p)
    raise ConvergenceError(f"slope factorisation did not converge in {max_iter} steps")


def _eval_poly_at_matrix(poly: list, W: list[list]) -> list[list]:
    n = len(W)
    acc = linalg.zeros(n, n)
    for c in reversed(poly):
        acc = linalg.matmul(acc, W)
        for i in range(n):
            acc[i][i] += c
    return acc


def _parse_threshold(h, n: int) -> Fraction:
    if isinstance(h, str):
        if h.strip() in ("0+", "0⁺"):
            return Fraction(1, n + 1)
        return Fraction(h)
    return Fraction(h)


def root_valuations(U: HeckeMatrix) -> NewtonPolygon:
    """Valuations of the eigenvalues of an exact (or lifted) matrix."""
    return newton_polygon(CharSeries.make(char_series(U).coeffs, U.p, None))


def slope_projector(U: HeckeMatrix, h, N: int | None = None) -> HeckeMatrix:
    """Idempotent commuting with U onto the generalised eigenspaces of slope < h.

    ``h = "0+"`` gives the ordinary projector: eigenvalue valuations of an
    n×n matrix lie in (1/n)Z, so h = 1/(n+1) separates slope 0 from the rest.
    An inexact U is replaced by its integer lift.
    """
    n = U.size
    p = U.p
    h = _parse_threshold(h, n)
    N = U.N if N is None else N
    if N is None:
        raise DomainError("slope_projector needs an output precision N")
    rows = [[Fraction(x) for x in r] for r in U.entries]
    poly = linalg.charpoly_fraction(rows)
    zero_roots = next(i for i, c in enumerate(poly) if c != 0)
    nonzero = CharSeries.make([poly[n - j] for j in range(n - zero_roots + 1)], p, None)
    np_ = newton_polygon(nonzero)
    if any(slope == h for slope, _ in np_.segments):
        raise DomainError(f"an eigenvalue has slope exactly {h}; the slope decomposition is ambiguous")
    big = np_.count_below(h)
    if big == 0:
        return HeckeMatrix.of(linalg.zeros(n, n), p, N, "slope_projector", U.prime)
    if big == n:
        return HeckeMatrix.of(linalg.identity(n), p, N, "slope_projector", U.prime)
    s = n - big  # roots with valuation > h, including zero roots
    a, b = h.numerator, h.denominator
    # W = U^b / p^a has unit-or-smaller eigenvalues exactly on the slope > h part
    Ub = rows
    for _ in range(b - 1):
        Ub = linalg.matmul(Ub, rows)
    W = linalg.scale(Ub, Fraction(1, 1) / Fraction(p) ** a)
    P = linalg.charpoly_fraction(W)
    mu = min(vp(c, p) for c in P if c != 0)
    Q = [c / Fraction(p) ** mu for c in P]
    if not all(c == 0 or vp(c, p) >= 1 for i, c in enumerate(Q) if i != s) or vp(Q[s], p) != 0:
        raise DomainError("the rescaled characteristic polynomial does not split at the expected vertex")
    vmin = min((vp(x, p) for r in rows for x in r if x != 0), default=0)
    loss = n * (abs(a) + b * max(0, -vmin)) + n
    prec = N + loss + 5
    F, G = _hensel_split(Q, s, p, prec)
    # Bezout S·F + T·G = 1 with deg S < deg G, deg T < deg F
    degG = len(G) - 1
    T, S = _coupled_solve(F, G, [1], s, degG)
    proj = linalg.matmul(_eval_poly_at_matrix(S, W), _eval_poly_at_matrix(F, W))
    return HeckeMatrix.of(proj, p, N, "slope_projector", U.prime)


def rank_mod(M: HeckeMatrix) -> int:
    """Rank of an idempotent modulo p, which equals its rank over Z_p."""
    p = M.p
    rows = [[round_padic(x, 1, p) for x in r] for r in M.entries]
    if any(isinstance(x, Fraction) for r in rows for x in r):
        return linalg.rank(M.rows())
    return _rank_mod_p(rows, p)


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# classicity


def classicity_thresholds(layout: FieldLayout, k: Sequence[int]) -> dict[str, Fraction]:
    """Slope bounds below which a finite-slope eigenform of classical weight k is classical.

    The distinguished prime p0 gets k_tau0 - 1; every other prime P gets
    min(k_tau + 1) over its embeddings.  When p0 has several embeddings the
    bound for p0 is the smaller of the two.
    """
    k = tuple(int(x) for x in k)
    if len(k) != layout.d:
        raise DomainError(f"weight must have {layout.d} entries")
    out: dict[str, Fraction] = {}
    for i, pr in enumerate(layout.primes):
        ks = k[layout.embedding_slice(i)]
        if i == 0:
            bound = Fraction(ks[0] - 1)
            if len(ks) > 1:
                bound = min(bound, Fraction(min(ks[1:]) + 1))
        else:
            bound = Fraction(min(ks) + 1)
        out[pr.name] = bound
    return out


def slope_table(U: HeckeMatrix, normalise: Fraction | int = 0) -> list[tuple[Fraction, int]]:
    """(slope - normalise, multiplicity) for the exact eigenvalue valuations of U."""
    np_ = root_valuations(U)
    return [(sl - normalise, mult) for sl, mult in np_.segments]
