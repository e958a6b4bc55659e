"""Exact linear algebra over Q(i).

Vectors are lists of GaussianRational.  Row reduction is fully reduced
(pivots 1, zeros above and below) so that the row basis of a span is a
canonical function of the span and the fixed column order; every downstream
determinism guarantee leans on that.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .gaussian import ZERO, ONE, GaussianRational

Vector = list[GaussianRational]


def zeros(n: int) -> Vector:
    return [ZERO] * n


def vec_add(u: Sequence[GaussianRational], v: Sequence[GaussianRational]) -> Vector:
    return [a + b for a, b in zip(u, v)]

def vec_sub(u: Sequence[GaussianRational], v: Sequence[GaussianRational]) -> Vector:
    return [a - b for a, b in zip(u, v)]

def vec_scale(c: GaussianRational, v: Sequence[GaussianRational]) -> Vector:
    return [c * a for a in v]


def is_zero_vector(v: Sequence[GaussianRational]) -> bool:
    return all(not a for a in v)


def rref(rows: Iterable[Sequence[GaussianRational]]) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form.

    Returns the nonzero rows (pivot entries 1, pivot columns cleared) and the
    pivot column index of each row, in row order.
    """
    work = [list(r) for r in rows]
    if not work:
        return [], []
    ncols = len(work[0])
    out: list[Vector] = []
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for k in range(r, len(work)):
            if work[k][c]:
                pivot_row = k
                break
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = ONE / work[r][c]
        work[r] = vec_scale(inv, work[r])
        for k in range(len(work)):
            if k != r and work[k][c]:
                factor = work[k][c]
                work[k] = vec_sub(work[k], vec_scale(factor, work[r]))
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    out = work[:r]
    return out, pivots


def reduce_vector(
    v: Sequence[GaussianRational], rows: Sequence[Sequence[GaussianRational]], pivots: Sequence[int]
) -> Vector:
    """Residual of ``v`` after eliminating the pivot columns of an rref basis."""
    res = list(v)
    for row, p in zip(rows, pivots):
        if res[p]:
            factor = res[p]
            res = vec_sub(res, vec_scale(factor, row))
    return res


def in_span(
    v: Sequence[GaussianRational], rows: Sequence[Sequence[GaussianRational]], pivots: Sequence[int]
) -> bool:
    return is_zero_vector(reduce_vector(v, rows, pivots))


def span_coordinates(
    v: Sequence[GaussianRational], rows: Sequence[Sequence[GaussianRational]], pivots: Sequence[int]
) -> Vector | None:
    """Coefficients expressing ``v`` over an rref row basis, or None."""
    res = list(v)
    coords: Vector = []
    for row, p in zip(rows, pivots):
        c = res[p]
        coords.append(c)
        if c:
            res = vec_sub(res, vec_scale(c, row))
    if not is_zero_vector(res):
        return None
    return coords


def nullspace(rows: Iterable[Sequence[GaussianRational]], ncols: int) -> list[Vector]:
    """Basis of the right kernel, one vector per free column, in column order."""
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    basis: list[Vector] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = zeros(ncols)
        v[free] = ONE
        for row, p in zip(red, pivots):
            v[p] = -row[free]
        basis.append(v)
    return basis


def solve_linear(
    rows: Sequence[Sequence[GaussianRational]], rhs: Sequence[GaussianRational]
) -> Vector | None:
    """A particular solution of ``A x = b`` (free variables 0), or None."""
    if not rows:
        return None
    ncols = len(rows[0])
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(augmented)
    if ncols in pivots:
        return None
    x = zeros(ncols)
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def rank(rows: Iterable[Sequence[GaussianRational]]) -> int:
    return len(rref(rows)[0])


def matvec(rows: Sequence[Sequence[GaussianRational]], v: Sequence[GaussianRational]) -> Vector:
    return [sum((a * b for a, b in zip(row, v)), start=ZERO) for row in rows]


def identity(n: int) -> list[Vector]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def invert(rows: Sequence[Sequence[GaussianRational]]) -> list[Vector] | None:
    """Exact inverse of a square matrix, or None if singular."""
    n = len(rows)
    augmented = [list(r) + ident_row for r, ident_row in zip(rows, identity(n))]
    red, pivots = rref(augmented)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in red]


# -- integer lattice helpers -------------------------------------------------


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(map(int, r)) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def lattice_is_saturated(generators: Sequence[Sequence[int]]) -> bool:
    """Whether the lattice spanned by integer row vectors equals its saturation.

    The quotient of the ambient integer lattice by the row lattice is
    torsion-free exactly when the gcd of all maximal minors of a generating
    matrix is 1; the gcd of the r x r minors equals the product of the
    invariant factors.
    """
    if not generators:
        return True
    rational = [[GaussianRational(x) for x in row] for row in generators]
    r = rank(rational)
    if r == 0:
        return True
    ncols = len(generators[0])
    g = 0
    for row_idx in combinations(range(len(generators)), r):
        for col_idx in combinations(range(ncols), r):
            minor = bareiss_det([[generators[i][j] for j in col_idx] for i in row_idx])
            g = gcd(g, abs(minor))
            if g == 1:
                return True
    return g == 1


def clear_denominators(values: Sequence[Fraction]) -> list[int]:
    """Scale rationals to coprime integers, preserving signs and ratios."""
    if not values:
        return []
    from math import lcm

    denom = lcm(*(v.denominator for v in values))
    ints = [int(v * denom) for v in values]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return ints
