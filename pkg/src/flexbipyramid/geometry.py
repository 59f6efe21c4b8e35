"""Small vector and determinant helpers over exact or certified scalars."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .numeric import CertifiedScalar, certified_sign

Vec = tuple


def vec(*xs) -> Vec:
    return tuple(x if isinstance(x, (Fraction, CertifiedScalar)) else Fraction(x) for x in xs)


def vsub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vadd(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vscale(k, a: Vec) -> Vec:
    return (k * a[0], k * a[1], k * a[2])


def dot(a: Vec, b: Vec):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Vec, b: Vec) -> Vec:
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def norm_sq(a: Vec):
    return dot(a, a)


def dist_sq(a: Vec, b: Vec):
    return norm_sq(vsub(a, b))


def det3(a: Vec, b: Vec, c: Vec):
    """Determinant of the matrix with columns a, b, c."""
    return dot(a, cross(b, c))


def orient3d(a: Vec, b: Vec, c: Vec, d: Vec):
    """det(a - d, b - d, c - d); six times the oriented volume of (a, b, c, d)."""
    return det3(vsub(a, d), vsub(b, d), vsub(c, d))


def is_zero_vector(v: Vec) -> bool:
    return all(certified_sign(x) == 0 for x in v)


def det(matrix: Sequence[Sequence]):
    """Determinant of a square matrix.

    Rational matrices use fraction Gaussian elimination; anything containing a
    certified entry falls back to cofactor expansion, which needs no sign
    decisions.
    """
    n = len(matrix)
    if all(isinstance(x, (int, Fraction)) for row in matrix for x in row):
        return _det_gauss([[Fraction(x) for x in row] for row in matrix])
    return _det_laplace([list(row) for row in matrix], tuple(range(n)), 0, {})


def _det_gauss(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            result = -result
        pv = m[col][col]
        result *= pv
        for r in range(col + 1, n):
            f = m[r][col]
            if f:
                f /= pv
                row, prow = m[r], m[col]
                for c in range(col + 1, n):
                    row[c] -= f * prow[c]
    return result


def _det_laplace(m, cols: tuple, row: int, memo: dict):
    # expansion along rows with memoized minors over the remaining columns
    if len(cols) == 1:
        return m[row][cols[0]]
    key = cols
    if key in memo:
        return memo[key]
    total = Fraction(0)
    for idx, c in enumerate(cols):
        entry = m[row][c]
        if isinstance(entry, (int, Fraction)) and entry == 0:
            continue
        minor = _det_laplace(m, cols[:idx] + cols[idx + 1:], row + 1, memo)
        term = entry * minor
        total = total - term if idx % 2 else total + term
    memo[key] = total
    return total
