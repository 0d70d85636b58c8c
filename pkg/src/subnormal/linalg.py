"""Exact rational linear algebra used by the moment and quadrature code."""
from __future__ import annotations

from fractions import Fraction


class SingularMatrix(ArithmeticError):
    pass


def solve(matrix, rhs):
    """Solve ``matrix @ x = rhs`` exactly by Gaussian elimination."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col}")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def quadratic_form(matrix, vector):
    return sum(
        matrix[i][j] * vector[i] * vector[j]
        for i in range(len(vector))
        for j in range(len(vector))
    )


def psd_witness(matrix):
    """Return None if the symmetric rational matrix is positive semidefinite.

    Otherwise return a rational vector v with v^T M v < 0. Works by symmetric
    elimination (congruence) while tracking the transformation, so zero pivots
    are handled correctly instead of trusting leading minors alone.
    """
    n = len(matrix)
    m = [[Fraction(v) for v in row] for row in matrix]
    t = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        p = m[k][k]
        if p < 0:
            return t[k][:]
        if p == 0:
            for j in range(k + 1, n):
                if m[k][j] == 0:
                    continue
                if m[j][j] < 0:
                    return t[j][:]
                if m[j][j] == 0:
                    s = Fraction(-1 if m[k][j] > 0 else 1)
                else:
                    s = -m[k][j] / m[j][j]
                return [a + s * b for a, b in zip(t[k], t[j])]
            continue
        for j in range(k + 1, n):
            f = m[j][k] / p
            if f == 0:
                continue
            m[j] = [a - f * b for a, b in zip(m[j], m[k])]
            for r in range(n):
                m[r][j] -= f * m[r][k]
            t[j] = [a - f * b for a, b in zip(t[j], t[k])]
    return None


def determinant(matrix) -> Fraction:
    n = len(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def hankel(seq, size: int, shift: int = 0):
    return [[seq[i + j + shift] for j in range(size)] for i in range(size)]
