"""Composition operators with matrix symbols on Gaussian-type L^2 spaces.

The measure on R^k (or C^k) has density gamma(|x|^2) with gamma an entire
function with nonnegative Taylor coefficients. For an invertible normal
symbol A with eigenpairs (lambda_i, v_i):

    h_A(x) = gamma(|A^{-1} x|^2) / (|det A| gamma(|x|^2))

and the spectral measure of x puts mass <x, v_i>^2 at 1/lambda_i^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .base import Check, to_number
from .moments import AtomicMeasure


class ZeroVector(ValueError):
    pass


class AtomBudgetExceeded(ValueError):
    pass


def jacobi_eigen(matrix, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigenvalues and orthonormal eigenvectors (columns) of a real symmetric matrix.

    Cyclic Jacobi rotations; stops once the off-diagonal norm is below tol.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T, atol=tol):
        raise ValueError("matrix must be square and symmetric")
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
                v = v @ rot
    else:
        raise ArithmeticError("Jacobi sweeps did not converge")
    return np.diag(a).copy(), v


@dataclass(frozen=True, eq=False)
class SpectralSymbol:
    """Eigen-data of a normal symbol: ``basis[i]`` is the eigenvector for ``eigenvalues[i]``."""

    dim: int
    eigenvalues: tuple
    basis: tuple
    complex_linear: bool = False
    tolerance: float | None = None

    def __post_init__(self):
        lams = tuple(to_number(v) for v in self.eigenvalues)
        basis = tuple(tuple(to_number(c) for c in vec) for vec in self.basis)
        if len(lams) != self.dim or len(basis) != self.dim:
            raise ValueError("need dim eigenvalues and dim eigenvectors")
        if any(len(vec) != self.dim for vec in basis):
            raise ValueError("eigenvectors must have dim coordinates")
        if any(v == 0 for v in lams):
            raise ValueError("symbol must be invertible")
        exact = all(isinstance(c, Fraction) for vec in basis for c in vec) and all(
            isinstance(v, Fraction) for v in lams
        )
        tol = None if exact else (self.tolerance or 1e-9)
        for i in range(self.dim):
            for j in range(self.dim):
                dot = sum(a * b for a, b in zip(basis[i], basis[j]))
                target = 1 if i == j else 0
                if (tol is None and dot != target) or (tol is not None and abs(dot - target) > tol):
                    raise ValueError("basis must be orthonormal")
        object.__setattr__(self, "eigenvalues", lams)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "tolerance", tol)

    @classmethod
    def from_symmetric(cls, matrix, complex_linear: bool = False) -> "SpectralSymbol":
        """Exact eigen-data for diagonal rational input, cyclic Jacobi otherwise."""
        rows = [[to_number(v) for v in row] for row in matrix]
        n = len(rows)
        if all(rows[i][j] == 0 for i in range(n) for j in range(n) if i != j) and all(
            isinstance(v, Fraction) for row in rows for v in row
        ):
            basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            return cls(n, tuple(rows[i][i] for i in range(n)), tuple(map(tuple, basis)), complex_linear)
        values, vectors = jacobi_eigen([[float(v) for v in row] for row in rows])
        return cls(
            n,
            tuple(float(v) for v in values),
            tuple(tuple(float(c) for c in vectors[:, i]) for i in range(n)),
            complex_linear,
            1e-9,
        )

    @property
    def exact(self) -> bool:
        return self.tolerance is None

    def coords(self, x) -> list:
        return [sum(a * b for a, b in zip(x, vec)) for vec in self.basis]

    def apply(self, x) -> list:
        c = self.coords(x)
        return [
            sum(lam * ci * vec[k] for lam, ci, vec in zip(self.eigenvalues, c, self.basis))
            for k in range(self.dim)
        ]

    def jacobian(self):
        det = Fraction(1) if self.exact else 1.0
        for v in self.eigenvalues:
            det *= abs(v)
        return det * det if self.complex_linear else det

    def inverse_norm2(self, x):
        return sum(ci * ci / (lam * lam) for ci, lam in zip(self.coords(x), self.eigenvalues))


@dataclass(frozen=True, eq=False)
class DensitySeries:
    """gamma(z) = sum a_n z^n.

    With ``full`` set, gamma is that callable and the coefficients are a
    truncation of its Taylor series; otherwise gamma is the polynomial itself.
    """

    coefficients: tuple
    full: Callable | None = None

    def __post_init__(self):
        coeffs = tuple(to_number(a) for a in self.coefficients)
        if not coeffs or any(a < 0 for a in coeffs) or not any(a > 0 for a in coeffs[1:]):
            raise ValueError("coefficients must be nonnegative with a positive one beyond a_0")
        object.__setattr__(self, "coefficients", coeffs)

    def __call__(self, z):
        if self.full is not None:
            return self.full(z)
        return sum(a * z**n for n, a in enumerate(self.coefficients))


def _norm2(x):
    return sum(c * c for c in x)


def h_A(symbol: SpectralSymbol, density: DensitySeries, x):
    x = [to_number(c) for c in x]
    if all(c == 0 for c in x):
        raise ZeroVector("h is evaluated off the origin")
    return density(symbol.inverse_norm2(x)) / (symbol.jacobian() * density(_norm2(x)))


def spectral_measure(symbol: SpectralSymbol, x) -> AtomicMeasure:
    """Mass <x, v_i>^2 at 1/lambda_i^2 (zero measure at the origin)."""
    x = [to_number(c) for c in x]
    return AtomicMeasure.of(
        (1 / (lam * lam), c * c) for lam, c in zip(symbol.eigenvalues, symbol.coords(x))
    )


def measures_close(a: AtomicMeasure, b: AtomicMeasure, tol: float) -> bool:
    """Compare measures after merging atoms closer than tol."""

    def merged(m):
        out = []
        for t, w in m:
            if out and abs(float(t) - out[-1][0]) <= tol * max(1.0, abs(float(t))):
                out[-1][1] += float(w)
            else:
                out.append([float(t), float(w)])
        return [(t, w) for t, w in out if abs(w) > tol]

    ma, mb = merged(a), merged(b)
    return len(ma) == len(mb) and all(
        abs(t1 - t2) <= tol * max(1.0, abs(t1)) and abs(w1 - w2) <= tol * max(1.0, abs(w1))
        for (t1, w1), (t2, w2) in zip(ma, mb)
    )


def verify_overt(symbol: SpectralSymbol, x) -> Check:
    """The spectral measure of Ax is t^{-1} times that of x."""
    x = [to_number(c) for c in x]
    lhs = spectral_measure(symbol, symbol.apply(x))
    rhs = spectral_measure(symbol, x).times_power(-1)
    same = lhs == rhs if symbol.exact else measures_close(lhs, rhs, symbol.tolerance)
    return Check.passed() if same else Check.failed("spectral measures disagree", {"x": x})


def convolution_power(measure: AtomicMeasure, n: int, budget: int = 10_000) -> AtomicMeasure:
    """n-fold multiplicative convolution; the 0-th power is delta_1."""
    if n < 0:
        raise ValueError("negative power")
    result = AtomicMeasure.dirac(1)
    for _ in range(n):
        result = _times(result, measure, budget)
    return result


def matrix_family(
    symbol: SpectralSymbol, density: DensitySeries, x, budget: int = 10_000
) -> AtomicMeasure:
    """P(x) = gamma(|x|^2)^{-1} sum a_n (nu_x^{*n} rescaled by |det A|); delta_1 at 0."""
    x = [to_number(c) for c in x]
    if all(c == 0 for c in x):
        return AtomicMeasure.dirac(1)
    nu = spectral_measure(symbol, x)
    jac = symbol.jacobian()
    scale = 1 / density(_norm2(x))
    pieces = []
    power = AtomicMeasure.dirac(1)
    for n, a in enumerate(density.coefficients):
        if n:
            power = _times(power, nu, budget)
        if a:
            pieces.extend((s / jac, a * w * scale) for s, w in power)
    return AtomicMeasure.of(pieces)


def _times(a: AtomicMeasure, b: AtomicMeasure, budget: int) -> AtomicMeasure:
    acc: dict = {}
    for s, u in a:
        for t, w in b:
            acc[s * t] = acc.get(s * t, 0) + u * w
    if len(acc) > budget:
        raise AtomBudgetExceeded(f"{len(acc)} atoms exceed the budget of {budget}")
    return AtomicMeasure.of(acc.items())


def tail_deficit(symbol: SpectralSymbol, density: DensitySeries, x) -> float:
    """1 minus the total mass of the truncated family at x."""
    return 1 - matrix_family(symbol, density, x).total_mass()


def verify_matrix_scc(
    symbol: SpectralSymbol, density: DensitySeries, samples: Sequence, budget: int = 10_000
) -> Check:
    """P(x) = t P(Ax) / h_A(Ax) at every sample point."""
    for x in samples:
        x = [to_number(c) for c in x]
        if all(c == 0 for c in x):
            continue
        ax = symbol.apply(x)
        lhs = matrix_family(symbol, density, x, budget)
        rhs = matrix_family(symbol, density, ax, budget).times_power(1).scaled(
            1 / h_A(symbol, density, ax)
        )
        same = lhs == rhs if symbol.exact else measures_close(lhs, rhs, symbol.tolerance)
        if not same:
            return Check.failed("strong consistency fails at sample", {"x": x})
    return Check.passed(samples=len(samples))


def sample_points(dim: int, count: int) -> list[list[Fraction]]:
    """Deterministic nonzero rational sample vectors with small coordinates."""
    values = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(-3, 2), Fraction(0)]
    out = []
    k = 0
    while len(out) < count:
        vec = []
        rest = k
        for _ in range(dim):
            vec.append(values[rest % len(values)])
            rest //= len(values)
        if any(vec):
            out.append(vec)
        k += 1
    return out
