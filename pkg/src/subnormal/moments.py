"""Atomic measures on [0, inf) and finite-window moment problems."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .base import is_inf, to_number
from .linalg import SingularMatrix, determinant, hankel, psd_witness, quadratic_form, solve


class InfiniteEntry(ValueError):
    pass


class MonotonicityViolation(ValueError):
    pass


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms (t, w): t >= 0, w > 0, sorted by t, no repeats."""

    atoms: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        prev = None
        for t, w in self.atoms:
            if t < 0:
                raise ValueError(f"atom at negative point {t}")
            if not w > 0:
                raise ValueError(f"non-positive weight {w} at {t}")
            if prev is not None and not t > prev:
                raise ValueError("atoms must be sorted and distinct")
            prev = t

    @classmethod
    def of(cls, pairs: Iterable[tuple[object, object]]) -> "AtomicMeasure":
        acc: dict = {}
        for t, w in pairs:
            t, w = to_number(t), to_number(w)
            if w == 0:
                continue
            acc[t] = acc.get(t, 0) + w
        return cls(tuple(sorted((t, w) for t, w in acc.items() if w != 0)))

    @classmethod
    def dirac(cls, t, w=1) -> "AtomicMeasure":
        return cls.of([(t, w)])

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return AtomicMeasure.of(self.atoms + other.atoms)

    def total_mass(self):
        return sum((w for _, w in self.atoms), Fraction(0))

    def moment(self, n: int):
        """int t^n d(self); for n < 0 an atom at 0 is not allowed."""
        total = Fraction(0)
        for t, w in self.atoms:
            if n < 0 and t == 0:
                raise ZeroDivisionError("negative moment of a measure with an atom at 0")
            total += w * t**n
        return total

    def moments(self, count: int) -> list:
        return [self.moment(n) for n in range(count)]

    def scaled(self, c) -> "AtomicMeasure":
        return AtomicMeasure.of((t, w * c) for t, w in self.atoms)

    def times_power(self, k: int) -> "AtomicMeasure":
        """The measure t^k d(self)."""
        if k < 0 and self.mass_at(0):
            raise ZeroDivisionError("t^k with k < 0 on a measure charging 0")
        return AtomicMeasure.of((t, w * t**k) for t, w in self.atoms)

    def pushforward(self, f) -> "AtomicMeasure":
        return AtomicMeasure.of((f(t), w) for t, w in self.atoms)

    def mass_at(self, t):
        for s, w in self.atoms:
            if s == t:
                return w
        return Fraction(0)

    def mass_where(self, predicate):
        return sum((w for t, w in self.atoms if predicate(t)), Fraction(0))

    def support_max(self):
        return self.atoms[-1][0] if self.atoms else None

    def support_min(self):
        return self.atoms[0][0] if self.atoms else None


def moments_of(measure: AtomicMeasure, count: int) -> list:
    return measure.moments(count)


def pushforward_power(measure: AtomicMeasure, j: int) -> AtomicMeasure:
    """Image of the measure under t -> t^j."""
    if j < 1:
        raise ValueError("power must be positive")
    return measure.pushforward(lambda t: t**j)


def _finite(seq: Sequence) -> list:
    vals = [to_number(a) for a in seq]
    for n, a in enumerate(vals):
        if is_inf(a):
            raise InfiniteEntry(f"entry {n} is infinite")
    return vals


def stieltjes_witness(seq: Sequence):
    """None if both Hankel windows of the sequence are PSD.

    Otherwise a dict naming the failing window ("plain" is (a_{i+j}),
    "shifted" is (a_{i+j+1})) and a rational vector on which the quadratic
    form is negative.
    """
    a = _finite(seq)
    if not a:
        return None
    last = len(a) - 1
    for label, shift, size in (("plain", 0, last // 2 + 1), ("shifted", 1, (last - 1) // 2 + 1)):
        if size <= 0:
            continue
        h = hankel(a, size, shift)
        vec = psd_witness(h)
        if vec is not None:
            return {
                "hankel": label,
                "size": size,
                "vector": vec,
                "value": quadratic_form(h, vec),
            }
    return None


def is_stieltjes(seq: Sequence) -> bool:
    """Window test: both Hankel matrices that fit inside the sequence are PSD."""
    return stieltjes_witness(seq) is None


def replay_stieltjes_witness(seq: Sequence, witness: dict) -> bool:
    """True if the witness really exhibits a negative quadratic form on seq."""
    a = _finite(seq)
    shift = 0 if witness["hankel"] == "plain" else 1
    vec = [to_number(v) for v in witness["vector"]]
    size = len(vec)
    if 2 * (size - 1) + shift >= len(a):
        return False
    return quadratic_form(hankel(a, size, shift), vec) < 0


@dataclass(frozen=True)
class TwoSidedSequence:
    """Values a_m for m in [m_lo, m_lo + len(values) - 1]."""

    m_lo: int
    values: tuple

    @property
    def m_hi(self) -> int:
        return self.m_lo + len(self.values) - 1

    def __getitem__(self, m: int):
        if not self.m_lo <= m <= self.m_hi:
            raise IndexError(m)
        return self.values[m - self.m_lo]


def two_sided_witness(seq: TwoSidedSequence):
    """Test every tail a_s, a_{s+1}, ... that the window can express."""
    for start in range(seq.m_lo, seq.m_hi + 1):
        tail = seq.values[start - seq.m_lo:]
        w = stieltjes_witness(tail)
        if w is not None:
            return dict(w, start=start)
    return None


def is_two_sided_stieltjes(seq: TwoSidedSequence) -> bool:
    return two_sided_witness(seq) is None


def _log(a) -> float:
    if isinstance(a, Fraction):
        return math.log(a.numerator) - math.log(a.denominator)
    return math.log(a)


def carleman_determinate(
    seq: Sequence, threshold: float = 10.0, horizon: int = 10**6
) -> bool:
    """Sufficient (never necessary) test for determinacy of a Stieltjes sequence.

    The terms a_n^{-1/(2n)} are fitted on the tail half of the window by a
    power law n^p. If p >= -1 (terms decay no faster than 1/n) the partial
    sums are extrapolated along that law out to ``horizon`` and compared with
    ``threshold``; otherwise the answer is False.
    """
    a = _finite(seq)
    if len(a) < 4 or any(v <= 0 for v in a[1:]):
        return False
    terms = [math.exp(-_log(a[n]) / (2 * n)) for n in range(1, len(a))]
    partial = sum(terms)
    if partial > threshold:
        return True
    n_last = len(terms)
    tail = range(max(1, n_last - max(3, n_last // 2)) + 1, n_last + 1)
    xs = np.log(np.array(list(tail), dtype=float))
    ys = np.log(np.array([terms[n - 1] for n in tail]))
    slope, intercept = (float(c) for c in np.polyfit(xs, ys, 1))
    if slope < -1:
        return False
    # integral of e^b n^p from N to H bounds the remaining partial sum from below
    b = float(intercept)
    if abs(slope + 1) < 1e-12:
        extra = math.exp(b) * (math.log(horizon) - math.log(n_last))
    else:
        p1 = slope + 1
        extra = math.exp(b) * (horizon**p1 - (n_last + 1) ** p1) / p1
    return bool(partial + extra > threshold)


@dataclass(frozen=True)
class RatioBound:
    value: object
    increasing_verified: bool


def sup_support_from_ratios(seq: Sequence) -> RatioBound:
    """Last ratio a_{n+1}/a_n, after checking the ratios never decrease."""
    a = _finite(seq)
    if len(a) < 2 or any(v <= 0 for v in a):
        raise ValueError("need at least two positive entries")
    ratios = [a[n + 1] / a[n] for n in range(len(a) - 1)]
    for n in range(len(ratios) - 1):
        if ratios[n + 1] < ratios[n]:
            raise MonotonicityViolation(
                f"ratio {n + 1} ({ratios[n + 1]}) below ratio {n} ({ratios[n]})"
            )
    return RatioBound(ratios[-1], len(ratios) >= 2)


# representing measures ------------------------------------------------------


def rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Distinct rational roots of sum coeffs[i] t^i.

    After clearing denominators every rational root p/q has q dividing the
    leading coefficient, so roots computed to enough digits pin down the
    only possible candidate, which is then checked exactly.
    """
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    found = set()
    while len(coeffs) > 1 and coeffs[0] == 0:
        found.add(Fraction(0))
        coeffs.pop(0)
    if len(coeffs) <= 1:
        return sorted(found)
    den = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * den) for c in coeffs]
    content = math.gcd(*ints)
    ints = [v // content for v in ints]
    lead = abs(ints[-1])

    def vanishes(t: Fraction) -> bool:
        return sum(c * t**i for i, c in enumerate(ints)) == 0

    digits = 2 * len(str(lead)) + 2 * len(str(max(abs(v) for v in ints))) + 30
    with mpmath.workdps(digits):
        try:
            approx = mpmath.polyroots(ints[::-1], maxsteps=200, extraprec=4 * digits)
        except mpmath.libmp.NoConvergence:
            approx = [complex(r) for r in np.roots([float(v) for v in ints[::-1]])]
        for r in approx:
            r = mpmath.mpc(r)
            if abs(r.imag) > mpmath.mpf(10) ** (-digits // 3) * max(1, abs(r.real)):
                continue
            cand = Fraction(mpmath.nstr(r.real, digits, strip_zeros=False)).limit_denominator(lead)
            if vanishes(cand):
                found.add(cand)
    return sorted(found)


def _weights(atoms: Sequence[Fraction], a: Sequence[Fraction]):
    k = len(atoms)
    try:
        return solve([[t**n for t in atoms] for n in range(k)], a[:k])
    except SingularMatrix:
        return None


def _matches(measure_atoms, weights, a) -> AtomicMeasure | None:
    if weights is None or any(w <= 0 for w in weights):
        return None
    if any(t < 0 for t in measure_atoms):
        return None
    m = AtomicMeasure.of(zip(measure_atoms, weights))
    return m if m.moments(len(a)) == list(a) else None


def _kernel_measure(a: list, k: int):
    """Measure supported on the roots of the degree-k kernel polynomial."""
    # monic q of degree k annihilating the rows (a_i, ..., a_{i+k}), i < k
    rows = [[a[i + j] for j in range(k + 1)] for i in range(k)]
    try:
        c = solve([row[:k] for row in rows], [-row[k] for row in rows])
    except SingularMatrix:
        return None
    coeffs = c + [Fraction(1)]
    roots = rational_roots(coeffs)
    if len(roots) != k:
        return None
    return _matches(roots, _weights(roots, a), a)


def unique_representing_measure(seq: Sequence) -> AtomicMeasure | None:
    """The representing measure when the window forces it.

    That happens when some Hankel matrix (a_{i+j})_{i,j<=k} inside the window
    is singular while the previous one is positive definite: then the only
    candidate sits on the roots of the kernel polynomial.
    """
    a = [Fraction(v) for v in _finite(seq)]
    if not a or a[0] <= 0 or not is_stieltjes(a):
        return None
    for k in range(1, (len(a) - 1) // 2 + 1):
        h = hankel(a, k + 1)
        if determinant(h) == 0:
            if determinant(hankel(a, k)) == 0:
                return None
            return _kernel_measure(a, k)
    return None


def default_grid() -> list[Fraction]:
    halves = [Fraction(n, 2) for n in range(0, 17)]
    quarters = [Fraction(n, 4) for n in range(1, 8, 2)]
    return sorted(set(halves + quarters))


def representing_measure_window(
    seq: Sequence, grid: Sequence | None = None
) -> AtomicMeasure | None:
    """An atomic measure on [0, inf) whose moments are exactly the window, or None.

    Uses at most ceil(len/2) atoms. Strategies in order: the forced solution
    of a rank-deficient window, the principal (Gauss type) solution of an
    even window, and for odd windows every solution having one atom on the
    grid (the remaining atoms must come out rational). Any solution with all
    atoms on the grid is among the latter. None means nothing was found, not
    that no measure exists.
    """
    a = [Fraction(v) for v in _finite(seq)]
    if not a or a[0] <= 0 or not is_stieltjes(a):
        return None
    if len(a) == 1:
        return AtomicMeasure.dirac(1, a[0])
    forced = unique_representing_measure(a)
    if forced is not None:
        return forced
    grid = [Fraction(g) for g in (grid if grid is not None else default_grid())]
    if len(a) % 2 == 0:
        found = _kernel_measure(a, len(a) // 2)
        if found is not None:
            return found
    else:
        found = _anchored(a, grid)
        if found is not None:
            return found
    return None


def _anchored(a: list, grid: Sequence[Fraction]):
    """Odd window a_0..a_{2k}: one atom fixed at a grid point, k atoms free."""
    k = (len(a) - 1) // 2
    h = hankel(a, k + 1)
    for t0 in grid:
        v = [t0**i for i in range(k + 1)]
        try:
            u = solve(h, v)
        except SingularMatrix:
            return None
        s = sum(x * y for x, y in zip(u, v))
        if s <= 0:
            continue
        roots = rational_roots(u)
        if len(roots) != k or t0 in roots:
            continue
        atoms = sorted([t0] + roots)
        found = _matches(atoms, _weights(atoms, a), a)
        if found is not None:
            return found
    return None
