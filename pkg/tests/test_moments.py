import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subnormal.base import INF
from subnormal.linalg import hankel, psd_witness, quadratic_form
from subnormal.moments import (
    AtomicMeasure,
    InfiniteEntry,
    MonotonicityViolation,
    TwoSidedSequence,
    carleman_determinate,
    is_stieltjes,
    is_two_sided_stieltjes,
    pushforward_power,
    rational_roots,
    replay_stieltjes_witness,
    representing_measure_window,
    stieltjes_witness,
    sup_support_from_ratios,
    unique_representing_measure,
)

from .conftest import atomic_measures

F = Fraction

# 3/10 d0 + 1/2 d1 + 1/6 d2 + 1/30 d5: found by solving the 5x5 Vandermonde
# system on the support {0, 1, 2, 5} and checked by hand against 1, 1, 2, 6, 24
FACTORIAL_WITNESS = AtomicMeasure.of([(0, F(3, 10)), (1, F(1, 2)), (2, F(1, 6)), (5, F(1, 30))])


def test_measure_arithmetic():
    m = AtomicMeasure.of([(2, F(1, 2)), (1, F(1, 4)), (2, F(1, 4))])
    assert m.atoms == ((1, F(1, 4)), (2, F(3, 4)))
    assert m.total_mass() == 1
    assert m.moment(2) == F(1, 4) + 3
    assert m.moment(-1) == F(1, 4) + F(3, 8)
    assert m.times_power(1) == AtomicMeasure.of([(1, F(1, 4)), (2, F(3, 2))])
    assert (m + AtomicMeasure.dirac(1)).mass_at(1) == F(5, 4)
    assert pushforward_power(m, 2).support_max() == 4


def test_negative_moment_needs_no_atom_at_zero():
    with pytest.raises(ZeroDivisionError):
        AtomicMeasure.dirac(0).moment(-1)


def test_measure_rejects_bad_atoms():
    with pytest.raises(ValueError):
        AtomicMeasure(((F(-1), F(1)),))
    with pytest.raises(ValueError):
        AtomicMeasure(((F(1), F(0)),))


def test_factorial_oracle_is_a_measure():
    assert FACTORIAL_WITNESS.moments(5) == [1, 1, 2, 6, 24]


def test_factorial_window_is_stieltjes():
    assert is_stieltjes([1, 1, 2, 6, 24])
    assert carleman_determinate([math.factorial(n) for n in range(30)])


def test_factorial_window_has_no_small_atomic_solution():
    # the representing measures with at most 3 atoms have irrational support
    assert representing_measure_window([1, 1, 2, 6, 24]) is None


def test_non_stieltjes_witness_replays():
    w = stieltjes_witness([1, 2, 1])
    assert w is not None and w["hankel"] == "plain"
    assert replay_stieltjes_witness([1, 2, 1], w)
    assert not replay_stieltjes_witness([1, 2, 5], w)


def test_shifted_window_can_fail_alone():
    # (1, 0; 0, 1) is fine, (0, 1; 1, 0) is not
    w = stieltjes_witness([1, 0, 1, 0])
    assert w is not None and w["hankel"] == "shifted"


def test_infinite_entry():
    with pytest.raises(InfiniteEntry):
        is_stieltjes([1, INF])


def test_psd_witness_on_known_matrices():
    assert psd_witness(hankel([1, 1, 2], 2)) is None
    vec = psd_witness([[F(1), F(2)], [F(2), F(1)]])
    assert quadratic_form([[F(1), F(2)], [F(2), F(1)]], vec) < 0


def test_two_sided_sequence():
    # moments of delta_2 over m = -2..3
    good = TwoSidedSequence(-2, tuple(F(2) ** m for m in range(-2, 4)))
    assert is_two_sided_stieltjes(good)
    bad = TwoSidedSequence(-1, (F(1), F(1), F(4), F(1)))
    assert not is_two_sided_stieltjes(bad)


def test_ratio_bound():
    rb = sup_support_from_ratios(AtomicMeasure.dirac(2).moments(8))
    assert rb.value == 2 and rb.increasing_verified
    with pytest.raises(MonotonicityViolation):
        sup_support_from_ratios([1, 3, 4])


def test_carleman_cases():
    assert carleman_determinate([F(2) ** n for n in range(20)])
    assert not carleman_determinate([math.exp(n * n / 2) for n in range(20)])
    # too short to say anything
    assert not carleman_determinate([1, 1, 1])


def test_rational_roots():
    # (t - 1/2)(t - 3)(t^2 + 1)
    coeffs = [F(3, 2), F(-7, 2), F(5, 2), F(-7, 2), F(1)]
    assert rational_roots(coeffs) == [F(1, 2), F(3)]
    assert rational_roots([0, 0, 1]) == [0]
    assert rational_roots([2, 0, -1]) == []


def test_forced_measure():
    nu = AtomicMeasure.of([(1, F(1, 3)), (4, F(2, 3))])
    assert unique_representing_measure(nu.moments(7)) == nu


def test_window_measure_for_even_window():
    nu = AtomicMeasure.of([(F(1, 3), F(1, 2)), (F(7, 2), F(1, 2))])
    assert representing_measure_window(nu.moments(4)) == nu


@settings(max_examples=60, deadline=None)
@given(atomic_measures(max_atoms=4, allow_zero=True), st.integers(min_value=1, max_value=10))
def test_moments_of_measures_are_stieltjes(nu, length):
    assert is_stieltjes(nu.moments(length))


@settings(max_examples=40, deadline=None)
@given(atomic_measures(max_atoms=3))
def test_window_measure_reproduces_moments(nu):
    seq = nu.moments(2 * len(nu) + 1)
    found = representing_measure_window(seq)
    assert found == nu


@settings(max_examples=40, deadline=None)
@given(atomic_measures(max_atoms=3), st.integers(min_value=1, max_value=4))
def test_pushforward_power_moments(nu, j):
    pushed = pushforward_power(nu, j)
    assert pushed.moments(4) == [nu.moment(j * n) for n in range(4)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=-5, max_value=5), min_size=2, max_size=7))
def test_witness_always_replays(values):
    seq = [F(v) for v in values]
    w = stieltjes_witness(seq)
    if w is not None:
        assert replay_stieltjes_witness(seq, w)
