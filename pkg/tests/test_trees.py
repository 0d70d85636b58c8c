from fractions import Fraction

import pytest

from subnormal.consistency import Family, Status, verify_cc
from subnormal.moments import AtomicMeasure
from subnormal.mspace import derivative_table, norm_squared_upper
from subnormal.trees import (
    BoundaryIncomplete,
    NotRepresenting,
    SizeOverflow,
    TreeProfile,
    WeightedTree,
    WindowExceeded,
    materialize_tree,
    regular_weighted_tree,
    shift_to_composition,
    tree_bounds,
    tree_derivative,
    tree_family,
    tree_subnormal,
    verify_shift_consistency,
)

F = Fraction


def test_kappa_hat_both_directions():
    p = TreeProfile.build(-2, 3, {-2: 3, -1: 2, 0: 5, 1: 7, 2: 1}, 1)
    assert p.kappa_hat(0) == 1
    assert p.kappa_hat(2) == 35
    assert p.kappa_hat(-1) == F(1, 2)
    assert p.kappa_hat(-2) == F(1, 6)


def test_tree_derivative_matches_slice():
    p = TreeProfile.build(-1, 5, lambda m: m % 2 + 2, lambda m: F(1, m + 3))
    sl = materialize_tree(p, 3, anchor=0)
    table = derivative_table(sl.space, sl.map, 2)
    for v, m in sl.generation.items():
        for n in range(3):
            if table.exact(n, v):
                assert table[n, v] == tree_derivative(p, n, m)


def test_window_limits():
    p = TreeProfile.build(-1, 3, 2, 1)
    with pytest.raises(WindowExceeded):
        tree_derivative(p, 4, 0)
    with pytest.raises(WindowExceeded):
        materialize_tree(p, 4)
    with pytest.raises(SizeOverflow):
        materialize_tree(TreeProfile.build(0, 20, 3, 1), 12, budget=1000)


def test_profile_validation():
    with pytest.raises(ValueError):
        TreeProfile.build(1, 3, 2, 1)
    with pytest.raises(ValueError):
        TreeProfile.build(0, 3, 0, 1)


def test_isometric_profile():
    p = TreeProfile.build(-3, 6, 2, lambda m: F(2) ** -m)
    verdict = tree_subnormal(p)
    assert verdict.status is Status.SUBNORMAL
    assert verdict.notes["nu"] == AtomicMeasure.dirac(1)
    assert tree_bounds(p, verdict.notes["nu"]) == (1, 1, True)


def test_flat_profile_has_norm_two():
    p = TreeProfile.build(-3, 6, 2, 1)
    verdict = tree_subnormal(p)
    assert verdict.notes["nu"] == AtomicMeasure.dirac(2)
    sl = materialize_tree(p, 4)
    assert norm_squared_upper(sl.space, sl.map) == 2


def test_mixed_profile_recovers_measure():
    nu = AtomicMeasure.of([(1, F(1, 3)), (3, F(2, 3))])
    p = TreeProfile.build(-2, 6, 3, lambda m: nu.moment(m) / F(3) ** m)
    verdict = tree_subnormal(p)
    assert verdict.notes["nu"] == nu
    fam = tree_family(p, nu)
    sl = materialize_tree(p, 3, anchor=1)
    assert verify_cc(sl.space, sl.map, sl.family(fam))


def test_alternating_profile_is_not_subnormal():
    p = TreeProfile.build(-2, 6, 2, lambda m: F(1) if m % 2 == 0 else F(1, 8))
    verdict = tree_subnormal(p)
    assert verdict.status is Status.NOT_SUBNORMAL
    assert verdict.witness["kind"] == "hankel"


def test_wrong_measure_is_rejected():
    p = TreeProfile.build(-1, 4, 2, 1)
    with pytest.raises(NotRepresenting):
        tree_family(p, AtomicMeasure.dirac(3))


def test_binary_shift():
    tree = regular_weighted_tree(2, 4, F(1, 2))
    measures = {v: AtomicMeasure.dirac(1) for v in tree.vertices()}
    assert verify_shift_consistency(tree, measures)
    space, phi = shift_to_composition(tree)
    assert space.mass[0] == 1 and space.mass[1] == F(1, 2) and space.mass[3] == F(1, 4)
    assert verify_cc(space, phi, Family(measures))


def test_shift_consistency_detects_bad_weights():
    tree = regular_weighted_tree(2, 3, F(1, 3))
    measures = {v: AtomicMeasure.dirac(1) for v in tree.vertices()}
    check = verify_shift_consistency(tree, measures)
    assert not check and check.witness["vertex"] == 0


def test_shift_needs_complete_window():
    tree = WeightedTree({1: 0, 2: 1}, {1: F(1), 2: F(1)}, 0)
    with pytest.raises(BoundaryIncomplete):
        shift_to_composition(tree)


def test_shift_masses_go_both_ways():
    # anchor in the middle: its parent gets mass 1/lambda^2
    tree = WeightedTree({1: 0, 2: 1}, {1: F(4), 2: F(1, 2)}, 1, frozenset({0}), frozenset({2}))
    space, _ = shift_to_composition(tree)
    assert space.mass == {0: F(1, 4), 1: F(1), 2: F(1, 2)}
