from fractions import Fraction

import pytest
from hypothesis import given, settings

from subnormal.consistency import (
    Family,
    MassOverflow,
    NotQuasinormal,
    SpecViolation,
    Status,
    check_fixed_point_support,
    decide_subnormal_discrete,
    generate_fixed_point_example,
    local_consistency_step,
    quasinormal_family,
    replay_certificate,
    verify_cc,
    verify_cc_power,
    verify_domain_inequality,
    verify_expectation_invariance,
    verify_moment_identity,
    verify_scc,
    verify_scc_consequences,
)
from subnormal.gallery import consistent_fixtures
from subnormal.moments import AtomicMeasure
from subnormal.mspace import MeasureSpace, SelfMap, derivative_table

from .conftest import finite_systems

F = Fraction
HALF = F(1, 2)


def mixed_chain():
    theta = AtomicMeasure.of([(2, HALF), (3, HALF)])
    return generate_fixed_point_example(theta, F(1, 2), 6)


def test_fixed_point_masses_and_family():
    ex = generate_fixed_point_example(AtomicMeasure.dirac(2), 1, 5)
    assert [ex.space.mass[k] for k in range(6)] == [1, 1, 2, 4, 8, 16]
    assert ex.family[0] == AtomicMeasure.dirac(2)
    assert ex.family[3] == AtomicMeasure.dirac(2)
    assert ex.alpha == 1 and ex.epsilon == 0
    assert ex.norm_squared == 2


def test_mixed_chain_has_slack_at_the_fixed_point():
    ex = mixed_chain()
    # alpha = 1/2 * 1 + 1/2 * 1/2, eps = 1 - mu1 * alpha
    assert ex.alpha == F(3, 4)
    assert ex.epsilon == F(5, 8)
    assert ex.family[0] == AtomicMeasure.of([(1, F(5, 8)), (2, F(1, 4)), (3, F(1, 8))])


def test_fixed_point_generator_rejects_bad_input():
    with pytest.raises(SpecViolation):
        generate_fixed_point_example(AtomicMeasure.dirac(1), 1, 4)
    with pytest.raises(SpecViolation):
        generate_fixed_point_example(AtomicMeasure.dirac(2), 2, 4)
    with pytest.raises(SpecViolation):
        generate_fixed_point_example(AtomicMeasure.dirac(2, HALF), 1, 4)


def test_mixed_chain_satisfies_cc_but_not_scc():
    ex = mixed_chain()
    assert verify_cc(ex.space, ex.map, ex.family)
    assert verify_cc(ex.space, ex.map, ex.family, form="ii")
    scc = verify_scc(ex.space, ex.map, ex.family)
    # a fixed point forces P(0) = delta at h(0)
    assert not scc and scc.witness["point"] == 0
    assert check_fixed_point_support(ex.space, ex.map, ex.family)


def test_mixed_chain_powers():
    ex = mixed_chain()
    for j in (2, 3):
        assert verify_cc_power(ex.space, ex.map, ex.family, j)


def test_expected_table_matches_derivatives():
    ex = mixed_chain()
    table = derivative_table(ex.space, ex.map, ex.depth)
    for (n, k), value in ex.expected.items():
        assert table.exact(n, k)
        assert table[n, k] == value
    assert verify_moment_identity(ex.space, ex.map, ex.family, table)


def test_expectation_invariance_fails_off_the_quasinormal_case():
    ex = mixed_chain()
    table = derivative_table(ex.space, ex.map, 4)
    assert not verify_expectation_invariance(table)


def test_quasinormal_family():
    ex = generate_fixed_point_example(AtomicMeasure.dirac(2), 1, 6)
    fam = quasinormal_family(ex.space, ex.map)
    assert verify_scc(ex.space, ex.map, fam)
    with pytest.raises(NotQuasinormal) as info:
        quasinormal_family(mixed_chain().space, mixed_chain().map)
    assert info.value.witness["point"] == 1


def test_scc_consequences_on_a_quasinormal_chain():
    ex = generate_fixed_point_example(AtomicMeasure.dirac(3), 2, 8)
    fam = quasinormal_family(ex.space, ex.map)
    assert verify_scc_consequences(ex.space, ex.map, fam, 3)


def test_scc_reports_first_bad_point():
    space = MeasureSpace.from_masses({0: 1, 1: 1, 2: 1})
    phi = SelfMap({0: 1, 1: 1, 2: 0})
    fam = Family({x: AtomicMeasure.dirac(1) for x in range(3)})
    # h(1) = 2, so P(0) would need mass 1/2
    check = verify_scc(space, phi, fam)
    assert not check and check.witness["point"] == 0


def test_local_step():
    space = MeasureSpace.from_masses({0: 1, 1: 2, 2: 1})
    phi = SelfMap({0: 0, 1: 0, 2: 0})
    children = {0: AtomicMeasure.dirac(4), 1: AtomicMeasure.dirac(4), 2: AtomicMeasure.dirac(8)}
    measure, eps = local_consistency_step(space, phi, 0, children)
    # 1/4 * 1/1 + 1/4 * 2 + 1/8 = 7/8
    assert eps == F(1, 8)
    assert measure == AtomicMeasure.of([(0, F(1, 8)), (4, F(3, 4)), (8, F(1, 8))])
    with pytest.raises(MassOverflow):
        local_consistency_step(space, phi, 0, {y: AtomicMeasure.dirac(1) for y in range(3)})


def test_family_needs_probabilities():
    with pytest.raises(ValueError):
        Family({0: AtomicMeasure.dirac(1, HALF)})


def test_gallery_is_consistent_in_both_forms():
    for fx in consistent_fixtures():
        assert verify_cc(fx.space, fx.map, fx.family), fx.name
        assert verify_cc(fx.space, fx.map, fx.family, form="ii"), fx.name


def test_decide_on_gallery():
    for fx in consistent_fixtures():
        verdict = decide_subnormal_discrete(fx.space, fx.map, 12)
        assert verdict.status is Status.SUBNORMAL, fx.name
        assert replay_certificate(fx.space, fx.map, verdict), fx.name


def test_decide_finds_zero_derivative():
    space = MeasureSpace.from_masses({0: 1, 1: 1})
    verdict = decide_subnormal_discrete(space, SelfMap({0: 1, 1: 1}), 4)
    assert verdict.status is Status.NOT_SUBNORMAL
    assert verdict.witness["kind"] == "zero-derivative" and verdict.witness["point"] == 0
    assert replay_certificate(space, SelfMap({0: 1, 1: 1}), verdict)


def test_decide_finds_hankel_witness():
    space = MeasureSpace.from_masses({0: 1, 1: 2, 2: 4})
    phi = SelfMap({0: 1, 1: 2, 2: 0})
    verdict = decide_subnormal_discrete(space, phi, 8)
    assert verdict.status is Status.NOT_SUBNORMAL
    assert verdict.witness["kind"] == "hankel"
    assert replay_certificate(space, phi, verdict)


def test_decide_singular_is_inconclusive():
    space = MeasureSpace.from_masses({0: 0, 1: 1})
    verdict = decide_subnormal_discrete(space, SelfMap({0: 0, 1: 0}), 4)
    assert verdict.status is Status.INCONCLUSIVE


def test_verdict_json_has_certificate():
    fx = consistent_fixtures()[1]
    doc = decide_subnormal_discrete(fx.space, fx.map, 6).as_dict()
    assert doc["status"] == "Subnormal"
    assert doc["certificate"]["measures"]["0"] == [{"t": "2", "w": "1"}]


@settings(max_examples=40, deadline=None)
@given(finite_systems(max_points=8))
def test_subnormal_verdicts_always_replay(system):
    space, phi = system
    verdict = decide_subnormal_discrete(space, phi, 6)
    assert replay_certificate(space, phi, verdict)


@settings(max_examples=40, deadline=None)
@given(finite_systems())
def test_domain_inequality_holds_when_subnormal(system):
    space, phi = system
    verdict = decide_subnormal_discrete(space, phi, 4)
    if verdict.status is Status.SUBNORMAL:
        table = derivative_table(space, phi, 4)
        for n in range(5):
            assert verify_domain_inequality(table, n)


@settings(max_examples=40, deadline=None)
@given(finite_systems())
def test_scc_implies_cc(system):
    # the quasinormal family, when it exists, is the natural strong candidate
    space, phi = system
    try:
        fam = quasinormal_family(space, phi)
    except NotQuasinormal:
        return
    table = derivative_table(space, phi, 1)
    if any(table[1, x] == 0 for x in space.points):
        return
    if verify_scc(space, phi, fam):
        assert verify_cc(space, phi, fam)


@settings(max_examples=40, deadline=None)
@given(finite_systems())
def test_forms_agree_on_complete_spaces(system):
    space, phi = system
    verdict = decide_subnormal_discrete(space, phi, 6)
    if verdict.family is not None:
        assert verify_cc(space, phi, verdict.family, form="ii")
