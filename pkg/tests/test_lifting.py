from fractions import Fraction

from subnormal.consistency import Family, generate_fixed_point_example, verify_cc
from subnormal.gallery import consistent_fixtures
from subnormal.lifting import (
    build_lift,
    lift_to_json,
    lifted_derivative,
    pullback,
    verify_lift_derivative,
    verify_lift_quasinormal,
)
from subnormal.moments import AtomicMeasure
from subnormal.mspace import MeasureSpace, SelfMap

F = Fraction


def test_lift_of_mixed_chain():
    theta = AtomicMeasure.of([(2, F(1, 2)), (3, F(1, 2))])
    ex = generate_fixed_point_example(theta, F(1, 2), 5)
    product = build_lift(ex.space, ex.map, ex.family)
    h = lifted_derivative(product)
    assert h[(0, F(1))] == 1
    assert h[(2, F(3))] == 3
    assert all(t == value for (_, t), value in h.items())
    assert verify_lift_derivative(product)
    assert verify_lift_quasinormal(product)


def test_lift_fails_for_inconsistent_family():
    space = MeasureSpace.from_masses({0: 1, 1: 1})
    phi = SelfMap({0: 0, 1: 0})
    # h(0) = 2 but P(0) = delta_1
    family = Family({0: AtomicMeasure.dirac(1), 1: AtomicMeasure.dirac(1)})
    assert not verify_cc(space, phi, family)
    check = verify_lift_derivative(build_lift(space, phi, family))
    assert not check and check.witness["x"] == 0


def test_pullback_is_isometric():
    for fx in consistent_fixtures():
        product = build_lift(fx.space, fx.map, fx.family)

        def f(x):
            return F(x + 2, 3)

        lifted = pullback(product, f)
        norm_base = sum(f(x) ** 2 * fx.space.mass[x] for x in fx.space.points)
        norm_lift = sum(v**2 * product.space.mass[i] for i, v in lifted.items())
        assert norm_base == norm_lift, fx.name


def test_lift_json_rows():
    fx = consistent_fixtures()[1]
    rows = lift_to_json(build_lift(fx.space, fx.map, fx.family))
    assert rows[0] == {"x": 0, "t": "2", "rho": "1", "phi_image": [0, "2"], "h": "2"}
