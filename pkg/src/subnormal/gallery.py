"""Ready-made discrete systems with known answers, shared by tests and the CLI."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .consistency import Family, generate_fixed_point_example
from .moments import AtomicMeasure
from .mspace import MeasureSpace, SelfMap, disjoint_union
from .trees import (
    TreeProfile,
    materialize_tree,
    regular_weighted_tree,
    shift_to_composition,
    tree_family,
)


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    space: MeasureSpace
    map: SelfMap
    family: Family | None = None


def identity(n: int = 3) -> Fixture:
    space = MeasureSpace.from_masses({i: Fraction(i + 1) for i in range(n)})
    phi = SelfMap({i: i for i in range(n)})
    return Fixture("identity", space, phi, Family({i: AtomicMeasure.dirac(1) for i in range(n)}))


def fixed_point_chain(theta: AtomicMeasure, mu1, depth: int, name: str) -> Fixture:
    ex = generate_fixed_point_example(theta, mu1, depth)
    return Fixture(name, ex.space, ex.map, ex.family)


def cycle(masses, name: str = "cycle") -> Fixture:
    n = len(masses)
    space = MeasureSpace.from_masses({i: Fraction(m) for i, m in enumerate(masses)})
    phi = SelfMap({i: (i + 1) % n for i in range(n)})
    family = None
    if len(set(space.mass.values())) == 1:
        family = Family({i: AtomicMeasure.dirac(1) for i in range(n)})
    return Fixture(name, space, phi, family)


def successor_chain(length: int, ratio=2, head_cut: bool = False) -> Fixture:
    """Injective chain 0 -> 1 -> ... with masses ratio^k; the last point exits.

    Without ``head_cut`` point 0 has no preimage at all (a one-sided orbit);
    with it the orbit may continue backwards beyond the window.
    """
    ratio = Fraction(ratio)
    space = MeasureSpace.from_masses({k: ratio**k for k in range(length)})
    phi = SelfMap(
        {k: k + 1 for k in range(length - 1)},
        boundary={0} if head_cut else (),
        exits={length - 1},
    )
    family = None
    if head_cut:
        # h = 1/ratio everywhere it is known
        family = Family({k: AtomicMeasure.dirac(1 / ratio) for k in range(length)})
    return Fixture("bilateral-window" if head_cut else "one-sided-chain", space, phi, family)


def tree_slice(profile: TreeProfile, nu: AtomicMeasure, depth: int, name: str) -> Fixture:
    sl = materialize_tree(profile, depth)
    return Fixture(name, sl.space, sl.map, sl.family(tree_family(profile, nu)))


def shift_fixture(branching: int, depth: int, lambda2, atom, name: str) -> Fixture:
    tree = regular_weighted_tree(branching, depth, lambda2)
    space, phi = shift_to_composition(tree)
    family = Family({v: AtomicMeasure.dirac(atom) for v in space.points})
    return Fixture(name, space, phi, family)


def consistent_fixtures() -> list[Fixture]:
    """Systems together with a family that passes the consistency check."""
    half = Fraction(1, 2)
    mixed = AtomicMeasure.of([(1, half), (2, half)])
    fixtures = [
        identity(),
        fixed_point_chain(AtomicMeasure.dirac(2), 1, 8, "chain-delta2"),
        fixed_point_chain(AtomicMeasure.of([(2, half), (3, half)]), 1, 10, "chain-mixed"),
        fixed_point_chain(AtomicMeasure.dirac(2), half, 8, "chain-eps-half"),
        fixed_point_chain(
            AtomicMeasure.of([(2, Fraction(1, 3)), (3, Fraction(1, 3)), (5, Fraction(1, 3))]),
            Fraction(12, 7),
            10,
            "chain-three-atoms",
        ),
        tree_slice(TreeProfile.build(-2, 6, 2, 1), AtomicMeasure.dirac(2), 4, "tree-flat"),
        tree_slice(
            TreeProfile.build(-2, 6, 2, lambda m: Fraction(2) ** -m),
            AtomicMeasure.dirac(1),
            4,
            "tree-isometric",
        ),
        tree_slice(
            TreeProfile.build(-2, 6, 2, lambda m: mixed.moment(m) / Fraction(2) ** m),
            mixed,
            4,
            "tree-mixed",
        ),
        shift_fixture(2, 4, half, 1, "shift-binary"),
        shift_fixture(1, 6, 2, 2, "shift-path"),
        cycle([3, 3, 3, 3], "cycle-equal"),
        successor_chain(7, head_cut=True),
    ]
    a = fixtures[0]
    b = fixtures[1]
    space, phi, index = disjoint_union([(a.space, a.map), (b.space, b.map)])
    fam = {}
    for new, (c, old) in index.items():
        fam[new] = (a.family if c == 0 else b.family)[old]
    fixtures.append(Fixture("union", space, phi, Family(fam)))
    return fixtures
