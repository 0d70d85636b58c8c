"""Orbit structure of injective maps and subnormality per orbit type.

An injective map splits the space into orbits of three kinds: a one-sided
chain starting at a point outside the range (type I), a two-sided chain
(type II) and a finite cycle (type III). In a finite window a chain whose
head lies on the truncation boundary cannot be told apart from type II.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .base import Check
from .consistency import Family, Status, Verdict, decide_subnormal_discrete, verify_cc
from .moments import AtomicMeasure
from .mspace import (
    MeasureSpace,
    PointId,
    SelfMap,
    composite_is_identity,
    derivative_table,
    is_injective,
)


class NotInjective(ValueError):
    pass


class NotARoot(ValueError):
    pass


class OrbitKind(str, enum.Enum):
    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"
    UNKNOWN = "?"


@dataclass(frozen=True)
class OrbitComponent:
    kind: OrbitKind
    points: tuple[PointId, ...]   # in the order of the forward orbit


def decompose_orbits(space: MeasureSpace, phi: SelfMap, assume_bilateral: bool = False):
    """Split an injective map into orbits, ordered by their smallest point.

    Chains run from head to tail; cycles start at their smallest point.
    A chain whose head is a boundary point is UNKNOWN unless
    ``assume_bilateral`` says the orbit continues backwards forever.
    """
    phi.check_total(space)
    if not is_injective(phi):
        raise NotInjective("two points share an image")
    seen: set[PointId] = set()
    comps = []
    for start in sorted(space.points):
        if start in seen:
            continue
        cyc = _on_cycle(phi, start)
        if cyc is not None:
            i = cyc.index(min(cyc))
            comps.append(OrbitComponent(OrbitKind.TYPE_III, tuple(cyc[i:] + cyc[:i])))
        else:
            head = start
            while phi.preimage(head):
                head = phi.preimage(head)[0]
            pts = [head]
            while pts[-1] not in phi.exits:
                pts.append(phi(pts[-1]))
            if head in phi.boundary:
                kind = OrbitKind.TYPE_II if assume_bilateral else OrbitKind.UNKNOWN
            else:
                kind = OrbitKind.TYPE_I
            comps.append(OrbitComponent(kind, tuple(pts)))
        seen |= set(comps[-1].points)
    return comps


def _on_cycle(phi: SelfMap, x: PointId):
    path = [x]
    y = x
    while y not in phi.exits:
        y = phi(y)
        if y == x:
            return path
        if len(path) > len(phi.image):
            return None
        path.append(y)
    return None


def restrict(space: MeasureSpace, phi: SelfMap, points) -> tuple[MeasureSpace, SelfMap]:
    keep = set(points)
    sub = MeasureSpace(tuple(p for p in space.points if p in keep), {p: space.mass[p] for p in keep})
    image = {x: y for x, y in phi.image.items() if x in keep}
    return sub, SelfMap(image, phi.boundary & keep, phi.exits & keep)


def component_verdict(
    space: MeasureSpace, phi: SelfMap, comp: OrbitComponent, depth: int | None = None
) -> Verdict:
    sub, sub_map = restrict(space, phi, comp.points)
    window = {"kind": comp.kind.value, "points": len(comp.points)}
    if comp.kind is OrbitKind.TYPE_I:
        head = comp.points[0]
        if sub.mass[head] > 0:
            return Verdict(
                Status.NOT_SUBNORMAL,
                window,
                {"kind": "zero-derivative", "point": head, "h": Fraction(0)},
            )
    if comp.kind is OrbitKind.TYPE_III:
        masses = {sub.mass[p] for p in comp.points}
        if len(masses) == 1:
            family = Family({p: AtomicMeasure.dirac(1) for p in comp.points})
            if verify_cc(sub, sub_map, family):
                return Verdict(Status.SUBNORMAL, window, None, family)
        # the derivative sequence is periodic with a_m = 1, so a non-constant
        # one already breaks a Hankel window of modest size
        depth = max(depth or 0, 2 * len(comp.points) + 2)
    verdict = decide_subnormal_discrete(sub, sub_map, depth or 2 * len(comp.points))
    return Verdict(verdict.status, dict(verdict.window, **window), verdict.witness, verdict.family, verdict.notes)


def classify_space(space: MeasureSpace, phi: SelfMap, depth: int | None = None, assume_bilateral=False):
    return [
        (comp, component_verdict(space, phi, comp, depth))
        for comp in decompose_orbits(space, phi, assume_bilateral)
    ]


def _inverse_power(phi: SelfMap, x: PointId, k: int) -> PointId:
    for _ in range(k):
        (x,) = phi.preimage(x)
    return x


def verify_cycle_product(space: MeasureSpace, phi: SelfMap, n: int) -> Check:
    """If phi^n = id, the product of h along n backward steps is 1 everywhere."""
    if not composite_is_identity(space, phi, n):
        raise NotARoot(f"phi^{n} is not the identity")
    table = derivative_table(space, phi, n)
    h = {x: table[1, x] for x in space.points}
    for x in space.positive():
        prod = Fraction(1)
        for k in range(n):
            prod *= h[_inverse_power(phi, x, k)]
        if prod != 1:
            return Check.failed("cycle product differs from 1", {"point": x, "product": prod})
        if table[n, x] != 1:
            return Check.failed("h of phi^n differs from 1", {"point": x, "value": table[n, x]})
    return Check.passed()


def analyze_root_of_identity(space: MeasureSpace, phi: SelfMap, n: int) -> dict:
    """Report on a map with phi^n = id: subnormal iff unitary iff h = 1."""
    product = verify_cycle_product(space, phi, n)
    table = derivative_table(space, phi, 1)
    unitary = all(table[1, x] == 1 for x in space.positive())
    verdicts = [component_verdict(space, phi, c) for c in decompose_orbits(space, phi)]
    subnormal = all(v.status is Status.SUBNORMAL for v in verdicts)
    return {
        "order": n,
        "bijective": True,
        "cycle_product": product.ok,
        "unitary": unitary,
        "subnormal": subnormal,
        "involution": composite_is_identity(space, phi, 2),
        "consistent": subnormal == unitary,
    }
