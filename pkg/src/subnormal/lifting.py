"""Lift a consistent family to the product X x [0, inf).

The lifted space carries rho(x, t) = mu(x) P(x, {t}) and the map
(x, t) -> (phi(x), t). Its derivative is the second coordinate exactly
when the family is consistent, which makes the lifted operator quasinormal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .base import Check, fmt, jsonable
from .consistency import Family
from .mspace import (
    MeasureSpace,
    PointId,
    SelfMap,
    check_nonsingular,
    derivative_table,
)


@dataclass(frozen=True, eq=False)
class ProductSpace:
    space: MeasureSpace           # integer-labelled copy of the product
    map: SelfMap                  # the lifted map on those labels
    labels: Mapping[int, tuple]   # label -> (x, t)
    base: MeasureSpace
    base_map: SelfMap

    def label(self, x: PointId, t) -> int | None:
        return self._index.get((x, t))

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: k for k, v in self.labels.items()})


def build_lift(space: MeasureSpace, phi: SelfMap, family: Family) -> ProductSpace:
    """Product points with positive weight, plus their images so the map is total."""
    family.covers(space)
    pairs = {}
    for x in space.points:
        for t, w in family[x]:
            rho = space.mass[x] * w
            if rho > 0:
                pairs[x, t] = rho
    frontier = list(pairs)
    while frontier:
        x, t = frontier.pop()
        if x in phi.exits:
            continue
        key = (phi(x), t)
        if key not in pairs:
            pairs[key] = space.mass[key[0]] * family[key[0]].mass_at(t)
            frontier.append(key)
    ordered = sorted(pairs)
    labels = {i: p for i, p in enumerate(ordered)}
    index = {p: i for i, p in labels.items()}
    image, boundary, exits = {}, set(), set()
    for i, (x, t) in labels.items():
        if x in phi.exits:
            exits.add(i)
        else:
            image[i] = index[phi(x), t]
        if x in phi.boundary:
            boundary.add(i)
    lifted = MeasureSpace.from_masses({i: pairs[labels[i]] for i in labels})
    return ProductSpace(lifted, SelfMap(image, boundary, exits), labels, space, phi)


def lifted_derivative(product: ProductSpace) -> dict:
    """h of the lifted map at every positive-weight product point with a known fiber."""
    table = derivative_table(product.space, product.map, 1)
    return {
        product.labels[i]: table[1, i]
        for i in product.space.positive()
        if table.exact(1, i)
    }


def verify_lift_derivative(product: ProductSpace) -> Check:
    """h of the lifted map equals t at every positive-weight point."""
    nonsing = check_nonsingular(product.space, product.map)
    if not nonsing:
        i = nonsing.witness["preimage"]
        return Check.failed("lifted map is singular", {"point": product.labels[i]})
    for (x, t), h in sorted(lifted_derivative(product).items()):
        if h != t:
            return Check.failed("lifted derivative differs from t", {"x": x, "t": t, "h": h})
    return Check.passed()


def verify_lift_quasinormal(product: ProductSpace) -> Check:
    """h of the lifted map is invariant under the lifted map."""
    nonsing = check_nonsingular(product.space, product.map)
    if not nonsing:
        return Check.failed("lifted map is singular", nonsing.witness)
    table = derivative_table(product.space, product.map, 1)
    for i in product.space.positive():
        if i in product.map.exits:
            continue
        j = product.map(i)
        if not (table.exact(1, i) and table.exact(1, j)):
            continue
        if table[1, i] != table[1, j]:
            x, t = product.labels[i]
            return Check.failed(
                "lifted derivative not invariant",
                {"x": x, "t": t, "h": table[1, i], "h_next": table[1, j]},
            )
    return Check.passed()


def pullback(product: ProductSpace, f: Callable[[PointId], Fraction]) -> dict:
    """The isometric embedding f -> f(x) into functions on the product."""
    return {i: f(x) for i, (x, _) in product.labels.items()}


def lift_to_json(product: ProductSpace) -> list[dict]:
    table = derivative_table(product.space, product.map, 1)
    rows = []
    for i in sorted(product.labels):
        x, t = product.labels[i]
        rows.append({
            "x": x,
            "t": fmt(t),
            "rho": fmt(product.space.mass[i]),
            "phi_image": (
                None if i in product.map.exits
                else [product.labels[product.map(i)][0], fmt(t)]
            ),
            "h": fmt(table[1, i]) if table.exact(1, i) else None,
        })
    return jsonable(rows)
