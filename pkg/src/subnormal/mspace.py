"""Discrete measure spaces, self-maps and Radon-Nikodym derivatives of iterates.

A finite window of a (possibly infinite) discrete system is described by a
``MeasureSpace`` and a ``SelfMap``. Two kinds of truncation are tracked on the
map:

* ``boundary`` points have preimages that were cut off by the window, so
  their derivatives are only known up to a certain order;
* ``exits`` are points whose image lies outside the window.

Every check in the package skips quantities that the truncation makes
unknowable instead of guessing them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .base import INF, Check, ext_div, ext_mul, is_inf, to_number

PointId = int


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    points: tuple[PointId, ...]
    mass: Mapping[PointId, Fraction]

    def __post_init__(self):
        pts = tuple(self.points)
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate point ids")
        masses = {}
        for p in pts:
            if p not in self.mass:
                raise ValueError(f"point {p} has no mass")
            m = to_number(self.mass[p])
            if m < 0:
                raise ValueError(f"negative mass at point {p}")
            if is_inf(m):
                raise ValueError(f"infinite mass at point {p}")
            masses[p] = m
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "mass", masses)

    @classmethod
    def from_masses(cls, masses: Mapping[PointId, object]) -> "MeasureSpace":
        return cls(tuple(masses), dict(masses))

    def measure(self, subset: Iterable[PointId]) -> Fraction:
        return sum((self.mass[p] for p in subset), Fraction(0))

    def positive(self) -> list[PointId]:
        return [p for p in self.points if self.mass[p] > 0]

    def __contains__(self, p) -> bool:
        return p in self.mass

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class SelfMap:
    image: Mapping[PointId, PointId]
    boundary: frozenset = field(default_factory=frozenset)
    exits: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "image", dict(self.image))
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        object.__setattr__(self, "exits", frozenset(self.exits))
        clash = self.exits & set(self.image)
        if clash:
            raise ValueError(f"exit points must not have an image: {sorted(clash)}")
        pre: dict[PointId, list[PointId]] = {}
        for x, y in self.image.items():
            pre.setdefault(y, []).append(x)
        object.__setattr__(self, "_pre", {k: tuple(sorted(v)) for k, v in pre.items()})

    def __call__(self, x: PointId) -> PointId:
        return self.image[x]

    def preimage(self, x: PointId) -> tuple[PointId, ...]:
        return self._pre.get(x, ())

    def check_total(self, space: MeasureSpace) -> None:
        for p in space.points:
            if p in self.exits:
                continue
            if p not in self.image:
                raise ValueError(f"map undefined at point {p}")
            if self.image[p] not in space:
                raise ValueError(f"image of {p} is not a point of the space")
        extra = (set(self.image) | self.boundary | self.exits) - set(space.points)
        if extra:
            raise ValueError(f"map mentions unknown points {sorted(extra)}")

    @property
    def truncated(self) -> bool:
        return bool(self.boundary or self.exits)

    def iterate(self, n: int, space: MeasureSpace) -> "SelfMap":
        """The n-fold composite, with its own truncation sets."""
        if n < 0:
            raise ValueError("negative iterate")
        depth = exact_depth(space, self, n)
        image, exits = {}, set()
        for x in space.points:
            y = x
            for _ in range(n):
                if y in self.exits:
                    y = None
                    break
                y = self.image[y]
            if y is None:
                exits.add(x)
            else:
                image[x] = y
        boundary = {x for x in space.points if depth[x] < n}
        return SelfMap(image, boundary, exits)


def exact_depth(space: MeasureSpace, phi: SelfMap, cap: int) -> dict[PointId, float]:
    """Largest n (up to ``cap``, else inf) such that h of the n-th iterate is exact at x.

    A boundary point has depth 0; otherwise depth is one more than the
    minimum over its preimages.
    """
    depth = {x: (0 if x in phi.boundary else INF) for x in space.points}
    for _ in range(cap + 1):
        changed = False
        for x in space.points:
            if x in phi.boundary:
                continue
            pre = phi.preimage(x)
            d = 1 + min((depth[y] for y in pre), default=INF)
            if d < depth[x]:
                depth[x] = d
                changed = True
        if not changed:
            break
    return depth


def check_nonsingular(space: MeasureSpace, phi: SelfMap) -> Check:
    """A discrete map is nonsingular iff null points have null preimages."""
    phi.check_total(space)
    for x in space.points:
        if space.mass[x] == 0:
            heavy = [y for y in phi.preimage(x) if space.mass[y] > 0]
            if heavy:
                return Check.failed(
                    "positive-mass preimage of a null point",
                    {"point": x, "preimage": heavy[0]},
                )
    return Check.passed()


class DerivativeTable:
    """Values h[n][x] for the iterates 0..order, plus exactness bookkeeping."""

    def __init__(self, space: MeasureSpace, phi: SelfMap, order: int):
        self.space = space
        self.map = phi
        self.order = order
        self.values: list[dict[PointId, Fraction]] = []
        self.depth = exact_depth(space, phi, order)
        fiber = dict(space.mass)
        for n in range(order + 1):
            self.values.append(
                {x: ext_div(fiber[x], space.mass[x]) for x in space.points}
            )
            fiber = {
                x: sum((fiber[y] for y in phi.preimage(x)), Fraction(0))
                for x in space.points
            }

    def __getitem__(self, key) -> Fraction:
        n, x = key
        return self.values[n][x]

    def exact(self, n: int, x: PointId) -> bool:
        return n <= self.depth[x]

    def window(self, x: PointId) -> list[Fraction]:
        """The exactly known part of n -> h_n(x)."""
        top = self.order if is_inf(self.depth[x]) else min(self.order, int(self.depth[x]))
        return [self.values[n][x] for n in range(top + 1)]


def derivative_table(space: MeasureSpace, phi: SelfMap, order: int) -> DerivativeTable:
    check = check_nonsingular(space, phi)
    if not check:
        raise ValueError(f"map is singular: {check.witness}")
    return DerivativeTable(space, phi, order)


def conditional_expectation(
    space: MeasureSpace, phi: SelfMap, f: Mapping[PointId, Fraction]
) -> dict[PointId, Fraction]:
    """Fiberwise mass-weighted average of f; 1 on null fibers.

    Fibers above boundary points and exit points are omitted since they are
    not fully known.
    """
    out = {}
    for z in set(phi.image.values()):
        if z in phi.boundary:
            continue
        fib = phi.preimage(z)
        total = space.measure(fib)
        if total == 0:
            val = Fraction(1)
        else:
            val = sum((ext_mul(f[y], space.mass[y]) for y in fib), Fraction(0)) / total
        for y in fib:
            out[y] = val
    return out


def fiber_average(
    space: MeasureSpace, phi: SelfMap, f: Mapping[PointId, Fraction], x: PointId
) -> Fraction:
    """(E(f) o phi^{-1})(x): the average of f over the fiber above x, 0 if null."""
    fib = phi.preimage(x)
    total = space.measure(fib)
    if total == 0:
        return Fraction(0)
    return sum((ext_mul(f[y], space.mass[y]) for y in fib), Fraction(0)) / total


def verify_transport_identity(
    space: MeasureSpace, phi: SelfMap, f: Mapping[PointId, Fraction]
) -> Check:
    """Check int f(phi)/h(phi) dmu = int_{h>0} f dmu over complete fibers."""
    table = derivative_table(space, phi, 1)
    lhs = Fraction(0)
    for x in space.positive():
        if x in phi.exits:
            continue
        z = phi(x)
        if not table.exact(1, z):
            continue
        lhs += space.mass[x] * ext_div(f[z], table[1, z])
    rhs = sum(
        (
            ext_mul(f[z], space.mass[z])
            for z in space.points
            if table.exact(1, z) and table[1, z] > 0
        ),
        Fraction(0),
    )
    if lhs != rhs:
        return Check.failed("transport identity violated", {"lhs": lhs, "rhs": rhs})
    return Check.passed(value=lhs)


def verify_derivative_recurrence(table: DerivativeTable) -> Check:
    """h_{n+1} = h_1 * (E(h_n) o phi^{-1}) wherever both sides are exact."""
    space, phi = table.space, table.map
    for n in range(table.order):
        hn = table.values[n]
        for x in space.positive():
            if not table.exact(n + 1, x):
                continue
            rhs = ext_mul(table[1, x], fiber_average(space, phi, hn, x))
            if table[n + 1, x] != rhs:
                return Check.failed(
                    "derivative recurrence violated",
                    {"point": x, "n": n, "lhs": table[n + 1, x], "rhs": rhs},
                )
    return Check.passed()


def _exact_h(space: MeasureSpace, phi: SelfMap) -> dict[PointId, Fraction]:
    table = derivative_table(space, phi, 1)
    return {x: table[1, x] for x in space.positive() if table.exact(1, x)}


def norm_squared_upper(space: MeasureSpace, phi: SelfMap):
    """sup of h over positive-mass points (inf if unbounded)."""
    values = _exact_h(space, phi).values()
    return max(values, default=Fraction(0))


def bounded_below_constant(space: MeasureSpace, phi: SelfMap):
    """inf of h over positive-mass points: the squared lower bound of the operator."""
    values = _exact_h(space, phi).values()
    return min(values, default=INF)


def disjoint_union(components: list[tuple[MeasureSpace, SelfMap]]):
    """Relabel components onto consecutive ids.

    Returns (space, map, index) where index[new_id] = (component, old_id).
    """
    masses, image, boundary, exits, index = {}, {}, set(), set(), {}
    offset = 0
    for c, (space, phi) in enumerate(components):
        relabel = {}
        for p in space.points:
            relabel[p] = offset
            index[offset] = (c, p)
            offset += 1
        for p in space.points:
            masses[relabel[p]] = space.mass[p]
        for x, y in phi.image.items():
            image[relabel[x]] = relabel[y]
        boundary |= {relabel[p] for p in phi.boundary}
        exits |= {relabel[p] for p in phi.exits}
    return MeasureSpace.from_masses(masses), SelfMap(image, boundary, exits), index


def composite_is_identity(space: MeasureSpace, phi: SelfMap, n: int) -> bool:
    if phi.truncated:
        return False
    for x in space.points:
        y = x
        for _ in range(n):
            y = phi(y)
        if y != x:
            return False
    return True


def integrate(space: MeasureSpace, f: Callable[[PointId], Fraction]) -> Fraction:
    return sum((ext_mul(f(x), space.mass[x]) for x in space.points), Fraction(0))


def is_injective(phi: SelfMap) -> bool:
    return len(set(phi.image.values())) == len(phi.image)


__all__ = [
    "MeasureSpace",
    "SelfMap",
    "DerivativeTable",
    "check_nonsingular",
    "derivative_table",
    "conditional_expectation",
    "fiber_average",
    "verify_transport_identity",
    "verify_derivative_recurrence",
    "norm_squared_upper",
    "bounded_below_constant",
    "disjoint_union",
    "exact_depth",
    "composite_is_identity",
    "integrate",
    "is_injective",
]
