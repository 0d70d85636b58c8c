"""Families of probability measures indexed by points, and the consistency
conditions that certify subnormality of a discrete composition operator.

The plain consistency condition at a point x with a non-null fiber reads

    t P(x, dt) = sum over positive-mass preimages y of  mu(y)/mu(x) P(y, dt)

and the strong form asks for P(x, dt) = t P(phi(x), dt) / h(phi(x)).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .base import Check, jsonable
from .moments import (
    AtomicMeasure,
    carleman_determinate,
    pushforward_power,
    replay_stieltjes_witness,
    representing_measure_window,
    stieltjes_witness,
    unique_representing_measure,
)
from .mspace import (
    DerivativeTable,
    MeasureSpace,
    PointId,
    SelfMap,
    check_nonsingular,
    conditional_expectation,
    derivative_table,
)


class DivideByZero(ZeroDivisionError):
    pass


class MassOverflow(ValueError):
    pass


class SpecViolation(ValueError):
    pass


class NotQuasinormal(ValueError):
    def __init__(self, witness):
        super().__init__(f"h differs from h o phi at point {witness['point']}")
        self.witness = witness


@dataclass(frozen=True, eq=False)
class Family:
    """One probability measure per point."""

    measures: Mapping[PointId, AtomicMeasure]
    tolerance: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "measures", dict(self.measures))
        for x, m in self.measures.items():
            mass = m.total_mass()
            if self.tolerance is None and isinstance(mass, Fraction):
                if mass != 1:
                    raise ValueError(f"measure at {x} has total mass {mass}")
            elif abs(float(mass) - 1) > (self.tolerance or 1e-9):
                raise ValueError(f"measure at {x} has total mass {mass}")

    def __getitem__(self, x: PointId) -> AtomicMeasure:
        return self.measures[x]

    def __contains__(self, x) -> bool:
        return x in self.measures

    def covers(self, space: MeasureSpace) -> None:
        missing = [p for p in space.points if p not in self.measures]
        if missing:
            raise ValueError(f"family undefined at points {missing}")


def _checked_points(space: MeasureSpace, phi: SelfMap):
    """Points x with a complete, non-null fiber."""
    for x in space.points:
        if x in phi.boundary:
            continue
        if space.measure(phi.preimage(x)) > 0:
            yield x


def _heavy_preimage(space, phi, x):
    return [y for y in phi.preimage(x) if space.mass[y] > 0]


def verify_cc(space: MeasureSpace, phi: SelfMap, family: Family, form: str = "i") -> Check:
    """Consistency condition on every point with a complete non-null fiber.

    ``form="i"`` compares t P(x) with the weighted preimage sum; ``form="ii"``
    divides by t instead and also requires the preimage measures to avoid 0.
    """
    family.covers(space)
    checked = 0
    for x in _checked_points(space, phi):
        pre = _heavy_preimage(space, phi, x)
        if form == "i":
            lhs = family[x].times_power(1)
            rhs = AtomicMeasure.of(
                (t, space.mass[y] / space.mass[x] * w) for y in pre for t, w in family[y]
            )
        elif form == "ii":
            for y in pre:
                if family[y].mass_at(0):
                    return Check.failed("preimage measure charges 0", {"point": x, "preimage": y})
            lhs = family[x]
            rhs = AtomicMeasure.of(
                (t, space.mass[y] / space.mass[x] * w / t) for y in pre for t, w in family[y]
            )
        else:
            raise ValueError(f"unknown form {form!r}")
        if lhs != rhs:
            return Check.failed(
                "consistency condition violated",
                {"point": x, "lhs": _atoms(lhs), "rhs": _atoms(rhs)},
            )
        checked += 1
    return Check.passed(checked=checked)


def _atoms(m: AtomicMeasure):
    return [[t, w] for t, w in m]


def verify_scc(space: MeasureSpace, phi: SelfMap, family: Family) -> Check:
    """P(x) = t P(phi(x)) / h(phi(x)) at positive-mass points with a known image fiber."""
    family.covers(space)
    table = derivative_table(space, phi, 1)
    checked = 0
    for x in space.positive():
        if x in phi.exits:
            continue
        z = phi(x)
        if not table.exact(1, z):
            continue
        h = table[1, z]
        if h == 0:
            raise DivideByZero(f"h vanishes at phi({x}) = {z}")
        rhs = family[z].times_power(1).scaled(1 / h)
        if family[x] != rhs:
            return Check.failed(
                "strong consistency violated",
                {"point": x, "lhs": _atoms(family[x]), "rhs": _atoms(rhs)},
            )
        checked += 1
    return Check.passed(checked=checked)


def verify_moment_identity(
    space: MeasureSpace, phi: SelfMap, family: Family, table: DerivativeTable
) -> Check:
    """h_n(x) equals the n-th moment of P(x) wherever h_n(x) is exact."""
    family.covers(space)
    for x in space.positive():
        for n in range(table.order + 1):
            if not table.exact(n, x):
                break
            m = family[x].moment(n)
            if table[n, x] != m:
                return Check.failed(
                    "moment identity violated",
                    {"point": x, "n": n, "h": table[n, x], "moment": m},
                )
    return Check.passed()


def _orbit(phi: SelfMap, x: PointId, length: int) -> list[PointId]:
    out = [x]
    while len(out) <= length and out[-1] not in phi.exits:
        out.append(phi(out[-1]))
    return out


def _prod(values) -> Fraction:
    p = Fraction(1)
    for v in values:
        p *= v
    return p


def verify_scc_consequences(
    space: MeasureSpace, phi: SelfMap, family: Family, n_max: int
) -> Check:
    """Identities forced by the strong condition along forward orbits.

    Checked: no atom at 0; t^{-n} P(x) = P(phi^n x) / prod_{j<=n} h(phi^j x);
    the n-th moment of P(phi^n x) equals that product; the (-n)-th moment of
    P(x) is its inverse; and the chained inequality between the products
    over (n, 2n] and [1, n] and the n-th moment of P(x).
    """
    family.covers(space)
    table = derivative_table(space, phi, 1)
    checked = 0
    for x in space.positive():
        if family[x].mass_at(0):
            return Check.failed("atom at 0", {"point": x})
        orbit = _orbit(phi, x, 2 * n_max)
        h = []
        for z in orbit[1:]:
            if not table.exact(1, z):
                break
            h.append(table[1, z])
        for n in range(1, n_max + 1):
            if len(h) < n:
                break
            prod = _prod(h[:n])
            target = orbit[n]
            lhs = family[x].times_power(-n)
            rhs = family[target].scaled(1 / prod)
            if lhs != rhs:
                return Check.failed("t^-n P(x) mismatch", {"point": x, "n": n})
            if family[target].moment(n) != prod:
                return Check.failed("moment of P(phi^n x) mismatch", {"point": x, "n": n})
            if family[x].moment(-n) != 1 / prod:
                return Check.failed("negative moment mismatch", {"point": x, "n": n})
            if len(h) >= 2 * n:
                upper = _prod(h[n:2 * n])
                if not upper <= prod <= family[x].moment(n):
                    return Check.failed(
                        "chained inequality violated",
                        {"point": x, "n": n, "values": [upper, prod, family[x].moment(n)]},
                    )
            checked += 1
    return Check.passed(checked=checked)


def verify_expectation_invariance(table: DerivativeTable) -> Check:
    """E(h_n) = h_n for n <= order, with the equivalent product identities.

    When the invariance holds the product forms along orbits are asserted
    too; a disagreement between the two is reported as a failure.
    """
    space, phi = table.space, table.map
    pos = set(space.positive())
    for n in range(table.order + 1):
        hn = {x: table[n, x] for x in space.points}
        e = conditional_expectation(space, phi, hn)
        for x in sorted(pos & set(e)):
            fiber = phi.preimage(phi(x))
            if not all(table.exact(n, y) for y in fiber):
                continue
            if e[x] != hn[x]:
                return Check.failed(
                    "conditional expectation moves h_n",
                    {"point": x, "n": n, "h": hn[x], "E": e[x]},
                )
    h1 = {x: table[1, x] for x in space.points}
    for x in sorted(pos):
        orbit = _orbit(phi, x, table.order)
        for n in range(1, len(orbit)):
            z = orbit[n]
            hs = [h1[orbit[j]] for j in range(1, n + 1)]
            if not all(table.exact(1, orbit[j]) for j in range(1, n + 1)):
                break
            for m in range(0, table.order - n + 1):
                if not (table.exact(m + n, z) and table.exact(m, x)):
                    continue
                if table[m + n, z] != _prod(hs) * table[m, x]:
                    return Check.failed(
                        "product identity h_{m+n}(phi^n x) = prod h(phi^j x) h_m(x) fails",
                        {"point": x, "n": n, "m": m},
                    )
    return Check.passed()


def power_family(family: Family, j: int) -> Family:
    return Family({x: pushforward_power(m, j) for x, m in family.measures.items()})


def verify_cc_power(space: MeasureSpace, phi: SelfMap, family: Family, j: int) -> Check:
    """Consistency of the pushed-forward family for the j-th iterate."""
    return verify_cc(space, phi.iterate(j, space), power_family(family, j))


def verify_domain_inequality(table: DerivativeTable, n: int) -> Check:
    """sum_{j<=n} h_j(x) <= (n+1)(1 + h_n(x)) wherever h_n(x) is exact."""
    for x in table.space.positive():
        if n > table.order or not table.exact(n, x):
            continue
        lhs = sum(table[j, x] for j in range(n + 1))
        rhs = (n + 1) * (1 + table[n, x])
        if lhs > rhs:
            return Check.failed("domain inequality violated", {"point": x, "lhs": lhs, "rhs": rhs})
    return Check.passed()


def local_consistency_step(
    space: MeasureSpace,
    phi: SelfMap,
    x: PointId,
    children: Mapping[PointId, AtomicMeasure],
) -> tuple[AtomicMeasure, Fraction]:
    """Measure at x making the condition hold given measures on its preimages.

    Returns (measure, eps) where the measure is
    sum mu(y)/mu(x) t^{-1} m_y + eps delta_0.
    """
    pre = _heavy_preimage(space, phi, x)
    if sorted(children) != sorted(pre):
        raise ValueError(f"children must be exactly the positive-mass preimages {pre}")
    pieces = []
    for y in pre:
        if children[y].mass_at(0):
            raise ValueError(f"measure at {y} charges 0")
        pieces.extend((t, space.mass[y] / space.mass[x] * w / t) for t, w in children[y])
    body = AtomicMeasure.of(pieces)
    total = body.total_mass()
    if total > 1:
        raise MassOverflow(f"children require mass {total} > 1 at {x}")
    eps = 1 - total
    return body + AtomicMeasure.of([(0, eps)]), eps


@dataclass(frozen=True, eq=False)
class FixedPointExample:
    space: MeasureSpace
    map: SelfMap
    family: Family
    expected: dict
    norm_squared: Fraction
    alpha: Fraction
    epsilon: Fraction
    depth: int


def generate_fixed_point_example(theta: AtomicMeasure, mu1, depth: int) -> FixedPointExample:
    """Chain 0 <- 1 <- 2 <- ... <- depth with 0 fixed, built from a measure theta on (1, inf).

    mu(0) = 1, mu(n) = mu1 * int t^{n-1} dtheta; P(k) = mu1/mu(k) t^{k-1} theta for
    k >= 1 and P(0) = mu1/(t-1) theta + eps delta_1.
    """
    mu1 = Fraction(mu1)
    if theta.total_mass() != 1:
        raise SpecViolation("theta must be a probability measure")
    if theta.mass_where(lambda t: t <= 1):
        raise SpecViolation("theta must not charge [0, 1]")
    if depth < 1:
        raise SpecViolation("depth must be at least 1")
    alpha = sum((w / (t - 1) for t, w in theta), Fraction(0))
    if not 0 < mu1 <= 1 / alpha:
        raise SpecViolation(f"need 0 < mu(1) <= 1/alpha = {1 / alpha}")
    mass = {0: Fraction(1)}
    for n in range(1, depth + 1):
        mass[n] = mu1 * theta.moment(n - 1)
    space = MeasureSpace.from_masses(mass)
    phi = SelfMap({n: max(n - 1, 0) for n in range(depth + 1)}, boundary={depth})
    eps = 1 - mu1 * alpha
    family = {
        0: AtomicMeasure.of([(t, mu1 * w / (t - 1)) for t, w in theta] + [(1, eps)])
    }
    for k in range(1, depth + 1):
        family[k] = theta.times_power(k - 1).scaled(mu1 / mass[k])
    expected = {}
    for n in range(depth + 1):
        expected[n, 0] = sum(mass[j] for j in range(n + 1))
        for k in range(1, depth + 1 - n):
            expected[n, k] = mass[n + k] / mass[k]
    norm2 = max(1 + mu1, theta.support_max())
    return FixedPointExample(space, phi, Family(family), expected, norm2, alpha, eps, depth)


def quasinormal_family(space: MeasureSpace, phi: SelfMap) -> Family:
    """delta at h(phi(x)) for every x, valid when h = h o phi."""
    table = derivative_table(space, phi, 1)
    measures = {}
    for x in space.points:
        if x in phi.exits:
            measures[x] = AtomicMeasure.dirac(table[1, x])
            continue
        z = phi(x)
        if space.mass[x] > 0 and table.exact(1, x) and table.exact(1, z):
            if table[1, x] != table[1, z]:
                raise NotQuasinormal({"point": x, "h": table[1, x], "h_next": table[1, z]})
        measures[x] = AtomicMeasure.dirac(table[1, z])
    return Family(measures)


def check_fixed_point_support(space: MeasureSpace, phi: SelfMap, family: Family) -> Check:
    """At a fixed point x: P(x) avoids [0,1) and the other preimages' measures avoid [0,1]."""
    for x in space.positive():
        if x in phi.exits or phi(x) != x:
            continue
        if family[x].mass_where(lambda t: t < 1):
            return Check.failed("fixed point measure charges [0,1)", {"point": x})
        for y in _heavy_preimage(space, phi, x):
            if y != x and family[y].mass_where(lambda t: t <= 1):
                return Check.failed("sibling measure charges [0,1]", {"point": x, "sibling": y})
    return Check.passed()


# deciding subnormality ------------------------------------------------------


class Status(str, enum.Enum):
    SUBNORMAL = "Subnormal"
    NOT_SUBNORMAL = "NotSubnormal"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class Verdict:
    status: Status
    window: dict
    witness: dict | None = None
    family: Family | None = None
    notes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"status": self.status.value, "window": jsonable(self.window)}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.family is not None:
            out["certificate"] = {"measures": family_to_json(self.family)}
        if self.notes:
            out["notes"] = jsonable(self.notes)
        return out


def family_to_json(family: Family) -> dict:
    return {
        str(x): [{"t": jsonable(t), "w": jsonable(w)} for t, w in family[x]]
        for x in sorted(family.measures)
    }


def _propose_family(space: MeasureSpace, phi: SelfMap, table: DerivativeTable):
    """Candidate measures: forced window solutions first, then propagation
    down the map through P(y) = t P(phi y) / h(phi y), then any window solution."""
    proposals: dict[PointId, AtomicMeasure] = {}
    source: dict[PointId, str] = {}
    positive = space.positive()
    for x in positive:
        m = unique_representing_measure(table.window(x))
        if m is not None:
            proposals[x], source[x] = m, "window"
    changed = True
    while changed:
        changed = False
        for y in positive:
            if y in proposals or y in phi.exits:
                continue
            z = phi(y)
            if z in proposals and table.exact(1, z) and table[1, z] > 0:
                proposals[y] = proposals[z].times_power(1).scaled(1 / table[1, z])
                source[y] = "propagated"
                changed = True
    for x in positive:
        if x not in proposals:
            m = representing_measure_window(table.window(x))
            if m is None:
                return None, {"unresolved": x}
            proposals[x], source[x] = m, "window-search"
    for x in space.points:
        if space.mass[x] == 0:
            proposals[x], source[x] = AtomicMeasure.dirac(0), "null"
    return proposals, source


def decide_subnormal_discrete(space: MeasureSpace, phi: SelfMap, depth: int) -> Verdict:
    """Pipeline: derivative table, zero test for h, Hankel windows, certificate.

    Subnormal is returned only with a family that passes the consistency
    check exactly on the given window; NotSubnormal carries a violated finite
    inequality; everything else is Inconclusive.
    """
    window = {"depth": depth, "points": len(space), "truncated": phi.truncated}
    nonsing = check_nonsingular(space, phi)
    if not nonsing:
        return Verdict(Status.INCONCLUSIVE, window, {"singular": nonsing.witness})
    table = derivative_table(space, phi, depth)
    for x in space.positive():
        if table.exact(1, x) and table[1, x] == 0:
            return Verdict(
                Status.NOT_SUBNORMAL,
                window,
                {"kind": "zero-derivative", "point": x, "h": Fraction(0)},
            )
    for x in space.positive():
        seq = table.window(x)
        w = stieltjes_witness(seq)
        if w is not None:
            return Verdict(
                Status.NOT_SUBNORMAL,
                window,
                dict(w, kind="hankel", point=x, sequence=seq),
            )
    proposals, source = _propose_family(space, phi, table)
    if proposals is None:
        return Verdict(Status.INCONCLUSIVE, window, {"kind": "no-window-measure", **source})
    family = Family(proposals)
    check = verify_cc(space, phi, family)
    if not check:
        return Verdict(
            Status.INCONCLUSIVE,
            window,
            {"kind": "candidate-rejected", "reason": check.reason, **check.witness},
        )
    determinate = {
        x: carleman_determinate(table.window(x)) for x in space.positive()
    }
    return Verdict(
        Status.SUBNORMAL,
        window,
        None,
        family,
        {"sources": source, "carleman": determinate},
    )


def replay_certificate(space: MeasureSpace, phi: SelfMap, verdict: Verdict) -> Check:
    """Re-check a verdict from scratch on the same window."""
    if verdict.status is Status.SUBNORMAL:
        if verdict.family is None:
            return Check.failed("subnormal verdict without a family")
        table = derivative_table(space, phi, 1)
        for x in space.positive():
            if table.exact(1, x) and table[1, x] == 0:
                return Check.failed("h vanishes", {"point": x})
        return verify_cc(space, phi, verdict.family)
    if verdict.status is Status.NOT_SUBNORMAL:
        w = verdict.witness or {}
        if w.get("kind") == "zero-derivative":
            table = derivative_table(space, phi, 1)
            ok = space.mass[w["point"]] > 0 and table[1, w["point"]] == 0
        elif w.get("kind") == "hankel":
            table = derivative_table(space, phi, len(w["sequence"]) - 1)
            ok = replay_stieltjes_witness(table.window(w["point"]), w)
        else:
            ok = False
        return Check.passed() if ok else Check.failed("witness does not replay", w)
    return Check.passed()
