"""Homogeneous generation profiles and weighted shifts on directed trees.

A profile assigns every generation m a branching number kappa_m (each vertex
of generation m has kappa_m children in generation m + 1) and a common vertex
mass alpha_m. The map sends a vertex to its parent.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .base import Check, to_number
from .consistency import Family, Status, Verdict
from .moments import (
    AtomicMeasure,
    TwoSidedSequence,
    representing_measure_window,
    two_sided_witness,
)
from .mspace import MeasureSpace, PointId, SelfMap


class WindowExceeded(IndexError):
    pass


class NotRepresenting(ValueError):
    pass


class SizeOverflow(ValueError):
    pass


class BoundaryIncomplete(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TreeProfile:
    m_lo: int
    m_hi: int
    kappa: Mapping[int, int]
    alpha: Mapping[int, Fraction]

    def __post_init__(self):
        if not self.m_lo <= 0 < self.m_hi:
            raise ValueError("the generation window must contain 0 and 1")
        kappa = {m: int(self.kappa[m]) for m in range(self.m_lo, self.m_hi + 1) if m in self.kappa}
        alpha = {m: to_number(self.alpha[m]) for m in range(self.m_lo, self.m_hi + 1)}
        for m in range(self.m_lo, self.m_hi):
            if kappa.get(m, 0) < 1:
                raise ValueError(f"branching at generation {m} must be a positive integer")
        for m, a in alpha.items():
            if not a > 0:
                raise ValueError(f"mass at generation {m} must be positive")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def build(cls, m_lo: int, m_hi: int, kappa, alpha) -> "TreeProfile":
        """kappa and alpha may be constants, callables of m or mappings."""

        def table(spec, top):
            if callable(spec):
                return {m: spec(m) for m in range(m_lo, top + 1)}
            if isinstance(spec, Mapping):
                return dict(spec)
            return {m: spec for m in range(m_lo, top + 1)}

        return cls(m_lo, m_hi, table(kappa, m_hi - 1), table(alpha, m_hi))

    def kappa_hat(self, m: int) -> Fraction:
        """Product of kappa_0..kappa_{m-1} for m >= 1, and its reciprocal analogue below 0."""
        value = Fraction(1)
        if m >= 0:
            for j in range(m):
                value *= self._kappa(j)
        else:
            for j in range(1, -m + 1):
                value /= self._kappa(-j)
        return value

    def _kappa(self, m: int) -> int:
        if m not in self.kappa:
            raise WindowExceeded(f"branching at generation {m} is outside the window")
        return self.kappa[m]

    def _alpha(self, m: int) -> Fraction:
        if m not in self.alpha:
            raise WindowExceeded(f"mass at generation {m} is outside the window")
        return self.alpha[m]

    def weighted_sequence(self) -> TwoSidedSequence:
        """alpha_m * kappa_hat(m) over the window."""
        return TwoSidedSequence(
            self.m_lo,
            tuple(self.alpha[m] * self.kappa_hat(m) for m in range(self.m_lo, self.m_hi + 1)),
        )


def tree_derivative(profile: TreeProfile, n: int, m: int) -> Fraction:
    """h of the n-th iterate on generation m: alpha_{m+n}/alpha_m times the branching product."""
    value = profile._alpha(m + n) / profile._alpha(m)
    for j in range(n):
        value *= profile._kappa(m + j)
    return value


def _measure_for(profile: TreeProfile, nu: AtomicMeasure) -> bool:
    a0 = profile.alpha[0]
    seq = profile.weighted_sequence()
    try:
        return all(nu.moment(m) == seq[m] / a0 for m in range(profile.m_lo, profile.m_hi + 1))
    except ZeroDivisionError:
        return False


def tree_family(profile: TreeProfile, nu: AtomicMeasure) -> dict[int, AtomicMeasure]:
    """Per-generation measures alpha_0/(alpha_m kappa_hat(m)) t^m nu."""
    if not _measure_for(profile, nu):
        raise NotRepresenting("nu does not reproduce the weighted sequence on the window")
    a0 = profile.alpha[0]
    return {
        m: nu.times_power(m).scaled(a0 / (profile.alpha[m] * profile.kappa_hat(m)))
        for m in range(profile.m_lo, profile.m_hi + 1)
    }


def tree_subnormal(profile: TreeProfile) -> Verdict:
    seq = profile.weighted_sequence()
    window = {"m_lo": profile.m_lo, "m_hi": profile.m_hi}
    witness = two_sided_witness(seq)
    if witness is not None:
        return Verdict(Status.NOT_SUBNORMAL, window, dict(witness, kind="hankel"))
    a0 = profile.alpha[0]
    tail = [v / a0 for v in seq.values]
    tau = representing_measure_window(tail)
    if tau is None or (profile.m_lo < 0 and tau.mass_at(0)):
        return Verdict(Status.INCONCLUSIVE, window, {"kind": "no-window-measure"})
    nu = tau.times_power(-profile.m_lo)
    if not _measure_for(profile, nu):
        return Verdict(Status.INCONCLUSIVE, window, {"kind": "candidate-rejected"})
    family = tree_family(profile, nu)
    return Verdict(Status.SUBNORMAL, window, None, None, {"nu": nu, "generations": family})


def tree_bounds(profile: TreeProfile, nu: AtomicMeasure):
    """(norm squared, squared lower bound, left semi-Fredholm) read off the support of nu."""
    if not _measure_for(profile, nu):
        raise NotRepresenting("nu does not reproduce the weighted sequence on the window")
    lo = nu.support_min()
    return nu.support_max(), lo, lo > 0


@dataclass(frozen=True, eq=False)
class TreeSlice:
    space: MeasureSpace
    map: SelfMap
    generation: Mapping[PointId, int]

    def family(self, per_generation: Mapping[int, AtomicMeasure]) -> Family:
        return Family({v: per_generation[m] for v, m in self.generation.items()})


def materialize_tree(
    profile: TreeProfile, depth: int, anchor: int = 0, budget: int = 100_000
) -> TreeSlice:
    """A single vertex of generation ``anchor`` with all descendants ``depth`` levels down.

    The anchor's parent lies outside (exit) and the deepest level has its
    children cut (boundary).
    """
    if anchor < profile.m_lo or anchor + depth > profile.m_hi:
        raise WindowExceeded("slice leaves the profile window")
    size, level = 1, 1
    for m in range(anchor, anchor + depth):
        level *= profile._kappa(m)
        size += level
        if size > budget:
            raise SizeOverflow(f"slice would have more than {budget} vertices")
    masses, image, generation = {0: profile.alpha[anchor]}, {}, {0: anchor}
    frontier = [0]
    next_id = 1
    for m in range(anchor, anchor + depth):
        new = []
        for v in frontier:
            for _ in range(profile.kappa[m]):
                masses[next_id] = profile.alpha[m + 1]
                image[next_id] = v
                generation[next_id] = m + 1
                new.append(next_id)
                next_id += 1
        frontier = new
    phi = SelfMap(image, boundary=set(frontier), exits={0})
    return TreeSlice(MeasureSpace.from_masses(masses), phi, generation)


@dataclass(frozen=True, eq=False)
class WeightedTree:
    """Finite window of a directed tree with squared shift weights.

    ``parent`` covers every vertex except those in ``tops`` (whose parent is
    outside the window); ``lambda2[v]`` is the squared weight on the edge into
    v; ``boundary`` lists vertices whose children are cut by the window.
    """

    parent: Mapping[PointId, PointId]
    lambda2: Mapping[PointId, Fraction]
    anchor: PointId
    tops: frozenset = field(default_factory=frozenset)
    boundary: frozenset = field(default_factory=frozenset)

    def vertices(self) -> list[PointId]:
        return sorted(set(self.parent) | set(self.parent.values()) | set(self.tops) | {self.anchor})

    def children(self, u: PointId) -> list[PointId]:
        return sorted(v for v, p in self.parent.items() if p == u)


def shift_to_composition(tree: WeightedTree) -> tuple[MeasureSpace, SelfMap]:
    """Masses from the anchor (mass 1) via mu(v) = lambda_v^2 mu(parent v); map = parent."""
    verts = tree.vertices()
    for v in verts:
        if v not in tree.parent and v not in tree.tops:
            raise BoundaryIncomplete(f"vertex {v} has no parent and is not marked as a top")
        if not tree.children(v) and v not in tree.boundary:
            raise BoundaryIncomplete(f"vertex {v} has no children and is not marked as boundary")
    for v in tree.parent:
        if not to_number(tree.lambda2[v]) > 0:
            raise ValueError(f"weight into {v} must be positive")
    mass = {tree.anchor: Fraction(1)}
    queue = deque([tree.anchor])
    while queue:
        u = queue.popleft()
        for v in tree.children(u):
            if v not in mass:
                mass[v] = to_number(tree.lambda2[v]) * mass[u]
                queue.append(v)
        if u in tree.parent and tree.parent[u] not in mass:
            mass[tree.parent[u]] = mass[u] / to_number(tree.lambda2[u])
            queue.append(tree.parent[u])
    if len(mass) != len(verts):
        raise BoundaryIncomplete("tree window is not connected")
    return (
        MeasureSpace(tuple(verts), mass),
        SelfMap(dict(tree.parent), boundary=tree.boundary, exits=tree.tops),
    )


def verify_shift_consistency(tree: WeightedTree, measures: Mapping[PointId, AtomicMeasure]):
    """mu_u = sum over children v of lambda_v^2 t^{-1} mu_v at every non-boundary vertex."""
    for u in tree.vertices():
        if u in tree.boundary:
            continue
        pieces = []
        for v in tree.children(u):
            if measures[v].mass_at(0):
                return Check.failed("child measure charges 0", {"vertex": u, "child": v})
            lam = to_number(tree.lambda2[v])
            pieces.extend((t, lam * w / t) for t, w in measures[v])
        if AtomicMeasure.of(pieces) != measures[u]:
            return Check.failed("weighted shift consistency violated", {"vertex": u})
    return Check.passed()


def regular_weighted_tree(branching: int, depth: int, lambda2) -> WeightedTree:
    """Full tree of the given branching below a single top vertex 0, constant weights."""
    parent, level, next_id = {}, [0], 1
    for _ in range(depth):
        new = []
        for u in level:
            for _ in range(branching):
                parent[next_id] = u
                new.append(next_id)
                next_id += 1
        level = new
    lam = {v: to_number(lambda2) for v in parent}
    return WeightedTree(parent, lam, 0, frozenset({0}), frozenset(level))
