"""The space of n-element subsets of G containing the identity.

Left translation gives a canonical partial action on these tuples: g moves
the tuples containing g^-1 to the tuples containing g.  Stabilizers, coset
sections, orbits, and a deterministic global section of the orbit space all
live here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .groups import FiniteGroup, Subgroup
from .pactions import PartialAction, translation_groupoid, validate


class TupleSpaceError(ValueError):
    pass


class NOutOfRange(TupleSpaceError):
    def __init__(self, n: int, order: int):
        super().__init__(f"tuple size {n} out of range 1..{order}")


class TupleNotInSpace(TupleSpaceError):
    def __init__(self, tau):
        super().__init__(f"tuple {sorted(tau)} does not belong to this tuple space")


def translate(group: FiniteGroup, g: int, tau: frozenset[int]) -> frozenset[int]:
    return frozenset(group.mul(g, t) for t in tau)


@dataclass(frozen=True)
class TupleSpace:
    """All n-subsets of G containing 1, with the left-translation partial action.

    ``tuples`` is lexicographically ordered (as sorted index lists); ``lt`` is
    a validated partial action on tuple indices; ``orbits`` lists orbit index
    sets; ``section`` maps each orbit (by position) to the index of its
    lexicographically least member.
    """

    group: FiniteGroup
    n: int
    tuples: tuple[frozenset[int], ...]
    lt: PartialAction
    orbits: tuple[frozenset[int], ...]
    section: tuple[int, ...]

    def index_of(self, tau) -> int:
        tau = frozenset(tau)
        try:
            return self._index()[tau]
        except KeyError:
            raise TupleNotInSpace(tau) from None

    def _index(self) -> dict[frozenset[int], int]:
        return {t: i for i, t in enumerate(self.tuples)}

    def orbit_index_of(self, tau) -> int:
        i = self.index_of(tau)
        for z, orbit in enumerate(self.orbits):
            if i in orbit:
                return z
        raise TupleNotInSpace(tau)

    def representative(self, z: int) -> frozenset[int]:
        return self.tuples[self.section[z]]


def tuple_space(group: FiniteGroup, n: int) -> TupleSpace:
    """Build the n-tuple space with its translation partial action."""
    if not (1 <= n <= group.order):
        raise NOutOfRange(n, group.order)
    tuples = tuple(
        frozenset((0,) + rest)
        for rest in itertools.combinations(range(1, group.order), n - 1)
    )
    index = {t: i for i, t in enumerate(tuples)}
    carrier = frozenset(range(len(tuples)))
    domains = {
        g: frozenset(i for i, t in enumerate(tuples) if g in t)
        for g in group.elements()
    }
    maps = {}
    for g in group.elements():
        ginv = group.inv(g)
        maps[g] = {index[t]: index[translate(group, g, t)] for t in tuples if ginv in t}
    lt = validate(group, carrier, domains, maps)
    orbits = translation_groupoid(lt).orbits
    section = tuple(min(orbit) for orbit in orbits)
    space = TupleSpace(group, n, tuples, lt, orbits, section)
    for tau in tuples:
        h, m, _ = stabilizer_and_section(space, tau)
        if n % h.order != 0 or m != n // h.order - 1:
            raise AssertionError("stabilizer order does not divide the tuple size")
    return space


def stabilizer_and_section(
    ts: TupleSpace, tau
) -> tuple[Subgroup, int, tuple[int, ...]]:
    """Stabilizer H of tau under left translation, with a coset section.

    Returns (H, m, (x_0=1, x_1, ..., x_m)) where tau is the disjoint union of
    the right cosets H, H x_1, ..., H x_m.  The section is deterministic:
    each x_i is the least element of tau not yet covered.
    """
    tau = frozenset(tau)
    ts.index_of(tau)
    G = ts.group
    members = frozenset(h for h in G.elements() if translate(G, h, tau) == tau)
    H = Subgroup(G, members)
    section = [0]
    covered = set(members)
    while covered != tau:
        x = min(tau - covered)
        coset = {G.mul(h, x) for h in members}
        if not coset <= tau or coset & covered:
            raise AssertionError("coset section failed to tile the tuple")
        covered |= coset
        section.append(x)
    m = len(section) - 1
    return H, m, tuple(section)


def orbit_of(ts: TupleSpace, tau) -> list[frozenset[int]]:
    """The left-translation orbit of tau, cross-checked against the groupoid."""
    tau = frozenset(tau)
    start = ts.index_of(tau)
    G = ts.group
    seen = {tau}
    frontier = [tau]
    while frontier:
        new = []
        for t in frontier:
            for g in G.elements():
                if G.inv(g) in t:
                    u = translate(G, g, t)
                    if u not in seen:
                        seen.add(u)
                        new.append(u)
        frontier = new
    groupoid_orbit = next(o for o in ts.orbits if start in o)
    if frozenset(ts.index_of(t) for t in seen) != groupoid_orbit:
        raise AssertionError("set-theoretic orbit disagrees with the groupoid orbit")
    return sorted(seen, key=sorted)
