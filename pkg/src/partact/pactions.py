"""Partial actions of finite groups on finite sets.

A partial action assigns to each group element ``g`` a domain ``X_g`` inside
the carrier and a bijection ``theta_g: X_{g^-1} -> X_g``, with ``theta_1`` the
identity on the whole carrier and ``theta_g . theta_h`` contained in
``theta_{gh}`` wherever defined.  The function-algebra side uses the
dictionary ``alpha_g(f) = f . theta_{g^-1}`` on ``X_g``.

Carrier points are integers but need not be contiguous, so restrictions keep
their original labels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .groups import (
    FiniteGroup,
    Subgroup,
    all_subgroups,
    build_group,
    coset_decomposition,
)


class PartialActionError(ValueError):
    """Base class for partial-action validation failures."""


class IdentityDomainNotFull(PartialActionError):
    def __init__(self, missing: int):
        self.missing = missing
        super().__init__(f"identity domain must be the whole carrier; missing point {missing}")


class NotBijective(PartialActionError):
    def __init__(self, g: int, detail: str = ""):
        self.g = g
        super().__init__(f"theta_{g} is not a bijection X_(g^-1) -> X_g{': ' + detail if detail else ''}")


class InverseMismatch(PartialActionError):
    def __init__(self, g: int, x: int):
        self.g = g
        self.x = x
        super().__init__(f"theta_(inv {g}) is not the inverse of theta_{g} at point {x}")


class CompositionViolation(PartialActionError):
    def __init__(self, g: int, h: int, x: int):
        self.g = g
        self.h = h
        self.x = x
        super().__init__(
            f"composition axiom fails for (g={g}, h={h}) at point {x}: "
            f"theta_g(theta_h(x)) is defined but disagrees with theta_(gh)"
        )


class NotInvariant(PartialActionError):
    def __init__(self, subset: frozenset[int], arrow: tuple[int, int, int]):
        self.subset = subset
        self.arrow = arrow
        g, x, y = arrow
        super().__init__(f"subset is not invariant: arrow (g={g}, {x} -> {y}) crosses its boundary")


@dataclass(frozen=True)
class PartialAction:
    """A validated partial action; construct via :func:`validate`."""

    group: FiniteGroup
    carrier: frozenset[int]
    domains: Mapping[int, frozenset[int]]
    maps: Mapping[int, Mapping[int, int]]

    def domain(self, g: int) -> frozenset[int]:
        return self.domains[g]

    def theta(self, g: int, x: int) -> int:
        """theta_g(x) for x in X_{g^-1}."""
        return self.maps[g][x]

    def alpha(self, g: int, f: Mapping[int, object]) -> dict[int, object]:
        """alpha_g(f) = f . theta_{g^-1}, a function supported on X_g."""
        inv = self.group.inv(g)
        out = {}
        for z in self.domains[g]:
            y = self.maps[inv][z]
            if y in f:
                out[z] = f[y]
        return out

    def domain_tuple(self, x: int) -> frozenset[int]:
        """tau(x) = set of g with x in X_g."""
        return frozenset(g for g in self.group.elements() if x in self.domains[g])

    def arrows(self):
        """Yield all arrows (g, x, theta_g(x)) with x in X_{g^-1}."""
        for g in self.group.elements():
            for x, y in sorted(self.maps[g].items()):
                yield (g, x, y)

    def is_global(self) -> bool:
        return all(self.domains[g] == self.carrier for g in self.group.elements())

    def size(self) -> int:
        return len(self.carrier)

    def __repr__(self) -> str:
        return (
            f"PartialAction({self.group.name}, |X|={len(self.carrier)}, "
            f"domains={[len(self.domains[g]) for g in self.group.elements()]})"
        )


def validate(
    group: FiniteGroup,
    carrier: Iterable[int],
    domains: Mapping[int, Iterable[int]],
    maps: Mapping[int, Mapping[int, int]],
) -> PartialAction:
    """Check all partial-action axioms and return the validated value.

    Raises the first violated axiom with a witness: IdentityDomainNotFull,
    NotBijective(g), InverseMismatch(g), or CompositionViolation(g, h, x).
    """
    X = frozenset(carrier)
    doms: dict[int, frozenset[int]] = {}
    thetas: dict[int, dict[int, int]] = {}
    for g in group.elements():
        dom = frozenset(domains.get(g, ()))
        if not dom <= X:
            stray = sorted(dom - X)[0]
            raise PartialActionError(f"domain of g={g} contains non-carrier point {stray}")
        doms[g] = dom
        thetas[g] = {int(x): int(y) for x, y in maps.get(g, {}).items()}

    if doms[0] != X:
        missing = sorted(X - doms[0])
        raise IdentityDomainNotFull(missing[0] if missing else -1)
    if any(thetas[0].get(x, x) != x for x in X):
        raise PartialActionError("theta_1 must be the identity map")
    thetas[0] = {x: x for x in X}

    for g in group.elements():
        ginv = group.inv(g)
        mp = thetas[g]
        if set(mp.keys()) != set(doms[ginv]):
            raise NotBijective(g, "source set is not X_(g^-1)")
        values = list(mp.values())
        if set(values) != set(doms[g]) or len(set(values)) != len(values):
            raise NotBijective(g, "image is not X_g or map is not injective")

    for g in group.elements():
        ginv = group.inv(g)
        for x, y in thetas[g].items():
            if thetas[ginv].get(y) != x:
                raise InverseMismatch(g, x)

    # Composition: x in X_{h^-1} and theta_h(x) in X_{g^-1} imply
    # x in X_{(gh)^-1} and theta_{gh}(x) = theta_g(theta_h(x)).
    for g in group.elements():
        for h in group.elements():
            gh = group.mul(g, h)
            for x, hx in thetas[h].items():
                if hx in doms[group.inv(g)]:
                    if thetas[gh].get(x) != thetas[g][hx]:
                        raise CompositionViolation(g, h, x)

    pa = PartialAction(group, X, doms, thetas)
    # Standard consequences; violations here would indicate an internal bug.
    for g in group.elements():
        for h in group.elements():
            lhs = frozenset(thetas[g][x] for x in doms[group.inv(g)] & doms[h])
            if lhs != doms[g] & doms[group.mul(g, h)]:
                raise AssertionError(f"derived domain identity fails at (g={g}, h={h})")
    return pa


def global_action(group: FiniteGroup, carrier: Iterable[int], perms: Mapping[int, Mapping[int, int]]) -> PartialAction:
    """Convenience constructor for a global action given point permutations."""
    X = frozenset(carrier)
    domains = {g: X for g in group.elements()}
    return validate(group, X, domains, perms)


def trivial_partial_action(group: FiniteGroup, carrier: Iterable[int]) -> PartialAction:
    """The trivial partial action: empty domains off the identity."""
    X = frozenset(carrier)
    domains = {g: (X if g == 0 else frozenset()) for g in group.elements()}
    maps = {g: ({x: x for x in X} if g == 0 else {}) for g in group.elements()}
    return validate(group, X, domains, maps)


def is_free(pa: PartialAction) -> bool:
    """True iff no g != 1 fixes a point of X_{g^-1}."""
    return freeness_witness(pa) is None


def freeness_witness(pa: PartialAction) -> Optional[tuple[int, int]]:
    """A pair (g, x) with g != 1 and theta_g(x) = x, or None if free."""
    for g in pa.group.elements():
        if g == 0:
            continue
        for x, y in pa.maps[g].items():
            if x == y:
                return (g, x)
    return None


@dataclass(frozen=True)
class TranslationGroupoid:
    """Arrows (g, x -> theta_g(x)) of a partial action, with orbits and isotropy."""

    pa: PartialAction
    arrows: tuple[tuple[int, int, int], ...]
    orbits: tuple[frozenset[int], ...]
    stabilizers: Mapping[int, Subgroup]

    def orbit_of(self, x: int) -> frozenset[int]:
        for orbit in self.orbits:
            if x in orbit:
                return orbit
        raise KeyError(f"point {x} not in carrier")

    def stabilizer_at(self, x: int) -> Subgroup:
        """Isotropy group {g : x in X_{g^-1}, theta_g(x) = x} at any point."""
        members = frozenset(
            g for g in self.pa.group.elements() if self.pa.maps[g].get(x) == x
        )
        return Subgroup(self.pa.group, members)


def translation_groupoid(pa: PartialAction) -> TranslationGroupoid:
    """Enumerate arrows, connected components, and orbit-representative stabilizers."""
    arrows = tuple(pa.arrows())
    parent: dict[int, int] = {x: x for x in pa.carrier}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, x, y in arrows:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry
    groups_: dict[int, set[int]] = {}
    for x in pa.carrier:
        groups_.setdefault(find(x), set()).add(x)
    orbits = tuple(sorted((frozenset(v) for v in groups_.values()), key=min))
    stabilizers = {}
    for orbit in orbits:
        rep = min(orbit)
        members = frozenset(g for g in pa.group.elements() if pa.maps[g].get(rep) == rep)
        stabilizers[rep] = Subgroup(pa.group, members)
    return TranslationGroupoid(pa, arrows, orbits, stabilizers)


def restricted_to(pa: PartialAction, subset: Iterable[int]) -> PartialAction:
    """Restriction of the partial action to a subset S.

    Domains become S intersect theta_g(X_{g^-1} intersect S); for an invariant
    S this is just X_g intersect S.  The subset need not be invariant: the
    restriction of a global action to any subset is how globalizable partial
    actions arise in the first place.
    """
    S = frozenset(subset)
    maps = {
        g: {x: y for x, y in pa.maps[g].items() if x in S and y in S}
        for g in pa.group.elements()
    }
    domains = {g: frozenset(maps[g].values()) for g in pa.group.elements()}
    return validate(pa.group, S, domains, maps)


def restrict_and_quotient(pa: PartialAction, subset: Iterable[int]) -> tuple[PartialAction, PartialAction]:
    """Split along an invariant subset S into (restriction to S, restriction to X - S).

    On a finite discrete carrier the equivariant quotient by the ideal of
    functions supported on S is the restriction to the complement, so both
    halves are plain restrictions.
    """
    S = frozenset(subset)
    if not S <= pa.carrier:
        raise PartialActionError("subset is not contained in the carrier")
    for g, x, y in pa.arrows():
        if (x in S) != (y in S):
            raise NotInvariant(S, (g, x, y))
    return restricted_to(pa, S), restricted_to(pa, pa.carrier - S)


@dataclass(frozen=True)
class GlobalizationResult:
    """Envelope (a global action), the embedding of X, and a central splitting."""

    envelope: PartialAction
    embedding: Mapping[int, int]
    pa: PartialAction

    def embedded_carrier(self) -> frozenset[int]:
        return frozenset(self.embedding.values())


def globalize(pa: PartialAction) -> GlobalizationResult:
    """Enveloping global action via the quotient of G x X.

    (g, x) ~ (h, y) iff x lies in X_{g^-1 h} and theta_{h^-1 g}(x) = y.  The
    envelope acts by a.[g, x] = [a g, x] and the embedding is x -> [1, x].
    Construction invariants (domains match intersections, the envelope extends
    the action, translates of X cover) are asserted, and a second construction
    pass with reversed enumeration is checked equivariantly bijective.
    """
    result = _globalize_once(pa, reverse=False)
    other = _globalize_once(pa, reverse=True)
    _check_envelope_isomorphic(pa, result, other)
    return result


def _globalize_once(pa: PartialAction, reverse: bool) -> GlobalizationResult:
    G = pa.group
    elems = list(G.elements())
    if reverse:
        elems = elems[::-1]
    pairs = [(g, x) for g in elems for x in sorted(pa.carrier)]
    parent = {p: p for p in pairs}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for g in elems:
        for h in elems:
            hg = G.mul(G.inv(h), g)
            for x in pa.domains[G.inv(hg)]:
                # (g, x) ~ (h, theta_{h^-1 g}(x))
                y = pa.maps[hg][x]
                a, b = find((g, x)), find((h, y))
                if a != b:
                    parent[a] = b

    classes: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for p in pairs:
        classes.setdefault(find(p), []).append(p)
    reps = sorted(classes, key=lambda r: min(classes[r]))
    label = {rep: i for i, rep in enumerate(reps)}
    point = {p: label[find(p)] for p in pairs}

    carrier = frozenset(range(len(reps)))
    perms = {}
    for a in G.elements():
        perms[a] = {point[(g, x)]: point[(G.mul(a, g), x)] for (g, x) in pairs}
    envelope = global_action(G, carrier, perms)
    embedding = {x: point[(0, x)] for x in pa.carrier}

    if len(set(embedding.values())) != len(pa.carrier):
        raise AssertionError("globalization embedding is not injective")
    emb = frozenset(embedding.values())
    for g in G.elements():
        translated = frozenset(envelope.maps[g][z] for z in emb)
        if frozenset(embedding[x] for x in pa.domains[g]) != emb & translated:
            raise AssertionError(f"envelope domain condition fails at g={g}")
        for x in pa.domains[G.inv(g)]:
            if envelope.maps[g][embedding[x]] != embedding[pa.maps[g][x]]:
                raise AssertionError(f"envelope does not extend theta_{g}")
    covered = set()
    for g in G.elements():
        covered |= {envelope.maps[g][z] for z in emb}
    if covered != set(carrier):
        raise AssertionError("translates of the embedded carrier do not cover the envelope")
    return GlobalizationResult(envelope, embedding, pa)


def _check_envelope_isomorphic(pa: PartialAction, a: GlobalizationResult, b: GlobalizationResult) -> None:
    """Equivariant bijection between two envelopes extending the identity on X."""
    G = pa.group
    match: dict[int, int] = {}
    for x in pa.carrier:
        match[a.embedding[x]] = b.embedding[x]
    for g in G.elements():
        for x in pa.carrier:
            za = a.envelope.maps[g][a.embedding[x]]
            zb = b.envelope.maps[g][b.embedding[x]]
            if match.setdefault(za, zb) != zb:
                raise AssertionError("globalization passes disagree (not equivariantly isomorphic)")
    if len(match) != len(a.envelope.carrier) or len(set(match.values())) != len(b.envelope.carrier):
        raise AssertionError("globalization passes give envelopes of different size")


def central_splitting(gr: GlobalizationResult) -> dict[int, frozenset[int]]:
    """Subsets p_g of the embedded carrier whose translates partition the envelope.

    Greedy inclusion-exclusion over the group's canonical enumeration: each
    translate keeps what the previous ones have not already claimed,
    P_k = sigma_{g_k}(X) minus the earlier translates, and
    p_{g_k} = sigma_{g_k}^{-1}(P_k).  The partition depends on the enumeration
    order; existence does not.
    """
    env = gr.envelope
    G = env.group
    emb = gr.embedded_carrier()
    translates = {g: frozenset(env.maps[g][z] for z in emb) for g in G.elements()}
    order = list(G.elements())
    splitting = {}
    claimed: set[int] = set()
    for g in order:
        P_k = translates[g] - claimed
        claimed |= translates[g]
        ginv = G.inv(g)
        splitting[g] = frozenset(env.maps[ginv][z] for z in P_k)
    pieces = [frozenset(env.maps[g][z] for z in splitting[g]) for g in order]
    union = set()
    for piece in pieces:
        if piece & union:
            raise AssertionError("central splitting pieces overlap")
        union |= piece
    if union != set(env.carrier):
        raise AssertionError("central splitting does not cover the envelope")
    return splitting


def minimal_partial_unitization(pa: PartialAction) -> PartialAction:
    """Adjoin a point to the identity domain only (never global when |G| > 1)."""
    new_point = max(pa.carrier) + 1 if pa.carrier else 0
    X = pa.carrier | {new_point}
    domains = {g: (X if g == 0 else pa.domains[g]) for g in pa.group.elements()}
    maps = {g: dict(pa.maps[g]) for g in pa.group.elements()}
    maps[0][new_point] = new_point
    return validate(pa.group, X, domains, maps)


def random_partial_action(
    seed: int,
    group_spec=("cyclic", 2),
    ambient_size: int = 6,
    keep_probability: float = 0.5,
    max_order: int = 24,
) -> PartialAction:
    """Restriction of a random global G-set to a random subset.

    Builds a global G-set of the requested size out of coset orbits G/H for
    random subgroups H, keeps each point independently with the given
    probability, and restricts: domains become X and sigma_g(X) intersected.
    Deterministic in the seed.
    """
    if not (0.0 <= keep_probability <= 1.0):
        raise PartialActionError(f"keep probability must be in [0, 1], got {keep_probability}")
    if ambient_size < 0:
        raise PartialActionError(f"ambient size must be >= 0, got {ambient_size}")
    rng = random.Random(seed)
    group = build_group(group_spec, max_order=max_order)
    subs = all_subgroups(group)
    points: list[int] = []
    perms: dict[int, dict[int, int]] = {g: {} for g in group.elements()}
    next_label = 0
    while len(points) < ambient_size:
        room = ambient_size - len(points)
        candidates = [s for s in subs if group.order // s.order <= room]
        sub = rng.choice(candidates)
        cosets = coset_decomposition(group, sub, "left")
        labels = {cos: next_label + i for i, cos in enumerate(cosets)}
        next_label += len(cosets)
        for g in group.elements():
            for cos, lab in labels.items():
                rep = min(cos)
                target = next(c for c in cosets if group.mul(g, rep) in c)
                perms[g][lab] = labels[target]
        points.extend(labels.values())
    global_action(group, points, perms)  # sanity: perms really is a G-action
    kept = frozenset(x for x in points if rng.random() < keep_probability)
    maps = {
        g: {x: perms[g][x] for x in kept if perms[g][x] in kept}
        for g in group.elements()
    }
    domains = {g: frozenset(maps[g].values()) for g in group.elements()}
    return validate(group, kept, domains, maps)
