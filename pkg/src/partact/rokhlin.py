"""Exact Rokhlin towers for finite-set partial actions.

A tower family at dimension d is determined by its identity-level functions
f_1^(0..d): equivariance with h = 1 forces f_g = f_1 . theta_{g^-1} on X_g,
and the partial-action axioms then give every other equivariance instance
exactly.  The search therefore works per groupoid orbit over the level
functions alone:

  * per level, the support must meet every point's incoming arrows at most
    once (exact orthogonality) -- a source with two parallel arrows into the
    same target can never carry mass;
  * the per-point masses must sum to one (exact partition of unity) -- for a
    single level this is an exact cover problem, for more levels a rational
    linear feasibility problem per support pattern.

Certificates carry exact rational values and are re-verified both in the
derived form (C1-C3) and against the raw tower conditions with indicator
witnesses at epsilon = 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exactcover import solve_exact_cover
from .pactions import PartialAction, is_free, translation_groupoid
from .rational import solve_feasibility

DEFAULT_BUDGET = 10_000_000


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, explored: int, budget: int, orbit: frozenset[int]):
        self.explored = explored
        self.budget = budget
        self.orbit = orbit
        super().__init__(
            f"tower search exhausted its budget on orbit {sorted(orbit)}: "
            f"explored {explored} of {budget} allowed patterns"
        )


class PreconditionViolated(ValueError):
    def __init__(self, detail: str, point):
        self.point = point
        super().__init__(f"{detail} (witness point {point})")


@dataclass(frozen=True)
class TowerCertificate:
    """Rational identity-level tower functions; group towers are derived."""

    d: int
    levels: tuple[Mapping[int, Fraction], ...]

    def level(self, j: int) -> Mapping[int, Fraction]:
        return self.levels[j]

    def value(self, j: int, x: int) -> Fraction:
        return self.levels[j].get(x, Fraction(0))


@dataclass(frozen=True)
class OrbitEvidence:
    """Why one orbit admits no towers at the requested dimension."""

    orbit: tuple[int, ...]
    parallel_sources: tuple[int, ...]
    supports_found: int
    patterns_checked: int
    note: str


@dataclass(frozen=True)
class NonexistenceProof:
    """Exhaustive per-orbit refutation of towers at a fixed dimension."""

    d: int
    evidence: tuple[OrbitEvidence, ...]

    @property
    def exhaustive(self) -> bool:
        return True


SearchOutcome = Union[TowerCertificate, NonexistenceProof]


def derived_towers(
    pa: PartialAction, cert: TowerCertificate
) -> dict[int, list[dict[int, Fraction]]]:
    """f_g^(j) = f_1^(j) . theta_{g^-1} on X_g, zero elsewhere."""
    out: dict[int, list[dict[int, Fraction]]] = {}
    for g in pa.group.elements():
        ginv = pa.group.inv(g)
        out[g] = []
        for j in range(cert.d + 1):
            tower = {}
            for z in pa.domain(g):
                v = cert.value(j, pa.theta(ginv, z))
                if v:
                    tower[z] = v
            out[g].append(tower)
    return out


def _incoming_arrows(pa: PartialAction) -> dict[int, list[tuple[int, int]]]:
    """For each point x, the list of (g, source) with theta_g(source) = x."""
    incoming: dict[int, list[tuple[int, int]]] = {x: [] for x in pa.carrier}
    for g in pa.group.elements():
        for y, x in pa.maps[g].items():
            incoming[x].append((g, y))
    return incoming


def _orbit_supports(
    points: Sequence[int],
    incoming: Mapping[int, list[tuple[int, int]]],
    budget_left: int,
) -> tuple[list[frozenset[int]], list[int], int]:
    """All level supports: subsets hitting each point's in-arrows at most once.

    Returns (supports, parallel sources, nodes used).  Sources with two
    arrows into one target are excluded up front: any support containing one
    would multiply a positive value with itself.
    """
    parallel: set[int] = set()
    targets: dict[int, list[int]] = {y: [] for y in points}
    for x in points:
        seen: dict[int, int] = {}
        for g, y in incoming[x]:
            seen[y] = seen.get(y, 0) + 1
        for y, count in seen.items():
            targets[y].append(x)
            if count >= 2:
                parallel.add(y)
    usable = [y for y in points if y not in parallel]
    supports: list[frozenset[int]] = [frozenset()]
    nodes = 0

    def extend(prefix: list[int], start: int, hits: dict[int, int]):
        nonlocal nodes
        for idx in range(start, len(usable)):
            y = usable[idx]
            if any(hits.get(x, 0) >= 1 for x in targets[y]):
                continue
            nodes += 1
            if nodes > budget_left:
                raise _BudgetSignal(nodes)
            for x in targets[y]:
                hits[x] = hits.get(x, 0) + 1
            prefix.append(y)
            supports.append(frozenset(prefix))
            extend(prefix, idx + 1, hits)
            prefix.pop()
            for x in targets[y]:
                hits[x] -= 1

    extend([], 0, {})
    return supports, sorted(parallel), nodes


class _BudgetSignal(Exception):
    def __init__(self, nodes: int):
        self.nodes = nodes


def _solve_orbit(
    pa: PartialAction,
    points: Sequence[int],
    incoming: Mapping[int, list[tuple[int, int]]],
    d: int,
    budget: int,
) -> tuple[Optional[list[dict[int, Fraction]]], OrbitEvidence, int]:
    """Search one orbit; returns (level functions or None, evidence, cost)."""
    try:
        supports, parallel, nodes = _orbit_supports(points, incoming, budget)
    except _BudgetSignal as sig:
        raise SearchBudgetExceeded(sig.nodes, budget, frozenset(points)) from None

    source_targets: dict[int, set[int]] = {y: set() for y in points}
    for x in points:
        for g, y in incoming[x]:
            source_targets[y].add(x)

    if d == 0:
        rows = {
            y: sorted(source_targets[y])
            for y in points
            if y not in parallel and source_targets[y]
        }
        try:
            solution, dlx_nodes = solve_exact_cover(points, rows, budget=budget - nodes)
        except RuntimeError:
            raise SearchBudgetExceeded(budget, budget, frozenset(points)) from None
        evidence = OrbitEvidence(
            orbit=tuple(sorted(points)),
            parallel_sources=tuple(parallel),
            supports_found=len(supports),
            patterns_checked=dlx_nodes,
            note="level-0 search dispatched to exact cover",
        )
        if solution is None:
            return None, evidence, nodes + dlx_nodes
        level = {y: Fraction(1) for y in solution}
        return [level], evidence, nodes + dlx_nodes

    coverable = set()
    for T in supports:
        for y in T:
            coverable |= source_targets[y]
    patterns = 0
    if coverable == set(points):
        for combo in itertools.combinations_with_replacement(supports, d + 1):
            patterns += 1
            if nodes + patterns > budget:
                raise SearchBudgetExceeded(nodes + patterns, budget, frozenset(points))
            covered = set()
            for T in combo:
                for y in T:
                    covered |= source_targets[y]
            if covered != set(points):
                continue
            variables = [(j, y) for j, T in enumerate(combo) for y in sorted(T)]
            var_index = {v: i for i, v in enumerate(variables)}
            rows = []
            for x in points:
                row = [Fraction(0)] * len(variables)
                for g, y in incoming[x]:
                    for j, T in enumerate(combo):
                        if y in T:
                            row[var_index[(j, y)]] += 1
                rows.append(row)
            solution = solve_feasibility(rows, [1] * len(points), [1] * len(variables))
            if solution is not None:
                levels: list[dict[int, Fraction]] = [dict() for _ in range(d + 1)]
                for (j, y), idx in var_index.items():
                    if solution[idx]:
                        levels[j][y] = solution[idx]
                evidence = OrbitEvidence(
                    orbit=tuple(sorted(points)),
                    parallel_sources=tuple(parallel),
                    supports_found=len(supports),
                    patterns_checked=patterns,
                    note="feasible pattern found",
                )
                return levels, evidence, nodes + patterns
    note = (
        "all sources carry parallel arrows; no point can receive mass"
        if not coverable and parallel
        else "support patterns exhausted without a feasible mass assignment"
    )
    evidence = OrbitEvidence(
        orbit=tuple(sorted(points)),
        parallel_sources=tuple(parallel),
        supports_found=len(supports),
        patterns_checked=patterns,
        note=note,
    )
    return None, evidence, nodes + patterns


def towers_exist(
    pa: PartialAction, d: int, budget: int = DEFAULT_BUDGET
) -> SearchOutcome:
    """Exact towers at dimension d, or an exhaustive nonexistence proof.

    The search is independent per groupoid orbit; any returned certificate
    passes :func:`verify_certificate` exactly.
    """
    if d < 0:
        raise ValueError(f"tower dimension must be >= 0, got {d}")
    incoming = _incoming_arrows(pa)
    orbits = translation_groupoid(pa).orbits
    levels: list[dict[int, Fraction]] = [dict() for _ in range(d + 1)]
    evidence: list[OrbitEvidence] = []
    for orbit in orbits:
        points = sorted(orbit)
        orbit_levels, orb_evidence, _ = _solve_orbit(pa, points, incoming, d, budget)
        evidence.append(orb_evidence)
        if orbit_levels is None:
            return NonexistenceProof(d, tuple(evidence))
        for j, level in enumerate(orbit_levels):
            levels[j].update(level)
    cert = TowerCertificate(d, tuple(levels))
    check = verify_certificate(pa, cert)
    if not check.ok:
        raise AssertionError(f"solver produced an invalid certificate: {check.witness}")
    return cert


@dataclass(frozen=True)
class RokhlinResult:
    """Solver-computed Rokhlin dimension with its certificate or refutations."""

    dimension: float  # an int 0..|G|-1, or math.inf
    commuting_dimension: float
    certificate: Optional[TowerCertificate]
    refutations: tuple[NonexistenceProof, ...]

    @property
    def finite(self) -> bool:
        return self.dimension != math.inf


def rokhlin_dimension(pa: PartialAction, budget: int = DEFAULT_BUDGET) -> RokhlinResult:
    """Least d with exact towers, or infinity when every d < |G| fails.

    Infinite output is justified by the freeness obstruction (a fixed point
    blocks every dimension) together with the dimension bound for free
    actions on zero-dimensional carriers, and is cross-checked against
    freeness.  The commuting-towers value equals the plain value because all
    towers live in a commutative function algebra.
    """
    refutations: list[NonexistenceProof] = []
    for d in range(max(1, pa.group.order)):
        outcome = towers_exist(pa, d, budget=budget)
        if isinstance(outcome, TowerCertificate):
            return RokhlinResult(d, d, outcome, tuple(refutations))
        refutations.append(outcome)
    if is_free(pa):
        raise AssertionError(
            "free finite partial action with no towers below the group order; "
            "this contradicts the dimension bound for free actions"
        )
    return RokhlinResult(math.inf, math.inf, None, tuple(refutations))


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    witness: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(pa: PartialAction, cert: TowerCertificate) -> CertificateCheck:
    """Exact check of the tower conditions, derived and raw forms.

    Derived form: supports inside domains, equivariance along every arrow
    pair, per-level orthogonality, partition of unity.  Raw form: the tower
    conditions with indicator witnesses at epsilon = 0.
    """
    G = pa.group
    towers = derived_towers(pa, cert)
    for j in range(cert.d + 1):
        for x, v in cert.levels[j].items():
            if x not in pa.carrier:
                return CertificateCheck(False, f"level {j} assigns mass to non-carrier point {x}")
            if not (0 <= v <= 1):
                return CertificateCheck(False, f"level {j} value at {x} is outside [0, 1]")
    for g in G.elements():
        for j in range(cert.d + 1):
            if any(z not in pa.domain(g) for z in towers[g][j]):
                return CertificateCheck(False, f"tower f_{g}^({j}) leaves its domain")
    # (C1) equivariance: f_{gh}(theta_g(y)) = f_h(y) for y in X_{g^-1} & X_h.
    for g in G.elements():
        for h in G.elements():
            gh = G.mul(g, h)
            for y in pa.domain(G.inv(g)) & pa.domain(h):
                z = pa.theta(g, y)
                for j in range(cert.d + 1):
                    if towers[gh][j].get(z, Fraction(0)) != towers[h][j].get(y, Fraction(0)):
                        return CertificateCheck(
                            False, f"equivariance fails at (g={g}, h={h}, y={y}, level {j})"
                        )
    # (C2) per-level orthogonality.
    for j in range(cert.d + 1):
        for x in pa.carrier:
            positive = [g for g in G.elements() if towers[g][j].get(x, Fraction(0)) > 0]
            if len(positive) > 1:
                return CertificateCheck(
                    False, f"orthogonality fails at point {x}, level {j}: towers {positive}"
                )
    # (C3) partition of unity.
    for x in pa.carrier:
        total = sum(
            towers[g][j].get(x, Fraction(0))
            for g in G.elements()
            for j in range(cert.d + 1)
        )
        if total != 1:
            return CertificateCheck(False, f"tower masses sum to {total} != 1 at point {x}")
    # Raw tower conditions with indicator witnesses at epsilon = 0.
    for g in G.elements():
        for y in pa.domain(G.inv(g)):
            z = pa.theta(g, y)
            for h in G.elements():
                gh = G.mul(g, h)
                for j in range(cert.d + 1):
                    lhs = towers[h][j].get(y, Fraction(0))
                    rhs = towers[gh][j].get(z, Fraction(0))
                    if lhs != rhs:
                        return CertificateCheck(
                            False,
                            f"raw condition (1) fails at (g={g}, h={h}, y={y}, level {j})",
                        )
    return CertificateCheck(True, None)


def orthogonal_lifts(
    carrier: Iterable[int],
    J: Iterable[int],
    ideals: Sequence[frozenset[int]],
    xs: Sequence[Mapping[int, Fraction]],
) -> list[dict[int, Fraction]]:
    """Orthogonalize positive contractions without moving them off J.

    Given x_j supported in A_j with all pairwise products supported inside J,
    returns pairwise orthogonal y_j <= x_j with supp y_j in A_j and
    y_j = x_j off J.  Base case subtracts positive parts; the inductive step
    peels the last function off the sum of the others.
    """
    X = frozenset(carrier)
    Jset = frozenset(J)
    if not Jset <= X:
        raise PreconditionViolated("J must be a subset of the carrier", sorted(Jset - X)[0])
    n = len(xs)
    if len(ideals) != n:
        raise ValueError("need one ideal per function")
    funcs = [{p: Fraction(v) for p, v in x.items() if Fraction(v) != 0} for x in xs]
    for j, (x, A_j) in enumerate(zip(funcs, ideals)):
        for p, v in x.items():
            if p not in A_j:
                raise PreconditionViolated(f"x_{j} is supported outside its ideal", p)
            if not (0 <= v <= 1):
                raise PreconditionViolated(f"x_{j} is not a [0, 1]-valued contraction", p)
    for j in range(n):
        for k in range(j + 1, n):
            for p in set(funcs[j]) & set(funcs[k]):
                if p not in Jset and funcs[j][p] * funcs[k][p] != 0:
                    raise PreconditionViolated(
                        f"x_{j} * x_{k} does not vanish off J", p
                    )
    return _orthogonalize(funcs, X)


def _pos_part(f: Mapping[int, Fraction], g: Mapping[int, Fraction]) -> dict[int, Fraction]:
    out = {}
    for p in set(f) | set(g):
        v = f.get(p, Fraction(0)) - g.get(p, Fraction(0))
        if v > 0:
            out[p] = v
    return out


def _orthogonalize(xs: list[dict[int, Fraction]], X: frozenset[int]) -> list[dict[int, Fraction]]:
    n = len(xs)
    if n == 0:
        return []
    if n == 1:
        return [dict(xs[0])]
    if n == 2:
        return [_pos_part(xs[0], xs[1]), _pos_part(xs[1], xs[0])]
    head, last = xs[:-1], xs[-1]
    total: dict[int, Fraction] = {}
    for f in head:
        for p, v in f.items():
            total[p] = total.get(p, Fraction(0)) + v
    y_last = _pos_part(last, total)
    trimmed = [_pos_part(f, last) for f in head]
    ys = _orthogonalize(trimmed, X)
    return ys + [y_last]


# --------------------------------------------------------------------------
# Independent oracle: raw tower search at epsilon > 0 over a value grid.
# --------------------------------------------------------------------------

DEFAULT_VALUE_GRID = tuple(Fraction(k, 8) for k in range(9))


class OracleBudgetExceeded(RuntimeError):
    pass


def oracle_towers_exist(
    pa: PartialAction,
    d: int,
    eps: Fraction,
    value_grid: Sequence[Fraction] = DEFAULT_VALUE_GRID,
    node_cap: int = 2_000_000,
) -> bool:
    """Brute-force the raw tower conditions at a fixed epsilon.

    Searches all towers f_g^(j) with values on the grid, independently per
    point, against the conditions instantiated with indicator witnesses:

      (1) |f_h(y) - f_{gh}(theta_g(y))| < eps along every arrow,
      (2) pointwise per-level products below eps,
      (3) pointwise total mass within eps of 1.

    This does not assume the identity-level reduction, so it independently
    validates the exact solver's epsilon = 0 characterization on small
    instances.
    """
    eps = Fraction(eps)
    G = pa.group
    points = sorted(pa.carrier)
    if not points:
        return True
    incoming = _incoming_arrows(pa)
    member_groups = {x: sorted(g for g in G.elements() if x in pa.domain(g)) for x in points}
    grid = sorted(Fraction(v) for v in value_grid)

    local_cache: dict[int, list[tuple[tuple[Fraction, ...], ...]]] = {}

    def local_assignments(x: int) -> list[tuple[tuple[Fraction, ...], ...]]:
        """All per-level value tuples at x satisfying (2) and (3)."""
        if x in local_cache:
            return local_cache[x]
        gs = member_groups[x]
        per_level: list[tuple[Fraction, ...]] = []

        def level_options(prefix: list[Fraction]):
            if len(prefix) == len(gs):
                per_level.append(tuple(prefix))
                return
            for v in grid:
                if all(v * w < eps for w in prefix):
                    prefix.append(v)
                    level_options(prefix)
                    prefix.pop()

        level_options([])
        results: list[tuple[tuple[Fraction, ...], ...]] = []

        def across_levels(chosen: list[tuple[Fraction, ...]], total: Fraction):
            if len(chosen) == d + 1:
                if abs(total - 1) < eps:
                    results.append(tuple(chosen))
                return
            remaining = d + 1 - len(chosen)
            max_level = len(gs) * grid[-1]
            if total - eps >= 1 or total + remaining * max_level <= 1 - eps:
                return
            for tup in per_level:
                across_levels(chosen + [tup], total + sum(tup))

        across_levels([], Fraction(0))
        local_cache[x] = results
        return results

    nodes = 0
    assignment: dict[int, tuple[tuple[Fraction, ...], ...]] = {}

    def get_value(x: int, j: int, g: int) -> Fraction:
        gs = member_groups[x]
        if g not in pa.domain_tuple(x):
            return Fraction(0)
        return assignment[x][j][gs.index(g)]

    def consistent(x: int) -> bool:
        # Raw condition (1) along arrows between x and already-assigned points.
        for g, y in incoming[x]:
            if y not in assignment:
                continue
            for h in G.elements():
                gh = G.mul(g, h)
                for j in range(d + 1):
                    lhs = get_value(y, j, h) if h in pa.domain_tuple(y) else Fraction(0)
                    rhs = get_value(x, j, gh) if gh in pa.domain_tuple(x) else Fraction(0)
                    if abs(lhs - rhs) >= eps:
                        return False
        # Outgoing arrows from x to assigned points.
        for g in G.elements():
            y = pa.maps[g].get(x)
            if y is None or y == x or y not in assignment:
                continue
            for h in G.elements():
                gh = G.mul(g, h)
                for j in range(d + 1):
                    lhs = get_value(x, j, h) if h in pa.domain_tuple(x) else Fraction(0)
                    rhs = get_value(y, j, gh) if gh in pa.domain_tuple(y) else Fraction(0)
                    if abs(lhs - rhs) >= eps:
                        return False
        return True

    def search(idx: int) -> bool:
        nonlocal nodes
        if idx == len(points):
            return True
        x = points[idx]
        for option in local_assignments(x):
            nodes += 1
            if nodes > node_cap:
                raise OracleBudgetExceeded(f"oracle exceeded {node_cap} nodes")
            assignment[x] = option
            if consistent(x) and search(idx + 1):
                return True
            del assignment[x]
        return False

    return search(0)
