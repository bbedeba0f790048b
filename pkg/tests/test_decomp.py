import pytest

from partact.decomp import (
    EmptyStratum,
    NotDecomposable,
    PointOutOfRange,
    domain_tuple,
    global_subsystem,
    is_n_decomposable,
    orbit_type_decomposition,
    stratification,
)
from partact.groups import build_group
from partact.pactions import (
    global_action,
    is_free,
    random_partial_action,
    restricted_to,
    validate,
)


def test_domain_tuple_swap_pair(swap_pair):
    assert domain_tuple(swap_pair, 0) == frozenset({0, 1})
    assert domain_tuple(swap_pair, 2) == frozenset({0})
    with pytest.raises(PointOutOfRange):
        domain_tuple(swap_pair, 9)


def test_domain_tuple_global():
    c3 = build_group(("cyclic", 3))
    rot = global_action(c3, {0, 1, 2}, {0: {0: 0, 1: 1, 2: 2}, 1: {0: 1, 1: 2, 2: 0}, 2: {0: 2, 1: 0, 2: 1}})
    assert all(domain_tuple(rot, x) == frozenset({0, 1, 2}) for x in rot.carrier)


def test_is_n_decomposable_swap_pair(swap_pair):
    assert not is_n_decomposable(swap_pair, 1)
    assert not is_n_decomposable(swap_pair, 2)


def test_swap_pair_restriction_is_2_decomposable(swap_pair):
    part = restricted_to(swap_pair, {0, 1})
    assert is_n_decomposable(part, 2)


def test_trivial_is_1_decomposable(idle_triple):
    assert is_n_decomposable(idle_triple, 1)


def test_stratification_swap_pair(swap_pair):
    s = stratification(swap_pair)
    assert s.stratum(2) == frozenset({0, 1})
    assert s.stratum(1) == frozenset({2})
    ideal, total, quotient = s.chain[2]
    assert ideal.carrier == frozenset({0, 1})
    assert total.carrier == swap_pair.carrier
    assert quotient.carrier == frozenset({2})
    # Reassembly: the top of the chain is the input.
    assert total.domains == swap_pair.domains and total.maps == swap_pair.maps


def test_stratification_single_stratum():
    c2 = build_group(("cyclic", 2))
    swap = global_action(c2, {0, 1}, {0: {0: 0, 1: 1}, 1: {0: 1, 1: 0}})
    s = stratification(swap)
    assert s.stratum(2) == frozenset({0, 1})
    assert s.stratum(1) == frozenset()


def test_stratification_idle_triple(idle_triple):
    s = stratification(idle_triple)
    assert s.stratum(1) == idle_triple.carrier
    assert s.stratum(2) == frozenset()


def test_strata_restrictions_are_k_decomposable():
    for seed in range(12):
        pa = random_partial_action(seed, ("cyclic", 4), 8, 0.55)
        s = stratification(pa)
        for k in range(1, pa.group.order + 1):
            if s.stratum(k):
                assert is_n_decomposable(restricted_to(pa, s.stratum(k)), k)


def test_orbit_type_decomposition_swap_pair_restriction(swap_pair):
    part = restricted_to(swap_pair, {0, 1})
    parts = orbit_type_decomposition(part, 2)
    assert len(parts) == 1
    p = parts[0]
    assert p.representative == frozenset({0, 1})
    assert p.carrier_X_tau == frozenset({0, 1})
    assert p.stabilizer.members == frozenset({0, 1})
    assert p.subsystem.is_global()


def test_orbit_type_decomposition_trivial(idle_triple):
    parts = orbit_type_decomposition(idle_triple, 1)
    assert len(parts) == 1
    assert parts[0].part == idle_triple.carrier
    assert parts[0].stabilizer.members == frozenset({0})


def test_orbit_type_decomposition_disjoint_union():
    c2 = build_group(("cyclic", 2))
    two_swaps = global_action(
        c2,
        {0, 1, 10, 11},
        {0: {x: x for x in (0, 1, 10, 11)}, 1: {0: 1, 1: 0, 10: 11, 11: 10}},
    )
    parts = orbit_type_decomposition(two_swaps, 2)
    assert len(parts) == 1  # single orbit class {1, g}; one part covering everything
    assert parts[0].part == frozenset({0, 1, 10, 11})
    assert sorted(len(o) for o in (parts[0].carrier_X_tau,)) == [4]


def test_orbit_type_decomposition_two_classes():
    c4 = build_group(("cyclic", 4))
    # Two points swapped by g^2 only: every point lies in exactly the domains {1, g^2}.
    pa = validate(
        c4,
        {0, 1},
        {0: {0, 1}, 1: set(), 2: {0, 1}, 3: set()},
        {0: {0: 0, 1: 1}, 1: {}, 2: {0: 1, 1: 0}, 3: {}},
    )
    parts = orbit_type_decomposition(pa, 2)
    assert len(parts) == 1
    assert parts[0].representative == frozenset({0, 2})
    assert parts[0].stabilizer.members == frozenset({0, 2})


def test_global_subsystem_fixed_single_is_cyclic2(fixed_single):
    H, sub = global_subsystem(fixed_single, {0, 1})
    assert H.members == frozenset({0, 1})
    assert sub.carrier == frozenset({0})
    assert not is_free(sub)


def test_global_subsystem_errors(swap_pair, idle_triple):
    with pytest.raises(NotDecomposable):
        global_subsystem(swap_pair, {0, 1})
    with pytest.raises(EmptyStratum):
        # Trivial action is 1-decomposable but has no {1}-stratum gaps; use a
        # 2-tuple on a 2-decomposable action with the wrong class instead.
        c4 = build_group(("cyclic", 4))
        pa = validate(
            c4,
            {0, 1},
            {0: {0, 1}, 1: set(), 2: {0, 1}, 3: set()},
            {0: {0: 0, 1: 1}, 1: {}, 2: {0: 1, 1: 0}, 3: {}},
        )
        global_subsystem(pa, {0, 1})


def test_freeness_transfers_to_subsystems():
    for seed in range(20):
        pa = random_partial_action(seed, "klein4", 8, 0.6)
        s = stratification(pa)
        for k in range(1, 5):
            stratum = s.stratum(k)
            if not stratum:
                continue
            layer = restricted_to(pa, stratum)
            parts = orbit_type_decomposition(layer, k)
            assert is_free(layer) == all(is_free(p.subsystem) for p in parts)
