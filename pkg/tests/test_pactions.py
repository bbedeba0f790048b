import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partact.groups import build_group
from partact.pactions import (
    CompositionViolation,
    IdentityDomainNotFull,
    NotBijective,
    NotInvariant,
    PartialAction,
    central_splitting,
    freeness_witness,
    global_action,
    globalize,
    is_free,
    minimal_partial_unitization,
    random_partial_action,
    restrict_and_quotient,
    restricted_to,
    translation_groupoid,
    trivial_partial_action,
    validate,
)

GROUP_SPECS = [("cyclic", 2), ("cyclic", 3), ("cyclic", 4), "klein4", ("cyclic", 6), ("symmetric", 3)]


def corpus(count=30, specs=GROUP_SPECS, base_seed=0):
    out = []
    for i in range(count):
        spec = specs[i % len(specs)]
        keep = (0.0, 0.3, 0.5, 0.8, 1.0)[i % 5]
        out.append(random_partial_action(base_seed + i, spec, ambient_size=4 + i % 7, keep_probability=keep))
    return out


def test_validate_swap_pair(swap_pair):
    assert swap_pair.domain(1) == frozenset({0, 1})
    assert swap_pair.theta(1, 0) == 1


def test_validate_rejects_non_bijection(c2):
    with pytest.raises(NotBijective) as err:
        validate(
            c2,
            {0, 1, 2},
            {0: {0, 1, 2}, 1: {0, 1}},
            {0: {0: 0, 1: 1, 2: 2}, 1: {0: 1, 1: 1}},
        )
    assert err.value.g == 1


def test_validate_rejects_composition_violation():
    c4 = build_group(("cyclic", 4))
    X = {0, 1}
    swap = {0: 1, 1: 0}
    with pytest.raises(CompositionViolation) as err:
        validate(
            c4,
            X,
            {g: X for g in range(4)},
            {0: {0: 0, 1: 1}, 1: dict(swap), 2: dict(swap), 3: dict(swap)},
        )
    assert (err.value.g, err.value.h) == (1, 1)


def test_validate_requires_full_identity_domain(c2):
    with pytest.raises(IdentityDomainNotFull):
        validate(c2, {0, 1}, {0: {0}, 1: set()}, {0: {0: 0}, 1: {}})


def test_freeness(swap_pair, fixed_single, idle_triple):
    assert is_free(swap_pair)
    assert freeness_witness(fixed_single) == (1, 0)
    assert is_free(idle_triple)


def test_translation_groupoid_swap_pair(swap_pair):
    gr = translation_groupoid(swap_pair)
    assert len(gr.arrows) == 5
    assert gr.orbits == (frozenset({0, 1}), frozenset({2}))
    assert all(sub.order == 1 for sub in gr.stabilizers.values())


def test_translation_groupoid_fixed_single(fixed_single):
    gr = translation_groupoid(fixed_single)
    assert len(gr.arrows) == 2
    assert gr.orbits == (frozenset({0}),)
    assert gr.stabilizers[0].order == 2


def test_translation_groupoid_idle_triple(idle_triple):
    gr = translation_groupoid(idle_triple)
    assert len(gr.arrows) == 3
    assert len(gr.orbits) == 3
    assert all(sub.order == 1 for sub in gr.stabilizers.values())


def test_restrict_and_quotient_swap_pair(swap_pair):
    part, rest = restrict_and_quotient(swap_pair, {0, 1})
    assert part.is_global() and part.carrier == frozenset({0, 1})
    assert rest.carrier == frozenset({2}) and rest.domain(1) == frozenset()


def test_restrict_not_invariant(swap_pair):
    with pytest.raises(NotInvariant) as err:
        restrict_and_quotient(swap_pair, {0})
    g, x, y = err.value.arrow
    assert g == 1 and {x, y} == {0, 1}


def test_restrict_whole_carrier(swap_pair):
    part, rest = restrict_and_quotient(swap_pair, swap_pair.carrier)
    assert part.carrier == swap_pair.carrier
    assert rest.carrier == frozenset()


def test_globalize_swap_pair(swap_pair):
    res = globalize(swap_pair)
    assert res.envelope.size() == 4
    assert res.envelope.is_global()
    # The envelope is a free involution: two 2-cycles.
    assert is_free(res.envelope)
    orbits = translation_groupoid(res.envelope).orbits
    assert sorted(len(o) for o in orbits) == [2, 2]


def test_globalize_idle_triple(idle_triple):
    res = globalize(idle_triple)
    assert res.envelope.size() == 6
    orbits = translation_groupoid(res.envelope).orbits
    assert sorted(len(o) for o in orbits) == [2, 2, 2]


def test_globalize_global_input_is_bijective(fixed_single):
    res = globalize(fixed_single)
    assert res.envelope.size() == 1
    assert set(res.embedding.values()) == set(res.envelope.carrier)


def test_globalize_restricts_back(swap_pair):
    res = globalize(swap_pair)
    emb = res.embedding
    image = frozenset(emb.values())
    back = restricted_to(res.envelope, image)
    for g in swap_pair.group.elements():
        assert frozenset(emb[x] for x in swap_pair.domain(g)) == back.domain(g)
        for x in swap_pair.domain(swap_pair.group.inv(g)):
            assert back.theta(g, emb[x]) == emb[swap_pair.theta(g, x)]


def test_central_splitting_swap_pair(swap_pair):
    res = globalize(swap_pair)
    split = central_splitting(res)
    emb = res.embedding
    # Canonical order (1, g): the identity translate claims iota(X) first, so
    # the g-translate only keeps the class of (g, 2), pulled back to iota(2).
    assert split[0] == frozenset(emb.values())
    assert split[1] == frozenset({emb[2]})


def test_central_splitting_global_input(fixed_single):
    split = central_splitting(globalize(fixed_single))
    assert split[0] == frozenset({0})
    assert split[1] == frozenset()


def test_central_splitting_idle_triple(idle_triple):
    res = globalize(idle_triple)
    split = central_splitting(res)
    assert split[0] == split[1] == frozenset(res.embedding.values())


def test_minimal_partial_unitization(swap_pair):
    plus = minimal_partial_unitization(swap_pair)
    assert plus.size() == 4
    assert plus.domain(1) == frozenset({0, 1})
    assert is_free(plus)


def test_minimal_partial_unitization_preserves_freeness_iff(fixed_single):
    plus = minimal_partial_unitization(fixed_single)
    assert not is_free(plus)


def test_minimal_partial_unitization_never_global(c2):
    swap = global_action(c2, {0, 1}, {0: {0: 0, 1: 1}, 1: {0: 1, 1: 0}})
    plus = minimal_partial_unitization(swap)
    assert not plus.is_global()
    assert is_free(swap) and is_free(plus)


def test_random_keep_probability_extremes():
    pa1 = random_partial_action(7, ("cyclic", 3), 6, 1.0)
    assert pa1.is_global() and pa1.size() == 6
    pa0 = random_partial_action(7, ("cyclic", 3), 6, 0.0)
    assert pa0.size() == 0


def test_random_is_deterministic():
    a = random_partial_action(42, ("symmetric", 3), 9, 0.6)
    b = random_partial_action(42, ("symmetric", 3), 9, 0.6)
    assert a.carrier == b.carrier and a.domains == b.domains and a.maps == b.maps


def test_random_corpus_validates_and_derived_identities_hold():
    for pa in corpus(24):
        G = pa.group
        for g in G.elements():
            for h in G.elements():
                lhs = frozenset(pa.theta(g, x) for x in pa.domain(G.inv(g)) & pa.domain(h))
                assert lhs == pa.domain(g) & pa.domain(G.mul(g, h))
                # Unit identity in indicator form: 1_{gh} 1_g = alpha_g(1_h 1_{g^-1}).
                for z in pa.domain(g):
                    lhs_val = int(z in pa.domain(G.mul(g, h)))
                    rhs_val = int(pa.theta(G.inv(g), z) in pa.domain(h))
                    assert lhs_val == rhs_val


def test_tuple_map_equivariance_on_corpus():
    for pa in corpus(18):
        G = pa.group
        for g in G.elements():
            for x in pa.domain(G.inv(g)):
                tau_x = pa.domain_tuple(x)
                image = frozenset(G.mul(g, h) for h in tau_x)
                assert pa.domain_tuple(pa.theta(g, x)) == image


def test_globalize_round_trip_on_corpus():
    for pa in corpus(12, base_seed=100):
        res = globalize(pa)
        assert res.envelope.size() <= pa.group.order * max(pa.size(), 1)
        emb = res.embedding
        back = restricted_to(res.envelope, frozenset(emb.values()))
        assert back.size() == pa.size()
        for g in pa.group.elements():
            assert frozenset(emb[x] for x in pa.domain(g)) == back.domain(g)


def test_central_splitting_partitions_on_corpus():
    for pa in corpus(12, base_seed=200):
        res = globalize(pa)
        split = central_splitting(res)  # partition asserted internally
        assert all(p <= frozenset(res.embedding.values()) for p in split.values())


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=25, deadline=None)
def test_random_partial_action_always_validates(seed):
    pa = random_partial_action(seed, ("cyclic", 4), 8, 0.5)
    assert isinstance(pa, PartialAction)


def test_stabilizers_constant_along_orbits():
    for pa in corpus(20, base_seed=300):
        gr = translation_groupoid(pa)
        for orbit in gr.orbits:
            orders = {
                len([g for g in pa.group.elements() if pa.maps[g].get(x) == x])
                for x in orbit
            }
            assert len(orders) == 1


def test_empty_carrier_and_trivial_group_are_valid():
    g1 = build_group(("cyclic", 1))
    empty = validate(g1, set(), {0: set()}, {0: {}})
    assert empty.size() == 0
    single = trivial_partial_action(g1, {5})
    assert single.is_global()
