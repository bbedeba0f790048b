import pytest

from partact.groups import build_group
from partact.pactions import trivial_partial_action, validate


@pytest.fixture
def c2():
    return build_group(("cyclic", 2))


@pytest.fixture
def swap_pair(c2):
    # Swap of {0, 1} as a partial action of C2 on {0, 1, 2}.
    return validate(
        c2,
        {0, 1, 2},
        {0: {0, 1, 2}, 1: {0, 1}},
        {0: {0: 0, 1: 1, 2: 2}, 1: {0: 1, 1: 0}},
    )


@pytest.fixture
def fixed_single(c2):
    # One point fixed by the non-identity element: non-free, global.
    return validate(c2, {0}, {0: {0}, 1: {0}}, {0: {0: 0}, 1: {0: 0}})


@pytest.fixture
def idle_triple(c2):
    # Trivial partial action of C2 on three points.
    return trivial_partial_action(c2, {0, 1, 2})
