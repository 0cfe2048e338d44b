import random

import pytest

from quiverepi import (
    Representation,
    direct_sum,
    is_brick,
    parse_quiver,
    random_representation,
)

A2_TEXT = "vertices 1 2\narrow a 1 2\n"
A3_TEXT = "vertices 1 2 3\narrow a 1 2\narrow b 2 3\n"
KRONECKER_TEXT = "vertices 1 2\narrow a 1 2\narrow b 1 2\n"


@pytest.fixture(scope="session")
def a2():
    return parse_quiver(A2_TEXT)


@pytest.fixture(scope="session")
def a3():
    return parse_quiver(A3_TEXT)


@pytest.fixture(scope="session")
def kronecker():
    return parse_quiver(KRONECKER_TEXT)


@pytest.fixture(scope="session")
def a2_modules(a2):
    """The three indecomposables of A2, all bricks."""
    return {
        "S1": Representation(a2, {"1": 1, "2": 0}),
        "S2": Representation(a2, {"1": 0, "2": 1}),
        "P12": Representation(a2, {"1": 1, "2": 1}, {"a": [[1]]}),
    }


@pytest.fixture(scope="session")
def a3_modules(a3):
    """The six indecomposables of linear A3 (interval modules), all bricks."""
    one = [[1]]
    return {
        "S1": Representation(a3, {"1": 1, "2": 0, "3": 0}),
        "S2": Representation(a3, {"1": 0, "2": 1, "3": 0}),
        "S3": Representation(a3, {"1": 0, "2": 0, "3": 1}),
        "I12": Representation(a3, {"1": 1, "2": 1, "3": 0}, {"a": one}),
        "I23": Representation(a3, {"1": 0, "2": 1, "3": 1}, {"b": one}),
        "I123": Representation(a3, {"1": 1, "2": 1, "3": 1}, {"a": one, "b": one}),
    }


@pytest.fixture(scope="session")
def catalogue(a2_modules, a3_modules):
    """All nine A2/A3 indecomposables."""
    return list(a2_modules.values()) + list(a3_modules.values())


@pytest.fixture(scope="session")
def kron_preprojective(kronecker):
    """The (1,2) preprojective Kronecker brick."""
    return Representation(kronecker, {"1": 1, "2": 2},
                          {"a": [[1], [0]], "b": [[0], [1]]})


def find_random_bricks(a2, a3, kronecker, count=5, seed=2024):
    """Deterministic seeded search for small random bricks."""
    rng = random.Random(seed)
    specs = [
        (a2, {"1": 1, "2": 1}),
        (a3, {"1": 1, "2": 1, "3": 1}),
        (kronecker, {"1": 1, "2": 2}),
        (kronecker, {"1": 1, "2": 1}),
        (kronecker, {"1": 2, "2": 3}),
    ]
    bricks = []
    for q, dims in specs[:count]:
        while True:
            m = random_representation(q, dims, rng)
            if is_brick(m):
                bricks.append(m)
                break
    return bricks


@pytest.fixture(scope="session")
def random_bricks(a2, a3, kronecker):
    return find_random_bricks(a2, a3, kronecker)


@pytest.fixture(scope="session")
def decomposable_fixtures(a2_modules, a3_modules, kronecker, kron_preprojective):
    s1, s2, p12 = a2_modules["S1"], a2_modules["S2"], a2_modules["P12"]
    s1_kron = Representation(kronecker, {"1": 1, "2": 0})
    return [
        direct_sum(s1, s1),
        direct_sum(s1, s2),
        direct_sum(p12, s2),
        direct_sum(a3_modules["I123"], a3_modules["S2"]),
        direct_sum(kron_preprojective, s1_kron),
    ]
