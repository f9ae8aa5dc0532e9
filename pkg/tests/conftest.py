import numpy as np
import pytest

import framesens as fs


@pytest.fixture
def worked_family():
    """D(eps) = [[eps, -1], [2 eps, -2]]: rank one for every eps, unit null
    branch (1, eps)/sqrt(1+eps^2)."""
    return fs.ParametrizedSystem.from_entry_dict(
        2,
        1,
        {(0, 0): [(1.0, (1,))], (0, 1): -1.0, (1, 0): [(2.0, (1,))], (1, 1): -2.0},
        name="worked-direct",
    )


@pytest.fixture
def eps_family_nh():
    """D = [[1, eps], [eps, eps^2]] with b = (1, eps): row 2 is eps * row 1
    for both sides, so the system is consistent with rank one everywhere."""
    return fs.ParametrizedSystem.from_entry_dict(
        2,
        1,
        {
            (0, 0): 1.0,
            (0, 1): [(1.0, (1,))],
            (1, 0): [(1.0, (1,))],
            (1, 1): [(1.0, (2,))],
        },
        rhs={0: 1.0, 1: [(1.0, (1,))]},
        name="eps-nonhomogeneous",
    )


def random_rank_deficient(rng, n, r):
    """Matrix of exact construction rank r (product of thin random factors)."""
    if r == 0:
        return np.zeros((n, n))
    return rng.standard_normal((n, r)) @ rng.standard_normal((r, n))


@pytest.fixture(scope="session")
def family_cache():
    """Generated families shared across tests; keyed by (seed, n, N, degree)."""
    cache = {}

    def get(seed, n, N, degree):
        key = (seed, n, N, degree)
        if key not in cache:
            cache[key] = fs.generate_family(seed, n, N, degree)
        return cache[key]

    return get
