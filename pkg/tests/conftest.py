import pytest

from maxminalloc.model import Epsilon
from maxminalloc import gen


def small_corpus():
    """Random exact-solvable instances: n in 3..5, m <= 12, m_heavy <= 6.

    With at least 3 agents and at most 6 heavy items the total weight is
    at most 9, so the CLP threshold T* <= W/n <= 3 on every instance.
    """
    shapes = [(3, 2, 6), (3, 4, 8), (4, 3, 7), (4, 6, 6), (5, 2, 8), (5, 5, 7)]
    out = []
    seed = 0
    for p, q in [(1, 2), (1, 3), (1, 4)]:
        eps = Epsilon(p, q)
        for density in (0.3, 0.6, 1.0):
            for n, mh, ml in shapes:
                for _ in range(4):
                    out.append(gen.gen_random(n, mh, ml, density, eps, seed))
                    seed += 1
    return out


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()
