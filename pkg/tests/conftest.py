import numpy as np
import pytest

from ringstar.instance import make_instance, random_instance


@pytest.fixture
def square():
    # unit square: every rounded distance is 1
    return make_instance("square", [(0, 0), (0, 1), (1, 0), (1, 1)])


@pytest.fixture(scope="session")
def small_instances():
    rng = np.random.default_rng(2024)
    return [random_instance(n, rng) for n in (6, 7, 8, 9, 12, 20, 30)]


def naive_front(vectors):
    """Quadratic non-dominated filter, deduplicated and sorted."""
    pts = sorted({(int(a), int(b)) for a, b in vectors})
    return [p for p in pts
            if not any(q[0] <= p[0] and q[1] <= p[1] and q != p for q in pts)]
