import pytest

from optibench.models import QuboInstance
from optibench.utils import make_rng


def random_qubo(n: int, seed: int, density: float = 0.6) -> QuboInstance:
    rng = make_rng(seed)
    linear = {i: float(rng.normal()) for i in range(n)}
    quadratic = {
        (i, j): float(rng.normal())
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    }
    return QuboInstance(n, linear, quadratic, offset=float(rng.normal()))


@pytest.fixture
def make_qubo():
    return random_qubo
