import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ucddp.instance_io import Instance, generate_random  # noqa: E402


@pytest.fixture
def i2():
    """Two tasks: p=(1,2), alpha=(1,1), beta=(2,1), d=3."""
    return Instance((1, 2), (1, 1), (2, 1), 3)


def small_instances(count, n_values, seed0=0, ranges=((1, 9), (1, 6), (1, 6))):
    """Deterministic small corpus; narrow ranges produce many ratio ties."""
    out = []
    for k in range(count):
        n = n_values[k % len(n_values)]
        out.append(generate_random(n, seed0 + k, *ranges))
    return out
