import itertools
import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from bitprobe.graphs import Graph

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=150
)
settings.load_profile("default")


def random_graph(rng: random.Random, n_min=3, n_max=8, max_edges=12) -> Graph:
    N = rng.randint(n_min, n_max)
    pairs = list(itertools.combinations(range(N), 2))
    M = rng.randint(0, min(max_edges, len(pairs)))
    return Graph.from_edges(N, rng.sample(pairs, M))


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
