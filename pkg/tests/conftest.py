import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mergemetrics import random_tree, validate

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def tree_a():
    # leaves at 0 and 1 merging at 3
    return validate([(0, 2), (1, 2), (3, None)])


def tree_b():
    # same shape as tree_a, merging at 2
    return validate([(0, 2), (1, 2), (2, None)])


def tree_c():
    return validate([(0, 4), (1, 3), (2, 3), (2.5, 4), (4, None)])


@pytest.fixture
def t_a():
    return tree_a()


@pytest.fixture
def t_b():
    return tree_b()


@pytest.fixture
def t_c():
    return tree_c()


def rough_tree(seed: int, n_nodes: int):
    """Random tree on a coarse half-integer grid, so tied heights and
    non-binary merges are common. Parents are drawn among strictly higher
    nodes; the top node is lifted to make it the unique root."""
    rng = np.random.default_rng(seed)
    heights = np.sort(rng.integers(0, 9, size=n_nodes)) / 2.0
    heights[-1] = heights[:-1].max(initial=0.0) + 0.5 if n_nodes > 1 else heights[-1]
    nodes = []
    for i in range(n_nodes):
        if i == n_nodes - 1:
            nodes.append((float(heights[i]), None))
            continue
        higher = [j for j in range(i + 1, n_nodes) if heights[j] > heights[i]]
        nodes.append((float(heights[i]), int(rng.choice(higher))))
    return validate(nodes)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def binary_trees(draw, max_leaves: int = 4):
    return random_tree(draw(st.integers(1, max_leaves)), draw(seeds))


@st.composite
def any_trees(draw, max_nodes: int = 7):
    if draw(st.booleans()):
        return draw(binary_trees())
    return rough_tree(draw(seeds), draw(st.integers(1, max_nodes)))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda x: int(x.split()[2])):
            terminalreporter.write_line(line)
