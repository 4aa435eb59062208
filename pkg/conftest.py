"""
Shared fixtures for the test suite.
"""

import json
import math

import pytest
from hypothesis import settings

from cone_graph import ConeGraph, complete_graph, cycle_graph, path_graph, star_graph

settings.register_profile("conespec", deadline=None, max_examples=25)
settings.load_profile("conespec")


@pytest.fixture
def triangle():
    """C_3 with θ ≡ 2π/3: the flat plane."""
    return cycle_graph(3, 2 * math.pi / 3)


@pytest.fixture
def square():
    """C_4 with θ ≡ π/2: also the flat plane."""
    return cycle_graph(4, math.pi / 2)


@pytest.fixture
def single_edge():
    """K_2 with θ = π/2."""
    return path_graph(2, math.pi / 2)


@pytest.fixture
def star():
    """K_{1,3} with θ ≡ π/3."""
    return star_graph(3, math.pi / 3)


@pytest.fixture
def k4():
    return complete_graph(4, math.pi / 2)


@pytest.fixture
def mixed_path():
    """P_3 with θ = {1, 2}: a Neumann interval of length 3."""
    return path_graph(3, [1.0, 2.0])


@pytest.fixture
def write_graph(tmp_path):
    """Write a graph (ConeGraph or raw dict/text) to a JSON file and return its path."""

    def _write(graph, name="graph.json"):
        path = tmp_path / name
        if isinstance(graph, ConeGraph):
            path.write_text(json.dumps(graph.to_dict()))
        elif isinstance(graph, str):
            path.write_text(graph)
        else:
            path.write_text(json.dumps(graph))
        return str(path)

    return _write
