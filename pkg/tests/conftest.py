"""Test configuration and fixtures."""

import networkx as nx
import pytest

from src.config import PackingConfig
from src.lattice_graph import LatticeGraph, build_graph
from src.params import PackingParams


@pytest.fixture(scope="session")
def settings():
    """Built-in defaults, independent of the config file on disk."""
    return PackingConfig()


@pytest.fixture(scope="session")
def path_graph(settings):
    """G_1 with r=1, s=8: the path on 9 vertices."""
    return build_graph(PackingParams(n=1, r=1, s=8), settings)


@pytest.fixture(scope="session")
def king_3x3(settings):
    """G_2 with r=1, s=2: the 3x3 king graph."""
    return build_graph(PackingParams(n=2, r=1, s=2), settings)


@pytest.fixture(scope="session")
def king_9x9(settings):
    """G_2 with r=1, s=8: the 9x9 king graph."""
    return build_graph(PackingParams(n=2, r=1, s=8), settings)


@pytest.fixture(scope="session")
def cube_3d(settings):
    """G_3 with r=1, s=4: 125 vertices, 26-neighborhood adjacency."""
    return build_graph(PackingParams(n=3, r=1, s=4), settings)


def to_networkx(g: LatticeGraph) -> nx.Graph:
    """The same graph as a networkx graph on vertex indices."""
    graph = nx.from_scipy_sparse_array(g.adjacency)
    graph.add_nodes_from(range(g.vertex_count))
    return graph
