import itertools

import pytest
from hypothesis import strategies as st

from zvline import Graph, generate, partition

# fixtures audited exhaustively by the acceptance suite
CERT_FIXTURES = {
    "clique(4)": ("clique", 4),
    "biclique(3,3)": ("biclique", 3, 3),
    "discrete_line(4)": ("discrete_line", 4),
    "double_v_line(3)": ("double_v_line", 3),
    "grid2n(4)": ("grid2n", 4),
    "family_F(2,2,2)": ("family_F", 2, 2, 2),
    "rooted_tree(3,2)": ("rooted_tree", 3, 2),
    "block_graph(3,3,3)": ("block_graph", (3, 3, 3)),
}


def cert_fixture(name):
    spec = CERT_FIXTURES[name]
    return generate(spec[0], *spec[1:])


@pytest.fixture
def path5():
    """z1 - v1 - z2 - v2 - z3 with singleton subgraphs."""
    g = Graph(["z1", "z2", "z3", "v1", "v2"], [("z1", "v1"), ("v1", "z2"), ("z2", "v2"), ("v2", "z3")])
    return g, partition(["z1", "z2", "z3"], ["v1"], ["v2"])


@pytest.fixture
def k3():
    g = Graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    return g, partition(["a", "b", "c"])


@pytest.fixture
def weighted():
    ag = generate("weighted_counterexample")
    return ag.graph, ag.partition


@pytest.fixture
def line3():
    return Graph(["1", "2", "3"], [("1", "2"), ("2", "3")])


def profiles(vertices, max_agents):
    for n in range(1, max_agents + 1):
        yield from itertools.combinations_with_replacement(vertices, n)


@st.composite
def connected_graphs(draw, min_vertices=1, max_vertices=8, weighted=False):
    """Random connected graph: a random spanning tree plus extra edges."""
    n = draw(st.integers(min_vertices, max_vertices))
    names = [f"x{i}" for i in range(n)]
    lengths = st.integers(1, 5) if weighted else st.just(1)
    edges = {}
    for i in range(1, n):
        j = draw(st.integers(0, i - 1))
        edges[(j, i)] = draw(lengths)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
    if pairs:
        for pair in draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))):
            edges[pair] = draw(lengths)
    return Graph(names, [(names[i], names[j], length) for (i, j), length in edges.items()])
