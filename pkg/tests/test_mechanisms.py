import itertools

import pytest
from conftest import connected_graphs, profiles
from hypothesis import given, settings
from hypothesis import strategies as st

from zvline import (
    BlockGraphMechanism,
    Dictator,
    DisconnectedWrapper,
    Fixed,
    FStar,
    Graph,
    LcaTree,
    Mean,
    Median,
    OrderMechanism,
    Outcome,
    SubgraphSpec,
    ZvOrderedPartition,
    block_graph_mechanism,
    dictator_mechanism,
    disconnected_wrapper,
    f_star,
    fixed_mechanism,
    generate,
    induced_global_order,
    lca_tree_mechanism,
    mean_mechanism,
    mechanism_from_spec,
    median_mechanism,
    order_mechanism,
    pareto_set,
    partition,
    recognize_zv_line,
    tree_partition,
    validate_partition,
)
from zvline.errors import (
    EmptyProfile,
    InvalidOrder,
    InvalidPartition,
    NotABlockGraph,
    NotATree,
    UnknownVertex,
    WeightedWithoutOverride,
)


class TestFStar:
    def test_path(self, path5):
        g, p = path5
        assert f_star(g, p, ["z1", "z3"]).vertex == "z1"
        assert f_star(g, p, ["v1", "v1"]).vertex == "v1"
        assert f_star(g, p, ["v1", "v2"]).vertex == "z2"

    def test_biclique(self):
        ag = generate("biclique", 5, 5)
        assert f_star(ag.graph, ag.partition, ["v1", "z3"]).vertex == "z3"
        assert f_star(ag.graph, ag.partition, ["v1", "v2"]).vertex == "z1"

    def test_weighted(self, weighted):
        g, p = weighted
        with pytest.raises(WeightedWithoutOverride):
            f_star(g, p, ["z_r", "v"])
        assert f_star(g, p, ["z_r", "v"], allow_weighted=True).vertex == "z_r"
        assert f_star(g, p, ["z_r", "z_l"], allow_weighted=True).vertex == "z_l"
        trace = f_star(g, p, ["z_r"], allow_weighted=True).trace
        assert trace[0].branch == "not-zv-line"

    def test_empty_profile_is_leftmost_z(self, path5):
        g, p = path5
        assert f_star(g, p, []).vertex == "z1"

    def test_recursion_trace(self):
        ag = generate("rooted_tree", 2, 2)
        out = f_star(ag.graph, ag.partition, ["r1_1", "r1.2_1"])
        assert out.vertex == "r1_1"
        assert [d.branch for d in out.trace] == ["recurse", "leftmost-pareto-z"]
        assert out.trace[1].path == (1,)

    def test_unanimity_on_root_in_z(self):
        # a subgraph sharing its root with Z: ballots on that vertex recurse
        ag = generate("block_graph", (3, 3, 3), (2, 2))
        g, p = ag.graph, ag.partition
        shared = [s for s in p.subgraphs if set(s.members) & p.z_set]
        assert shared
        y = (set(shared[0].members) & p.z_set).pop()
        out = f_star(g, p, [y, y])
        assert out.vertex == y
        assert out.trace[0].branch == "recurse"

    def test_outcome_equality_ignores_trace(self):
        assert Outcome("a", ()) == Outcome("a", ("anything",))

    def test_invalid_partition_is_refused(self, path5):
        g, _ = path5
        with pytest.raises(InvalidPartition):
            FStar(g, partition(["z1", "z2", "z3"], ["v1"]))

    def test_unknown_ballot(self, path5):
        g, p = path5
        with pytest.raises(UnknownVertex):
            f_star(g, p, ["nope"])

    def test_locality(self):
        ag = generate("family_F", 2, 2, 2)
        g, p = ag.graph, ag.partition
        m = FStar(g, p)
        for sub in p.subgraphs:
            for x in profiles(sub.members, 3):
                assert m(list(x)) in sub.members


def test_induced_order_mechanism(path5):
    g, p = path5
    order = induced_global_order(g, p)
    assert order_mechanism(g, order, ["z1", "z3"]).vertex == "z1"
    assert order_mechanism(g, order, ["v2"]).vertex == "v2"
    with pytest.raises(InvalidOrder):
        OrderMechanism(g, ["z1", "z2"])
    with pytest.raises(InvalidOrder):
        OrderMechanism(g, ["z1", "z1", "z2", "z3", "v1"])


def test_lca():
    star = Graph(["r", "a", "b"], [("r", "a"), ("r", "b")])
    assert lca_tree_mechanism(star, "r", ["a", "b"]).vertex == "r"
    assert lca_tree_mechanism(star, "r", ["a", "a"]).vertex == "a"
    path = Graph(["r", "a", "b"], [("r", "a"), ("a", "b")])
    assert lca_tree_mechanism(path, "r", ["a", "b"]).vertex == "a"
    with pytest.raises(EmptyProfile):
        lca_tree_mechanism(path, "r", [])
    with pytest.raises(NotATree):
        LcaTree(generate("cycle", 4).graph, "c1")


def test_block_graph_mechanism(k3):
    g, _ = k3
    assert block_graph_mechanism(g, "a", ["a", "b", "c"], ["b", "c"]).vertex == "b"
    assert block_graph_mechanism(g, "a", ["a", "b", "c"], ["a"]).vertex == "a"
    two = Graph(
        ["a", "b", "w", "c", "d"], [("a", "b"), ("a", "w"), ("b", "w"), ("w", "c"), ("w", "d"), ("c", "d")]
    )
    # PO({c, d}) = {c, d}; both at distance 2 from a, order breaks the tie
    assert pareto_set(two, ["c", "d"]) == {"c", "d"}
    assert block_graph_mechanism(two, "a", ["a", "b", "w", "d", "c"], ["c", "d"]).vertex == "d"
    assert block_graph_mechanism(two, "a", None, ["c", "d"]).vertex == "c"
    with pytest.raises(NotABlockGraph):
        BlockGraphMechanism(generate("cycle", 4).graph, "c1")


def test_median_and_mean(line3):
    g = line3
    order = ["1", "2", "3"]
    assert median_mechanism(g, order, ["1", "3"]).vertex == "1"
    assert median_mechanism(g, order, ["1", "3", "3"]).vertex == "3"
    assert median_mechanism(g, order, ["2"]).vertex == "2"
    assert mean_mechanism(g, order, ["1", "3"]).vertex == "2"
    assert mean_mechanism(g, order, ["3"]).vertex == "3"
    line5 = Graph(list("12345"), [(str(i), str(i + 1)) for i in range(1, 5)])
    assert mean_mechanism(line5, None, ["1", "1", "5"]).vertex == "2"
    with pytest.raises(EmptyProfile):
        median_mechanism(g, order, [])


def test_fixed_and_dictator(path5):
    g, _ = path5
    assert fixed_mechanism(g, "z2", ["z1", "v2"]).vertex == "z2"
    assert fixed_mechanism(g, "z2").vertex == "z2"
    assert dictator_mechanism(g, 1, ["v1", "z3"]).vertex == "v1"
    assert dictator_mechanism(g, 2, ["v1", "z3"]).vertex == "z3"
    # agent 3 cast no ballot: the first ballot decides
    assert dictator_mechanism(g, 3, ["v1", "z3"]).vertex == "v1"
    with pytest.raises(EmptyProfile):
        dictator_mechanism(g, 1, [])
    assert not Dictator(g, 1).anonymous
    assert {Fixed(g, "z2")(list(x)) for x in profiles(g.vertices, 2)} == {"z2"}


def test_disconnected_wrapper(path5, k3):
    g1, p1 = path5
    g2, p2 = k3
    a, b = FStar(g1, p1), FStar(g2, p2)
    assert disconnected_wrapper([(g1, a), (g2, b)], ["b", "c"]).vertex == b(["b", "c"])
    # ballots in both components: only the first component's ballots count
    assert disconnected_wrapper([(g1, a), (g2, b)], ["v2", "a", "v2"]).vertex == "v2"
    assert disconnected_wrapper([(g2, b), (g1, a)], ["v2", "a", "v2"]).vertex == "a"
    assert disconnected_wrapper([(g1, a)], ["z1", "z3"]).vertex == a(["z1", "z3"])
    with pytest.raises(EmptyProfile):
        DisconnectedWrapper([a, b])([])


def test_mechanism_grammar(path5, k3):
    g, p = path5
    assert isinstance(mechanism_from_spec("fstar", g, p), FStar)
    assert mechanism_from_spec("order:z3,z2,z1,v1,v2", g)(["z1", "z3"]) == "z3"
    assert mechanism_from_spec("median", g, p).tiebreak == induced_global_order(g, p)
    assert mechanism_from_spec("median:v2,v1,z3,z2,z1", g, p)(["z1", "z3"]) == "v2"
    assert isinstance(mechanism_from_spec("mean", g, p), Mean)
    assert mechanism_from_spec("fixed:v1", g)(["z1"]) == "v1"
    assert mechanism_from_spec("dictator:2", g)(["z1", "v2"]) == "v2"
    gk, _ = k3
    assert mechanism_from_spec("block:a:a,c,b", gk)(["b", "c"]) == "c"
    tree = generate("rooted_tree", 1, 2)
    assert mechanism_from_spec("lca:r_1", tree.graph)(["r1_1", "r2_1"]) == "r_1"
    with pytest.raises(ValueError):
        mechanism_from_spec("nonsense", g)
    with pytest.raises(InvalidPartition):
        mechanism_from_spec("fstar", g, None)
    with pytest.raises(InvalidOrder):
        mechanism_from_spec("dictator:x", g)


# -- properties on random graphs ---------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(connected_graphs(max_vertices=7), st.data())
def test_partitions_never_run_out_of_pareto_z_vertices(g, data):
    z = data.draw(st.lists(st.sampled_from(g.vertices), unique=True, min_size=1))
    p = ZvOrderedPartition(tuple(z), tuple(SubgraphSpec((v,)) for v in g.vertices if v not in z))
    if not validate_partition(g, p).valid:
        return
    m = FStar(g, p)
    for x in profiles(g.vertices, 2):
        assert m(list(x)) in pareto_set(g, x)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_vertices=7))
def test_recognized_partitions_agree_with_their_order(g):
    p = recognize_zv_line(g)
    if p is None:
        return
    m = FStar(g, p)
    om = OrderMechanism(g, induced_global_order(g, p))
    for x in profiles(g.vertices, 2):
        assert m(list(x)) == om(list(x))
        assert m(list(x)) in pareto_set(g, x)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.data())
def test_tree_fstar_is_lca(n, data):
    names = [f"t{i}" for i in range(n)]
    g = Graph(names, [(names[data.draw(st.integers(0, i - 1))], names[i]) for i in range(1, n)])
    root = data.draw(st.sampled_from(names))
    m, lca = FStar(g, tree_partition(g, root)), LcaTree(g, root)
    for x in profiles(names, 2):
        assert m(list(x)) == lca(list(x))


def test_anonymity_by_permutation():
    ag = generate("grid2n", 3)
    m = FStar(ag.graph, ag.partition)
    for x in profiles(ag.graph.vertices, 3):
        assert len({m(list(perm)) for perm in itertools.permutations(x)}) == 1
