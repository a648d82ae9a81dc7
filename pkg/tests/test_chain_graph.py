import itertools
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linksymp.chain_graph import (
    DirectedPath,
    TreeDegreeData,
    TreeGraph,
    all_minimal_paths,
    build_linked_graph,
    distance,
    is_admissible,
    minimal_path,
    tree_distance,
    twist_multidegree,
    twist_sequence,
)
from linksymp.errors import UnreachableError, ValidationError


def two_chain():
    return TreeDegreeData.chain(2, 2, (3, 3))


def h2_three_chain():
    return TreeDegreeData.chain(2, 0, (0, 2, 0))


class TestTreeGraph:
    def test_chain_labels_and_valence(self):
        T = TreeGraph.chain(3)
        assert T.vertices == ("v1", "v2", "v3")
        assert [T.valence(v) for v in T.vertices] == [1, 2, 1]

    def test_cycle_rejected(self):
        with pytest.raises(ValidationError):
            TreeGraph(("a", "b", "c"), (("a", "b"), ("b", "c"), ("c", "a")))

    def test_disconnected_rejected(self):
        with pytest.raises(ValidationError):
            TreeGraph(("a", "b", "c", "d"), (("a", "b"), ("c", "d"), ("c", "d")))

    def test_star(self):
        T = TreeGraph(("c", "x", "y", "z"), (("c", "x"), ("c", "y"), ("c", "z")))
        assert T.valence("c") == 3


class TestDegreeData:
    def test_inconsistent_data_rejected(self):
        # the naive 2-chain data (d=2, b=1, d_v=(1,1)) breaks sum(d_v) - 2b|E| = d
        with pytest.raises(ValidationError, match="inconsistent"):
            TreeDegreeData.chain(2, 1, (1, 1))

    def test_wrong_length(self):
        with pytest.raises(ValidationError):
            TreeDegreeData(TreeGraph.chain(2), 2, 0, (2,))


class TestLinkedGraph:
    def test_two_chain(self):
        G = build_linked_graph(two_chain())
        assert G.vertices == ((-1, 3), (1, 1), (3, -1))
        edges = {(e.tail, e.head, e.label) for e in G.edges}
        assert edges == {
            ((1, 1), (-1, 3), "v1"),
            ((1, 1), (3, -1), "v2"),
            ((-1, 3), (1, 1), "v2"),
            ((3, -1), (1, 1), "v1"),
        }

    def test_single_vertex(self):
        G = build_linked_graph(TreeDegreeData(TreeGraph(("v1",), ()), 5, 0, (5,)))
        assert G.vertices == ((5,),)
        assert G.edges == ()

    def test_three_chain(self):
        G = build_linked_graph(TreeDegreeData.chain(0, 1, (2, 0, 2)))
        assert set(G.vertices) == {(0, 0, 0), (0, -2, 2), (2, -2, 0), (2, -4, 2)}

    @pytest.mark.parametrize(
        "data",
        [
            TreeDegreeData.chain(2, 2, (3, 3)),
            TreeDegreeData.chain(0, 1, (2, 0, 2)),
            TreeDegreeData.chain(1, 2, (3, 3, 3)),
            TreeDegreeData(TreeGraph(("c", "x", "y", "z"), (("c", "x"), ("c", "y"), ("c", "z"))), 0, 1, (0, 2, 2, 2)),
        ],
    )
    def test_vertices_match_box_enumeration(self, data):
        G = build_linked_graph(data)
        n = len(data.tree)
        R = range(-2 * data.b * n - abs(data.d) - 4, 2 * data.b * n + abs(data.d) + 5)
        brute = {
            w
            for w in itertools.product(R, repeat=n - 1)
            for w in [w + (data.d - sum(w),)]
            if is_admissible(data, w)
        }
        assert set(G.vertices) == brute
        assert len(G.vertices) == (data.b + 1) ** (n - 1)

    def test_strongly_connected(self):
        G = build_linked_graph(TreeDegreeData.chain(1, 2, (3, 3, 3)))
        for w in G.vertices:
            assert len(G._dist_table[w]) == len(G.vertices)


class TestTwists:
    def test_leaf_and_middle(self):
        assert twist_multidegree(TreeGraph.chain(2), "v1") == (-1, 1)
        assert twist_multidegree(TreeGraph.chain(3), "v2") == (1, -2, 1)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_twists_sum_to_zero(self, n):
        T = TreeGraph.chain(n)
        total = [sum(col) for col in zip(*(twist_multidegree(T, v) for v in T.vertices))]
        assert total == [0] * n

    def test_unknown_vertex(self):
        with pytest.raises(ValidationError):
            twist_multidegree(TreeGraph.chain(2), "nope")


class TestDistance:
    def test_zero(self):
        assert distance(two_chain(), (1, 1), (1, 1)) == 0

    def test_two_chain(self):
        assert distance(two_chain(), (1, 1), (2, 0)) == 1

    def test_asymmetry(self):
        data = h2_three_chain()
        assert distance(data, (0, 2, 0), (1, 0, 1)) == 1
        assert distance(data, (1, 0, 1), (0, 2, 0)) == 2

    def test_rational_points(self):
        data = two_chain()
        assert distance(data, ("1/2", "3/2"), ("3/2", "1/2")) == 1

    def test_unreachable(self):
        with pytest.raises(UnreachableError):
            distance(two_chain(), ("1/2", "3/2"), (1, 1))

    def test_off_hyperplane(self):
        with pytest.raises(ValidationError):
            distance(two_chain(), (1, 1), (1, 2))

    @given(st.lists(st.integers(-6, 6), min_size=2, max_size=2), st.lists(st.integers(-6, 6), min_size=2, max_size=2))
    def test_closed_form_agrees_with_bfs(self, a, b):
        data = TreeDegreeData.chain(2, 0, (1, 1))
        w = (a[0], 2 - a[0])
        w2 = (b[0], 2 - b[0])
        assert distance(data, w, w2) == tree_distance(data, w, w2)


class TestPaths:
    def test_empty_path(self):
        G = build_linked_graph(two_chain())
        P = minimal_path(G, (1, 1), (1, 1))
        assert len(P) == 0 and P.labels() == Counter()

    def test_single_edge(self):
        G = build_linked_graph(two_chain())
        P = minimal_path(G, (1, 1), (-1, 3))
        assert [e.label for e in P.edges] == ["v1"]

    def test_path_must_be_connected(self):
        G = build_linked_graph(two_chain())
        e1, e2 = G.edges[0], G.edges[0]
        with pytest.raises(ValidationError):
            DirectedPath(e1.tail, (e1, e2))

    @pytest.mark.parametrize(
        "data", [TreeDegreeData.chain(1, 2, (3, 3, 3)), TreeDegreeData.chain(0, 1, (2, 0, 2)), TreeDegreeData.chain(2, 3, (5, 3))]
    )
    def test_minimal_paths_share_their_twist_multiset(self, data):
        G = build_linked_graph(data)
        for w in G.vertices:
            for w2 in G.vertices:
                labels = {frozenset(P.labels().items()) for P in all_minimal_paths(G, w, w2)}
                assert len(labels) == 1


class TestTwistSequence:
    def test_empty(self):
        assert twist_sequence(two_chain(), (1, 1), (1, 1)) == Counter()

    def test_two_chain(self):
        assert twist_sequence(two_chain(), (1, 1), (2, 0)) == Counter({"v2": 1})

    def test_three_chain(self):
        assert twist_sequence(h2_three_chain(), (0, 2, 0), (1, 0, 1)) == Counter({"v2": 1})
