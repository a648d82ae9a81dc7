import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linksymp import exact as X
from linksymp.chain_graph import DirectedPath, TreeDegreeData, build_linked_graph
from linksymp.errors import ValidationError
from linksymp.prelinked import (
    Indeterminate,
    NotSimple,
    PrelinkedDiagram,
    SimplicityCertificate,
    check_prelinked,
    constant_diagram,
    direct_sum,
    f_composite,
    gauge_line,
    geodesic_line,
    is_internally_simple,
    is_simple,
    random_gauge,
    verify_certificate,
    w_decomposition,
)

G2 = build_linked_graph(TreeDegreeData.chain(2, 2, (3, 3)))
G3 = build_linked_graph(TreeDegreeData.chain(0, 1, (2, 0, 2)))
A, B, C = G2.vertices


def loop_diagram(s, t=2):
    # f(B->C) f(C->B) = s and f(B->A) f(A->B) = s via gauge lines
    return direct_sum(G2, s, [gauge_line(G2, s, "v2") for _ in range(t)])


class TestCheck:
    def test_identity_at_s_one(self):
        assert check_prelinked(constant_diagram(G2, 2, 1)).ok

    def test_third(self):
        D = loop_diagram(Fraction(1, 3))
        rep = check_prelinked(D)
        assert rep.ok
        loop = DirectedPath(B).then(G2.out_edges[B][1]).then(G2.out_edges[C][0])
        assert D.path_map(loop) == X.scale(Fraction(1, 3), X.identity(2))

    def test_zero_loop_at_s_one_is_flagged(self):
        maps = [X.identity(2)] * len(G2.edges)
        k = next(i for i, e in enumerate(G2.edges) if e.tail == C)
        maps[k] = X.zeros(2, 2)
        rep = check_prelinked(PrelinkedDiagram(G2, 1, (2, 2, 2), tuple(maps)))
        assert not rep.ok
        # every offending path crosses the zeroed edge out of C
        assert all(C in (v.start, v.end) or "v1" in v.path for v in rep.violations)
        assert any("differs" in v.reason for v in rep.violations)

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            PrelinkedDiagram(G2, 0, (2, 2, 2), (X.identity(2),) * 3)


class TestComposite:
    def test_identity_at_same_vertex(self):
        D = loop_diagram(2)
        assert f_composite(D, A, A) == X.identity(2)

    def test_zero_beyond_minimal_at_s_zero(self):
        D = direct_sum(G2, 0, [geodesic_line(G2, A), geodesic_line(G2, C)])
        assert check_prelinked(D).ok
        loop = DirectedPath(A).then(G2.out_edges[A][0]).then(G2.out_edges[B][0])
        assert loop.head == A
        assert X.is_zero(D.path_map(loop))


class TestSimple:
    def test_invertible(self):
        D = loop_diagram(Fraction(1, 3))
        cert = is_simple(D)
        assert isinstance(cert, SimplicityCertificate)
        assert verify_certificate(D, cert)

    def test_all_zero_maps(self):
        D = constant_diagram(G2, 2, 0, X.zeros(2, 2))
        res = is_simple(D)
        assert isinstance(res, NotSimple)

    def test_special_fiber_witnesses_at_two_vertices(self):
        D = direct_sum(G2, 0, [geodesic_line(G2, A), geodesic_line(G2, B)])
        cert = is_simple(D)
        assert isinstance(cert, SimplicityCertificate)
        W = w_decomposition(cert, D)
        assert [W.ranks[w] for w in G2.vertices] == [1, 1, 0]
        assert W.r == 2

    def test_w_sum_is_rank(self):
        D = loop_diagram(2, t=3)
        W = w_decomposition(is_simple(D), D)
        assert W.r == 3 == sum(W.ranks.values())
        # canonical: everything at one vertex
        assert sorted(W.ranks.values()) == [0, 0, 3]

    def test_internally_simple_when_invertible(self):
        D = loop_diagram(1)
        cert = is_internally_simple(D, (1, 1))
        assert isinstance(cert, SimplicityCertificate)
        assert verify_certificate(D, cert, (1, 1))

    def test_not_internally_simple(self):
        # the only new direction is at (2,-4,2), whose reflection in m = 0 is not a vertex
        src = (2, -4, 2)
        D = direct_sum(G3, 0, [geodesic_line(G3, src)])
        assert isinstance(is_simple(D), SimplicityCertificate)
        res = is_internally_simple(D, (0, 0, 0))
        assert isinstance(res, NotSimple) and res.internal

    def test_central_m_on_two_chain(self):
        D = direct_sum(G2, 0, [geodesic_line(G2, A), geodesic_line(G2, C)])
        assert isinstance(is_internally_simple(D, (1, 1)), SimplicityCertificate)

    def test_certificate_for_other_diagram_rejected(self):
        D = loop_diagram(1)
        cert = is_simple(D)
        with pytest.raises(ValidationError):
            w_decomposition(cert, loop_diagram(2))

    def test_indeterminate_is_a_distinct_outcome(self):
        assert not issubclass(Indeterminate, NotSimple)


@given(st.integers(0, 10_000), st.sampled_from([0, 1, Fraction(1, 3), 2]))
def test_simplicity_and_prelinked_survive_change_of_basis(seed, s):
    rng = random.Random(seed)
    lines = [gauge_line(G2, s, "v1") if s else geodesic_line(G2, rng.choice(G2.vertices)) for _ in range(2)]
    D = direct_sum(G2, s, lines)
    D2, _ = random_gauge(D, rng)
    assert check_prelinked(D2).ok == check_prelinked(D).ok
    assert isinstance(is_simple(D2), SimplicityCertificate) == isinstance(is_simple(D), SimplicityCertificate)
