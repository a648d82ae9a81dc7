"""Seeded example points for the isotropy/tangent certificate.

Each instance bundles a diagram, an alternating form of index m, an isotropic
linked subbundle, and a matched degenerate control (same diagram and
subbundle, form replaced by a degenerate one).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import exact as X
from .chain_graph import TreeDegreeData, TreeGraph, build_linked_graph
from .forms import ALTERNATING, LinkedForm, extend_from_restriction
from .grassmannian import LinkedSubbundle, subbundle
from .prelinked import (
    PrelinkedDiagram,
    direct_sum,
    f_composite,
    gauge_line,
    geodesic_line,
    random_invertible,
    wdec_from_subspaces,
)


@dataclass(frozen=True)
class LagInstance:
    name: str
    D: PrelinkedDiagram
    form: LinkedForm
    control: LinkedForm
    F: LinkedSubbundle
    m: tuple


def two_chain():
    return build_linked_graph(TreeDegreeData.chain(2, 2, (3, 3)))


def three_chain():
    return build_linked_graph(TreeDegreeData.chain(0, 1, (2, 0, 2)))


def point_graph(t_deg: int = 0):
    return build_linked_graph(TreeDegreeData(TreeGraph(("v1",), ()), t_deg, 0, (t_deg,)))


def _transform_form(form: LinkedForm, D: PrelinkedDiagram, P: dict) -> LinkedForm:
    G = D.graph
    invT = {w: X.transpose(X.inverse(P[w])) for w in G.vertices}
    inv = {w: X.inverse(P[w]) for w in G.vertices}
    return LinkedForm(
        form.m,
        tuple(
            tuple(X.matmul(X.matmul(invT[w], form.block(G, w, w2)), inv[w2]) for w2 in G.vertices)
            for w in G.vertices
        ),
    )


def _gauge(inst: LagInstance, rng: random.Random) -> LagInstance:
    D = inst.D
    P = {w: random_invertible(rng, D.dim(w)) for w in D.graph.vertices}
    D2 = D.change_basis(P)
    F2 = LinkedSubbundle(inst.F.rank, tuple(X.matmul(P[w], inst.F.basis(D, w)) for w in D.graph.vertices))
    return LagInstance(
        inst.name, D2, _transform_form(inst.form, D, P), _transform_form(inst.control, D, P), F2, inst.m
    )


def _random_alt(rng: random.Random, n: int, zero: set) -> X.Matrix:
    while True:
        M = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if (i, j) in zero:
                    continue
                v = Fraction(rng.randint(-4, 4))
                M[i][j], M[j][i] = v, -v
        M = X.mat(M)
        if X.det(M) != 0:
            return M


def _wedge(n: int, i: int, j: int) -> X.Matrix:
    M = [[Fraction(0)] * n for _ in range(n)]
    M[i][j], M[j][i] = Fraction(1), Fraction(-1)
    return X.mat(M)


def special_fiber_instance(seed: int) -> LagInstance:
    """2-chain at s = 0: two geodesic lines from each end, F through one of each.

    The pairing on the W-sum is a random nondegenerate alternating matrix
    vanishing on the two F directions; the control keeps only the wedge of
    the two complement directions.
    """
    rng = random.Random(seed)
    G = two_chain()
    A, _, C = G.vertices
    D = direct_sum(G, 0, [geodesic_line(G, A), geodesic_line(G, A), geodesic_line(G, C), geodesic_line(G, C)])
    I = X.identity(4)
    wdec = wdec_from_subspaces(D, {A: X.from_columns([I[0], I[1]], 4), C: X.from_columns([I[2], I[3]], 4)})
    m = (1, 1)
    Xw = _random_alt(rng, 4, {(0, 2)})
    form = extend_from_restriction(D, wdec, Xw, m, ALTERNATING)
    control = extend_from_restriction(D, wdec, _wedge(4, 1, 3), m, ALTERNATING)
    F = subbundle(D, {w: X.from_columns([I[0], I[2]], 4) for w in G.vertices})
    return _gauge(LagInstance(f"special-fiber-{seed}", D, form, control, F, m), rng)


def invertible_instance(seed: int, G=None, s=None, m=None, t: int = 4) -> LagInstance:
    """All maps invertible (s != 0); F is the orbit of a Lagrangian at one vertex."""
    rng = random.Random(seed)
    G = two_chain() if G is None else G
    s = Fraction(rng.choice([1, 2, -1]), rng.choice([1, 3])) if s is None else X.q(s)
    labels = G.data.tree.vertices
    D = direct_sum(G, s, [gauge_line(G, s, rng.choice(labels)) for _ in range(t)])
    if m is None:
        m = G.vertices[len(G.vertices) // 2]
    u = tuple(m) if tuple(m) in G.index else G.vertices[0]
    h = t // 2
    J = [[Fraction(0)] * t for _ in range(t)]
    for i in range(h):
        J[i][h + i], J[h + i][i] = Fraction(1), Fraction(-1)
    P = random_invertible(rng, t)
    Xw = X.matmul(X.matmul(X.transpose(P), X.mat(J)), P)
    L = X.from_columns(X.columns(X.inverse(P))[:h], t)
    # the control only pairs two directions outside L
    inner = _wedge(t, h, h + 1) if h + 1 < t else X.zeros(t, t)
    ctrl = X.matmul(X.matmul(X.transpose(P), inner), P)
    wdec = wdec_from_subspaces(D, {u: X.identity(t)})
    form = extend_from_restriction(D, wdec, Xw, m, ALTERNATING)
    control = extend_from_restriction(D, wdec, ctrl, m, ALTERNATING)
    F = subbundle(D, {w: X.matmul(f_composite(D, u, w), L) for w in G.vertices})
    return _gauge(LagInstance(f"invertible-{len(labels)}chain-{seed}", D, form, control, F, tuple(m)), rng)


def certificate_instances(count: int = 24, seed: int = 0) -> list[LagInstance]:
    """A deterministic mix of special-fiber and invertible instances on 2- and 3-chains."""
    out = []
    G3 = three_chain()
    k = 0
    while len(out) < count:
        kind = k % 3
        sd = seed * 1000 + k
        if kind == 0:
            out.append(special_fiber_instance(sd))
        elif kind == 1:
            out.append(invertible_instance(sd))
        else:
            out.append(invertible_instance(sd, G=G3, m=(1, -2, 1)))
        k += 1
    return out
