"""Linked bilinear and alternating forms of index m.

A form is the family of matrices ``B[w][w']`` (``t_w x t_w'``) indexed by
pairs of vertices of G.  Compatibility with an edge acting on the first
argument reads ``f^T B_{h,w'} = s^delta B_{w,w'}``; on the second argument
``B_{w,h'} f = s^delta B_{w,w'}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

from . import exact as X
from .chain_graph import DirectedPath, Edge, LinkedGraph, midpoint, minimal_path, paths_of_length, tree_distance
from .errors import CheckFailure, PreconditionError, ValidationError
from .prelinked import (
    NotSimple,
    PrelinkedDiagram,
    SimplicityCertificate,
    WDecomposition,
    f_composite,
    is_simple,
    s_power,
    w_decomposition,
)

BILINEAR = "bilinear"
ALTERNATING = "alternating"


@dataclass(frozen=True)
class LinkedForm:
    m: tuple[Fraction, ...]
    pairings: tuple[tuple[X.Matrix, ...], ...]  # pairings[i][j] for vertices i, j of G

    def block(self, G: LinkedGraph, w, w2) -> X.Matrix:
        return self.pairings[G.index[tuple(w)]][G.index[tuple(w2)]]

    def combine(self, a, other: "LinkedForm", b=1) -> "LinkedForm":
        a, b = X.q(a), X.q(b)
        return LinkedForm(
            self.m,
            tuple(
                tuple(X.add(X.scale(a, P), X.scale(b, Q)) for P, Q in zip(row1, row2))
                for row1, row2 in zip(self.pairings, other.pairings)
            ),
        )


def zero_form(D: PrelinkedDiagram, m) -> LinkedForm:
    n = len(D.dims)
    return LinkedForm(
        _m(D, m),
        tuple(tuple(X.zeros(D.dims[i], D.dims[j]) for j in range(n)) for i in range(n)),
    )


def _m(D: PrelinkedDiagram, m) -> tuple[Fraction, ...]:
    m = tuple(X.q(x) for x in m)
    if len(m) != len(D.graph.data.tree) or sum(m) != D.graph.data.d:
        raise ValidationError(f"index m must lie in H_{D.graph.data.d}")
    return m


# ---------------------------------------------------------------------------
# exponents


def mid_distance(G: LinkedGraph, w, w2, m) -> int:
    return tree_distance(G.data, midpoint(w, w2), m)


def step_delta(G: LinkedGraph, w, w2, e: Edge, m, side: int = 0) -> int:
    """Exponent for ``e`` acting on the first (side 0) or second (side 1) argument."""
    w, w2 = tuple(w), tuple(w2)
    if side == 0:
        if e.tail != w:
            raise ValidationError("edge must start at the first argument")
        before, after = mid_distance(G, w, w2, m), mid_distance(G, e.head, w2, m)
    else:
        if e.tail != w2:
            raise ValidationError("edge must start at the second argument")
        before, after = mid_distance(G, w, w2, m), mid_distance(G, w, e.head, m)
    return int(before < after)


def path_delta(G: LinkedGraph, P: DirectedPath, P2: DirectedPath, m) -> int:
    """Closed-form total exponent for applying P and P2 to the two arguments."""
    nv = len(G.data.tree)
    num = len(P) + len(P2) + mid_distance(G, P.head, P2.head, m) - mid_distance(G, P.tail, P2.tail, m)
    if num % nv or num < 0:
        raise CheckFailure("exponent-integrality", f"path exponent {num}/{nv} is not a nonnegative integer")
    return num // nv


def interleavings(n: int, n2: int) -> Iterator[tuple[int, ...]]:
    """Step orders as 0/1 sequences (0 = advance the first path)."""
    for pos in combinations(range(n + n2), n):
        seq = [1] * (n + n2)
        for p in pos:
            seq[p] = 0
        yield tuple(seq)


def stepwise_delta(G: LinkedGraph, P: DirectedPath, P2: DirectedPath, order: Sequence[int], m) -> int:
    i = j = 0
    x, y = P.tail, P2.tail
    total = 0
    for side in order:
        if side == 0:
            e = P.edges[i]
            i += 1
            total += step_delta(G, x, y, e, m, 0)
            x = e.head
        else:
            e = P2.edges[j]
            j += 1
            total += step_delta(G, x, y, e, m, 1)
            y = e.head
    return total


# ---------------------------------------------------------------------------
# compatibility


@dataclass(frozen=True)
class CompatibilityViolation:
    w: tuple
    w2: tuple
    edge: int
    side: int
    delta: int


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    violations: tuple[CompatibilityViolation, ...]
    additivity_checked: int
    additivity_failures: int


def check_compatibility(
    F: LinkedForm,
    D: PrelinkedDiagram,
    additivity_samples: int = 0,
    seed: int = 0,
) -> CompatibilityReport:
    G = D.graph
    if len(F.pairings) != len(G.vertices):
        raise ValidationError("form and diagram disagree on the vertex set")
    for i, row in enumerate(F.pairings):
        for j, B in enumerate(row):
            if len(B) != D.dims[i] or (B and len(B[0]) != D.dims[j]):
                raise ValidationError(f"pairing ({i},{j}) has the wrong shape")
    bad = []
    for k, e in enumerate(G.edges):
        fe = D.f(e)
        fT = X.transpose(fe, D.dim(e.tail))
        for w2 in G.vertices:
            d0 = step_delta(G, e.tail, w2, e, F.m, 0)
            lhs = X.matmul(fT, F.block(G, e.head, w2), inner=D.dim(e.head), ncols=D.dim(w2))
            if lhs != X.scale(s_power(D.s, d0), F.block(G, e.tail, w2)):
                bad.append(CompatibilityViolation(e.tail, w2, k, 0, d0))
            d1 = step_delta(G, w2, e.tail, e, F.m, 1)
            lhs = X.matmul(F.block(G, w2, e.head), fe, inner=D.dim(e.head), ncols=D.dim(e.tail))
            if lhs != X.scale(s_power(D.s, d1), F.block(G, w2, e.tail)):
                bad.append(CompatibilityViolation(w2, e.tail, k, 1, d1))
    checked = failures = 0
    if additivity_samples:
        for P, P2, order in sample_path_pairs(G, additivity_samples, seed):
            checked += 1
            if stepwise_delta(G, P, P2, order, F.m) != path_delta(G, P, P2, F.m):
                failures += 1
    return CompatibilityReport(not bad and not failures, tuple(bad), checked, failures)


def sample_path_pairs(G: LinkedGraph, count: int, seed: int, max_len: int = 10):
    rng = random.Random(seed)
    for _ in range(count):
        n, n2 = rng.randint(0, max_len), rng.randint(0, max_len)
        P = _random_walk(G, rng.choice(G.vertices), n, rng)
        P2 = _random_walk(G, rng.choice(G.vertices), n2, rng)
        order = [0] * len(P) + [1] * len(P2)
        rng.shuffle(order)
        yield P, P2, tuple(order)


def _random_walk(G: LinkedGraph, w, n: int, rng: random.Random) -> DirectedPath:
    P = DirectedPath(w)
    for _ in range(n):
        out = G.out_edges[P.head]
        if not out:
            break
        P = P.then(rng.choice(out))
    return P


def all_path_pairs(G: LinkedGraph, max_total: int):
    """Every (P, P2, interleaving) with len(P) + len(P2) <= max_total."""
    for n in range(max_total + 1):
        for n2 in range(max_total + 1 - n):
            for w in G.vertices:
                for P in paths_of_length(G, w, n):
                    for w2 in G.vertices:
                        for P2 in paths_of_length(G, w2, n2):
                            for order in interleavings(n, n2):
                                yield P, P2, order


def is_alternating(F: LinkedForm) -> bool:
    n = len(F.pairings)
    for i in range(n):
        B = F.pairings[i][i]
        if any(B[a][a] for a in range(len(B))):
            return False
        for j in range(i, n):
            P, Q = F.pairings[i][j], F.pairings[j][i]
            for a in range(len(P)):
                for b in range(len(P[a])):
                    if P[a][b] != -Q[b][a]:
                        return False
    return True


def assembled_matrix(F: LinkedForm, dims: Sequence[int]) -> X.Matrix:
    """The form on the direct sum of all E_w as one block matrix."""
    rows = []
    for i, ti in enumerate(dims):
        for a in range(ti):
            rows.append(tuple(x for j in range(len(dims)) for x in (F.pairings[i][j][a] if F.pairings[i][j] else ())))
    return tuple(rows)


# ---------------------------------------------------------------------------
# the solver


@dataclass(frozen=True)
class FormModuleBasis:
    kind: str
    basis: tuple[LinkedForm, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _layout(D: PrelinkedDiagram):
    off = {}
    k = 0
    n = len(D.dims)
    for i in range(n):
        for j in range(n):
            off[(i, j)] = k
            k += D.dims[i] * D.dims[j]
    return off, k


def _require_simple(D: PrelinkedDiagram, cert=None) -> SimplicityCertificate:
    if cert is None:
        cert = is_simple(D)
    if not isinstance(cert, SimplicityCertificate):
        raise PreconditionError("the diagram is not simple, so the module rank statement does not apply", "simple")
    return cert


def form_module_basis(D: PrelinkedDiagram, m, kind: str = BILINEAR, cert=None, check_rank: bool = True) -> FormModuleBasis:
    """Basis of all compatible forms, by sparse elimination over the pairing entries."""
    if kind not in (BILINEAR, ALTERNATING):
        raise ValidationError(f"unknown form kind {kind!r}")
    m = _m(D, m)
    if check_rank:
        cert = _require_simple(D, cert)
    G = D.graph
    idx = G.index
    off, nvars = _layout(D)
    sysm = X.SparseSystem(nvars)

    def var(i, j, a, b):
        return off[(i, j)] + a * D.dims[j] + b

    for e in G.edges:
        fe = D.f(e)
        h, t = idx[e.head], idx[e.tail]
        for w2 in G.vertices:
            j = idx[w2]
            c0 = s_power(D.s, step_delta(G, e.tail, w2, e, m, 0))
            for a in range(D.dims[t]):
                for b in range(D.dims[j]):
                    row = {var(t, j, a, b): -c0}
                    for k in range(D.dims[h]):
                        if fe[k][a]:
                            key = var(h, j, k, b)
                            row[key] = row.get(key, 0) + fe[k][a]
                    sysm.add(row)
            c1 = s_power(D.s, step_delta(G, w2, e.tail, e, m, 1))
            for a in range(D.dims[j]):
                for b in range(D.dims[t]):
                    row = {var(j, t, a, b): -c1}
                    for k in range(D.dims[h]):
                        if fe[k][b]:
                            key = var(j, h, a, k)
                            row[key] = row.get(key, 0) + fe[k][b]
                    sysm.add(row)
    if kind == ALTERNATING:
        n = len(D.dims)
        for i in range(n):
            for j in range(i, n):
                for a in range(D.dims[i]):
                    for b in range(D.dims[j]):
                        if i == j and a == b:
                            sysm.add({var(i, i, a, a): Fraction(1)})
                        elif i < j or a < b:
                            sysm.add({var(i, j, a, b): Fraction(1), var(j, i, b, a): Fraction(1)})
    basis = tuple(_unpack(D, m, vec, off) for vec in sysm.nullspace())
    if check_rank:
        r = D.rank
        expected = r * r if kind == BILINEAR else comb(r, 2)
        if len(basis) != expected:
            raise CheckFailure("form-module-rank", f"{kind} module has dimension {len(basis)}, expected {expected}")
    return FormModuleBasis(kind, basis)


def _unpack(D: PrelinkedDiagram, m, vec, off) -> LinkedForm:
    n = len(D.dims)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            o = off[(i, j)]
            tj = D.dims[j]
            row.append(tuple(tuple(vec[o + a * tj + b] for b in range(tj)) for a in range(D.dims[i])))
        rows.append(tuple(row))
    return LinkedForm(m, tuple(rows))


# ---------------------------------------------------------------------------
# restriction and extension


def _frames(D: PrelinkedDiagram, wdec: WDecomposition):
    """For each w: C_w (columns f_{u,w}(W_u basis)) and the source vertex of each column."""
    basis = wdec.ordered_basis()
    sources = [u for u, _ in basis]
    frames = {}
    for w in D.graph.vertices:
        cols = [X.matvec(f_composite(D, u, w), v) for u, v in basis]
        frames[w] = X.from_columns(cols, D.dim(w))
    return sources, frames


def restrict(F: LinkedForm, D: PrelinkedDiagram, wdec: WDecomposition) -> X.Matrix:
    """The r x r matrix of F on the direct sum of the W_w."""
    basis = wdec.ordered_basis()
    G = D.graph
    return tuple(
        tuple(X.matmul((tuple(vi),), X.matmul(F.block(G, ui, uj), tuple((x,) for x in vj)))[0][0] for uj, vj in basis)
        for ui, vi in basis
    )


def extend_from_restriction(D: PrelinkedDiagram, wdec: WDecomposition, Xw, m, kind: str = BILINEAR) -> LinkedForm:
    """The unique compatible form whose restriction to the W-sum is ``Xw``."""
    m = _m(D, m)
    G = D.graph
    Xw = X.mat(Xw)
    r = wdec.r
    if len(Xw) != r or (r and len(Xw[0]) != r):
        raise ValidationError(f"restricted pairing must be {r}x{r}")
    if kind == ALTERNATING and not all(Xw[i][j] == -Xw[j][i] for i in range(r) for j in range(r)):
        raise ValidationError("restricted pairing is not alternating")
    sources, frames = _frames(D, wdec)
    inv = {w: X.inverse(C) for w, C in frames.items()}
    dist = {(u, w): G.graph_distance(u, w) for u in set(sources) for w in G.vertices}
    nv = len(G.data.tree)
    rows = []
    for w in G.vertices:
        row = []
        for w2 in G.vertices:
            md = mid_distance(G, w, w2, m)
            Y = []
            for i in range(r):
                ui = sources[i]
                Yrow = []
                for j in range(r):
                    uj = sources[j]
                    num = dist[(ui, w)] + dist[(uj, w2)] + md - mid_distance(G, ui, uj, m)
                    if num % nv or num < 0:
                        raise CheckFailure("exponent-integrality", f"extension exponent {num}/{nv} at {w},{w2}")
                    Yrow.append(s_power(D.s, num // nv) * Xw[i][j])
                Y.append(tuple(Yrow))
            B = X.matmul(X.matmul(X.transpose(inv[w]), tuple(Y)), inv[w2])
            row.append(B)
        rows.append(tuple(row))
    return LinkedForm(m, tuple(rows))


def is_internally_symplectic(F: LinkedForm, D: PrelinkedDiagram) -> bool:
    G = D.graph
    for w in G.vertices:
        for w2 in G.vertices:
            if all(Fraction(a + b, 2) == x for a, b, x in zip(w, w2, F.m)):
                B = F.block(G, w, w2)
                if len(B) != (len(B[0]) if B else 0) or X.rank(B, len(B[0]) if B else 0) < len(B):
                    return False
    return True


def complementary_pairs(G: LinkedGraph, m) -> list[tuple[tuple, tuple]]:
    return [(w, w2) for w in G.vertices for w2 in G.vertices if all(Fraction(a + b, 2) == X.q(x) for a, b, x in zip(w, w2, m))]


def check_reflection_identity(F: LinkedForm, D: PrelinkedDiagram) -> list[tuple]:
    """Pairs (w, w') where B_{w,w'} differs from B_{w,2m-w} composed with f along w' -> 2m-w."""
    G = D.graph
    bad = []
    for w in G.vertices:
        refl = tuple(2 * X.q(x) - a for a, x in zip(w, F.m))
        if any(x.denominator != 1 for x in refl):
            continue
        refl = tuple(int(x) for x in refl)
        if refl not in G.index:
            continue
        for w2 in G.vertices:
            try:
                f = f_composite(D, w2, refl)
            except Exception:
                continue
            if F.block(G, w, w2) != X.matmul(F.block(G, w, refl), f, inner=D.dim(refl), ncols=D.dim(w2)):
                bad.append((w, w2))
    return bad


def isotropy_equation_count(D: PrelinkedDiagram, kind: str = ALTERNATING, cert=None) -> int:
    """Local equations of the isotropy locus at a simple point."""
    _require_simple(D, cert)
    r = D.rank
    return r * r if kind == BILINEAR else comb(r, 2)
