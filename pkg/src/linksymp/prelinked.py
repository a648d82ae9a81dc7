"""s-prelinked diagrams of vector spaces over G and their simple points.

A diagram assigns ``Q^{t_w}`` to every vertex of G and a matrix to every
edge.  Minimal-path composites ``f_{w,w'}`` are cached per diagram.  The
simplicity search returns either a self-contained certificate, a
``NotSimple`` verdict backed by a rank obstruction, or ``Indeterminate``.
"""

from __future__ import annotations

import functools
import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Mapping, Sequence

from . import exact as X
from .chain_graph import DirectedPath, Edge, LinkedGraph, minimal_path
from .errors import NoPathError, ValidationError

DEFAULT_RETRIES = 64


@dataclass(frozen=True)
class PrelinkedDiagram:
    graph: LinkedGraph
    s: Fraction
    dims: tuple[int, ...]
    maps: tuple[X.Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "s", X.q(self.s))
        object.__setattr__(self, "dims", tuple(int(t) for t in self.dims))
        object.__setattr__(self, "maps", tuple(X.mat(M) for M in self.maps))
        if len(self.dims) != len(self.graph.vertices):
            raise ValidationError("one dimension per vertex of G is required")
        if len(self.maps) != len(self.graph.edges):
            raise ValidationError("one matrix per edge of G is required")
        for k, (e, M) in enumerate(zip(self.graph.edges, self.maps)):
            th, tt = self.dim(e.head), self.dim(e.tail)
            rows = len(M)
            cols = len(M[0]) if M else tt
            if rows != th or (rows and cols != tt):
                raise ValidationError(f"edge {k} map is {rows}x{cols}, expected {th}x{tt}")

    # -- accessors -----------------------------------------------------

    def dim(self, w) -> int:
        return self.dims[self.graph.index[tuple(w)]]

    def f(self, e: Edge) -> X.Matrix:
        return self.maps[self.graph.edge_index[e]]

    def path_map(self, P: DirectedPath) -> X.Matrix:
        M = X.identity(self.dim(P.tail))
        for e in P.edges:
            M = X.matmul(self.f(e), M, ncols=len(M[0]) if M else 0)
        return M

    @functools.cached_property
    def _composites(self) -> dict:
        # BFS tree from each vertex gives one minimal path to every target
        out = {}
        for w in self.graph.vertices:
            out[(w, w)] = X.identity(self.dim(w))
            frontier = [w]
            seen = {w}
            while frontier:
                nxt = []
                for x in frontier:
                    for e in self.graph.out_edges[x]:
                        if e.head not in seen:
                            seen.add(e.head)
                            out[(w, e.head)] = X.matmul(self.f(e), out[(w, x)], inner=self.dim(x), ncols=self.dim(w))
                            nxt.append(e.head)
                frontier = nxt
        return out

    @functools.cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.graph.vertices, [(e.tail, e.head, e.label) for e in self.graph.edges])).encode())
        h.update(repr((self.s, self.dims, self.maps)).encode())
        return h.hexdigest()[:16]

    @property
    def rank(self) -> int | None:
        """Uniform t when all E_w have the same dimension, else None."""
        return self.dims[0] if len(set(self.dims)) == 1 else None

    def change_basis(self, P: Mapping) -> "PrelinkedDiagram":
        """Conjugate by invertible ``P[w]`` at every vertex (new = P_h f P_t^-1)."""
        inv = {w: X.inverse(P[w]) for w in self.graph.vertices}
        maps = tuple(X.matmul(X.matmul(P[e.head], M), inv[e.tail]) for e, M in zip(self.graph.edges, self.maps))
        return PrelinkedDiagram(self.graph, self.s, self.dims, maps)


def f_composite(D: PrelinkedDiagram, w, w2) -> X.Matrix:
    """``f_{w,w'}`` along a minimal path."""
    try:
        return D._composites[(tuple(w), tuple(w2))]
    except KeyError:
        raise NoPathError(f"no path from {tuple(w)} to {tuple(w2)}") from None


def s_power(s: Fraction, c: int) -> Fraction:
    # 0^0 = 1 throughout
    return Fraction(1) if c == 0 else s**c


# ---------------------------------------------------------------------------
# the prelinked condition


@dataclass(frozen=True)
class Violation:
    start: tuple
    end: tuple
    path: tuple  # edge labels of the offending path
    length: int
    reference_length: int
    reason: str


@dataclass(frozen=True)
class PrelinkedReport:
    ok: bool
    violations: tuple[Violation, ...]
    max_length: int


def check_prelinked(D: PrelinkedDiagram, max_length: int | None = None, max_violations: int = 20) -> PrelinkedReport:
    """Compare every path composite with the minimal one, up to diameter + |V|.

    Paths are grouped by (start, end, length) and only distinct matrices are
    carried forward, so the work is polynomial in the graph size.
    """
    G = D.graph
    nv = len(G.data.tree)
    L = G.diameter + nv if max_length is None else max_length
    violations: list[Violation] = []
    for w0 in G.vertices:
        layer = {w0: {X.identity(D.dim(w0)): DirectedPath(w0)}}
        for n in range(1, L + 1):
            nxt: dict = {}
            for x, mats in layer.items():
                for e in G.out_edges[x]:
                    fe = D.f(e)
                    bucket = nxt.setdefault(e.head, {})
                    for M, P in mats.items():
                        MM = X.matmul(fe, M, inner=D.dim(x), ncols=D.dim(w0))
                        if MM not in bucket and len(bucket) < 8:
                            bucket[MM] = P.then(e)
            for x, mats in nxt.items():
                n0 = G.graph_distance(w0, x)
                ref = f_composite(D, w0, x)
                for M, P in mats.items():
                    if (n - n0) % nv:
                        violations.append(Violation(w0, x, tuple(e.label for e in P.edges), n, n0, "length difference not a multiple of |V|"))
                        continue
                    if M != X.scale(s_power(D.s, (n - n0) // nv), ref):
                        violations.append(Violation(w0, x, tuple(e.label for e in P.edges), n, n0, "composite differs from s^c times the minimal composite"))
                if len(violations) >= max_violations:
                    return PrelinkedReport(False, tuple(violations), L)
            layer = nxt
    return PrelinkedReport(not violations, tuple(violations), L)


# ---------------------------------------------------------------------------
# simplicity


@dataclass(frozen=True)
class SimplicityCertificate:
    witnesses: tuple[tuple[tuple, X.Vector], ...]  # (w_i, v_i)
    bases: tuple[tuple[tuple, tuple[tuple[int, DirectedPath], ...]], ...]  # w -> ((i, P_i), ...)
    fingerprint: str
    method: str = "canonical"

    @property
    def r(self) -> int:
        return len(self.witnesses)

    def witness_vertices(self) -> tuple:
        return tuple(w for w, _ in self.witnesses)


@dataclass(frozen=True)
class NotSimple:
    reason: str
    evidence: tuple = ()
    internal: bool = False


@dataclass(frozen=True)
class Indeterminate:
    reason: str
    attempts: int = 0


@dataclass(frozen=True)
class WDecomposition:
    subspaces: tuple[tuple[tuple, X.Matrix], ...]  # (w, t_w x r_w basis) for every w

    def basis(self, w) -> X.Matrix:
        return dict(self.subspaces)[tuple(w)]

    @property
    def ranks(self) -> dict:
        return {w: (len(B[0]) if B and B[0] else 0) for w, B in self.subspaces}

    @property
    def r(self) -> int:
        return sum(self.ranks.values())

    def support(self) -> tuple:
        return tuple(w for w, k in self.ranks.items() if k)

    def ordered_basis(self) -> list[tuple[tuple, X.Vector]]:
        """(vertex, vector) for every basis vector of the direct sum of the W_w."""
        out = []
        for w, B in self.subspaces:
            for col in X.columns(B, len(B[0]) if B and B[0] else 0):
                out.append((w, col))
        return out


def verify_certificate(D: PrelinkedDiagram, cert: SimplicityCertificate, m=None) -> bool:
    """Recheck a certificate from scratch by multiplying out every path."""
    if cert.fingerprint != D.fingerprint:
        return False
    r = cert.r
    if D.rank != r:
        return False
    if m is not None and not all(_reflect(m, w) in D.graph.index for w in cert.witness_vertices()):
        return False
    bases = dict(cert.bases)
    for w in D.graph.vertices:
        entries = bases.get(w)
        if entries is None or sorted(i for i, _ in entries) != list(range(r)):
            return False
        cols = []
        for i, P in entries:
            wi, vi = cert.witnesses[i]
            if P.tail != wi or P.head != w:
                return False
            cols.append(X.matvec(D.path_map(P), vi))
        if X.det(X.from_columns(cols, r)) == 0:
            return False
    return True


def _reflect(m, w) -> tuple:
    out = []
    for a, b in zip(m, w):
        x = 2 * Fraction(a) - b
        if x.denominator != 1:
            return ()
        out.append(int(x))
    return tuple(out)


def allowed_witness_vertices(D: PrelinkedDiagram, m=None) -> tuple:
    if m is None:
        return D.graph.vertices
    return tuple(w for w in D.graph.vertices if _reflect(m, w) in D.graph.index)


def _certificate_from(D: PrelinkedDiagram, witnesses: list, method: str) -> SimplicityCertificate | None:
    r = len(witnesses)
    bases = []
    for w in D.graph.vertices:
        cols = [X.matvec(f_composite(D, wi, w), vi) for wi, vi in witnesses]
        if X.det(X.from_columns(cols, r)) == 0:
            return None
        bases.append((w, tuple((i, minimal_path(D.graph, wi, w)) for i, (wi, _) in enumerate(witnesses))))
    return SimplicityCertificate(tuple(witnesses), tuple(bases), D.fingerprint, method)


def canonical_w(D: PrelinkedDiagram) -> dict:
    """Pivot complement of the sum of images arriving from other vertices."""
    out = {}
    for w in D.graph.vertices:
        t = D.dim(w)
        imgs = [f_composite(D, u, w) for u in D.graph.vertices if u != w]
        A = X.hstack(imgs, t) if imgs else tuple(() for _ in range(t))
        if A and A[0]:
            A = X.column_basis(A)
        out[w] = X.complement_basis(A, t)
    return out


def _direct_sum_ok(D: PrelinkedDiagram, W: dict) -> bool:
    r = D.rank
    for w in D.graph.vertices:
        blocks = [X.matmul(f_composite(D, u, w), B, inner=D.dim(u), ncols=len(B[0]) if B and B[0] else 0) for u, B in W.items() if B and B[0]]
        if not blocks:
            return False
        M = X.hstack(blocks, D.dim(w))
        if len(M[0]) != r or X.det(M) == 0:
            return False
    return True


def _rado_ok(D: PrelinkedDiagram, multiset: Sequence) -> tuple | None:
    """None if generic vectors at these vertices work, else a failing (w, subset)."""
    r = len(multiset)
    for w in D.graph.vertices:
        t = D.dim(w)
        imgs = [f_composite(D, u, w) for u in multiset]
        for k in range(1, r + 1):
            for S in combinations(range(r), k):
                M = X.hstack([imgs[i] for i in S], t)
                if X.rank(M) < k:
                    return (w, S)
    return None


def _search(D: PrelinkedDiagram, m, retries: int, seed: int):
    r = D.rank
    if r is None:
        return NotSimple("dimensions of the E_w are not uniform", internal=m is not None)
    if r == 0:
        return _certificate_from(D, [], "empty")
    allowed = set(allowed_witness_vertices(D, m))
    W = canonical_w(D)
    support = [u for u, B in W.items() if B and B[0]]
    if sum(len(W[u][0]) for u in support) == r and set(support) <= allowed and _direct_sum_ok(D, W):
        witnesses = [(u, col) for u in support for col in X.columns(W[u])]
        cert = _certificate_from(D, witnesses, "canonical")
        if cert is not None:
            return cert
    rng = random.Random(seed)
    evidence = []
    attempts = 0
    cand = [w for w in D.graph.vertices if w in allowed]
    for multiset in combinations_with_replacement(cand, r):
        bad = _rado_ok(D, multiset)
        if bad is not None:
            if len(evidence) < 16:
                evidence.append((multiset, bad[0], bad[1]))
            continue
        for _ in range(retries):
            attempts += 1
            witnesses = [(u, tuple(Fraction(rng.randint(-9, 9)) for _ in range(r))) for u in multiset]
            cert = _certificate_from(D, witnesses, "random")
            if cert is not None:
                return cert
        return Indeterminate(f"generic witnesses exist at {multiset} but {retries} random draws all failed", attempts)
    if not cand:
        return NotSimple("no vertex w has 2m - w in V(G)", internal=True)
    return NotSimple("every choice of witness vertices fails the rank condition", tuple(evidence), internal=m is not None)


def is_simple(D: PrelinkedDiagram, retries: int = DEFAULT_RETRIES, seed: int = 0):
    """Certificate, ``NotSimple`` or ``Indeterminate``.

    After the canonical complement, every multiset of witness vertices is
    screened with Rado's rank condition (for every w and every subset S of
    the witnesses, the images arriving at w from S span at least |S|
    dimensions); generic vectors work exactly when it holds, so failure of
    every multiset proves non-simplicity.
    """
    return _search(D, None, retries, seed)


def is_internally_simple(D: PrelinkedDiagram, m, retries: int = DEFAULT_RETRIES, seed: int = 0):
    """As :func:`is_simple` with witnesses restricted to w having 2m - w in V(G)."""
    m = tuple(X.q(x) for x in m)
    if sum(m) != D.graph.data.d:
        raise ValidationError(f"m must lie in H_{D.graph.data.d}")
    return _search(D, m, retries, seed)


def w_decomposition(cert: SimplicityCertificate, D: PrelinkedDiagram) -> WDecomposition:
    """W_w = span of the witnesses at w, with the direct-sum condition rechecked."""
    if cert.fingerprint != D.fingerprint:
        raise ValidationError("certificate was issued for a different diagram")
    grouped: dict = {w: [] for w in D.graph.vertices}
    for w, v in cert.witnesses:
        grouped[w].append(v)
    W = {w: X.from_columns(vs, D.dim(w)) for w, vs in grouped.items()}
    if cert.r and not _direct_sum_ok(D, {w: B for w, B in W.items() if B and B[0]}):
        raise ValidationError("witnesses do not give a direct-sum decomposition")
    return WDecomposition(tuple((w, W[w]) for w in D.graph.vertices))


def wdec_from_subspaces(D: PrelinkedDiagram, W: Mapping) -> WDecomposition:
    """Validate a user-supplied decomposition."""
    full = {w: W.get(w) or tuple(() for _ in range(D.dim(w))) for w in D.graph.vertices}
    nz = {w: B for w, B in full.items() if B and B[0]}
    if sum(len(B[0]) for B in nz.values()) != D.rank or not _direct_sum_ok(D, nz):
        raise ValidationError("subspaces do not give a direct-sum decomposition")
    return WDecomposition(tuple((w, full[w]) for w in D.graph.vertices))


# ---------------------------------------------------------------------------
# builders for common diagrams


def constant_diagram(G: LinkedGraph, t: int, s, matrix=None) -> PrelinkedDiagram:
    M = X.identity(t) if matrix is None else X.mat(matrix)
    return PrelinkedDiagram(G, X.q(s), (t,) * len(G.vertices), tuple(M for _ in G.edges))


def gauge_line(G: LinkedGraph, s, v0) -> tuple[X.Matrix, ...]:
    """1x1 maps ``s^[label = v0]``; prelinked because loops add whole copies of V."""
    s = X.q(s)
    return tuple(((s_power(s, int(e.label == v0)),),) for e in G.edges)


def geodesic_line(G: LinkedGraph, source) -> tuple[X.Matrix, ...]:
    """1x1 maps equal to 1 on edges moving one step further from ``source``, else 0.

    This is 0-prelinked and simple with its witness at ``source``.
    """
    dist = G._dist_table[tuple(source)]
    return tuple(((Fraction(int(dist[e.head] == dist[e.tail] + 1)),),) for e in G.edges)


def direct_sum(G: LinkedGraph, s, lines: Sequence[tuple[X.Matrix, ...]]) -> PrelinkedDiagram:
    """Block-diagonal diagram from per-edge blocks (each block a square matrix)."""
    maps = []
    for k in range(len(G.edges)):
        blocks = [line[k] for line in lines]
        n = sum(len(b) for b in blocks)
        M = [[Fraction(0)] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i, row in enumerate(b):
                for j, x in enumerate(row):
                    M[off + i][off + j] = x
            off += len(b)
        maps.append(X.mat(M))
    t = sum(len(line[0]) for line in lines) if G.edges else len(lines)
    return PrelinkedDiagram(G, X.q(s), (t,) * len(G.vertices), tuple(maps))


def random_invertible(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> X.Matrix:
    while True:
        M = X.mat([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])
        if X.det(M) != 0:
            return M


def random_gauge(D: PrelinkedDiagram, rng: random.Random) -> tuple[PrelinkedDiagram, dict]:
    P = {w: random_invertible(rng, D.dim(w)) for w in D.graph.vertices}
    return D.change_basis(P), P
