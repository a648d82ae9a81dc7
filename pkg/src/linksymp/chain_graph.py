"""The tree, its multidegree graph G and the asymmetric twist distance.

Multidegrees are plain integer tuples indexed by ``tree.vertices``.  A move
at ``v`` (a twist) subtracts the valence of ``v`` there and adds one at each
neighbour; edges of G are doubled twists between admissible multidegrees.
"""

from __future__ import annotations

import functools
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Hashable, Iterator, Sequence

from . import _accel
from .errors import BoundedSearchError, NoPathError, UnreachableError, ValidationError

Vertex = Hashable
Multidegree = tuple[int, ...]

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class TreeGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[Vertex, Vertex], ...]
    adjacency: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        verts = tuple(self.vertices)
        edges = tuple(tuple(e) for e in self.edges)
        if len(set(verts)) != len(verts):
            raise ValidationError("duplicate vertex ids")
        if not verts:
            raise ValidationError("empty tree")
        seen = set()
        adj = {v: [] for v in verts}
        for a, b in edges:
            if a not in adj or b not in adj:
                raise ValidationError(f"edge ({a}, {b}) uses an unknown vertex")
            if a == b:
                raise ValidationError("tree edges cannot be loops")
            key = frozenset((a, b))
            if key in seen:
                raise ValidationError(f"duplicate edge ({a}, {b})")
            seen.add(key)
            adj[a].append(b)
            adj[b].append(a)
        if len(edges) != len(verts) - 1:
            raise ValidationError("a tree on n vertices has n-1 edges")
        reach = {verts[0]}
        stack = [verts[0]]
        while stack:
            for u in adj[stack.pop()]:
                if u not in reach:
                    reach.add(u)
                    stack.append(u)
        if len(reach) != len(verts):
            raise ValidationError("tree is disconnected")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adjacency", {v: tuple(ns) for v, ns in adj.items()})

    @classmethod
    def chain(cls, n: int, prefix: str = "v") -> "TreeGraph":
        vs = tuple(f"{prefix}{i}" for i in range(1, n + 1))
        return cls(vs, tuple((vs[i], vs[i + 1]) for i in range(n - 1)))

    @functools.cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def valence(self, v: Vertex) -> int:
        return len(self.adjacency[v])

    def __len__(self) -> int:
        return len(self.vertices)

    @functools.cached_property
    def _rooted(self):
        """(parent index per vertex, vertices in BFS order) rooted at vertex 0."""
        n = len(self.vertices)
        parent = [-1] * n
        order = [0]
        seen = {0}
        for i in order:
            for u in self.adjacency[self.vertices[i]]:
                j = self.index[u]
                if j not in seen:
                    seen.add(j)
                    parent[j] = i
                    order.append(j)
        return tuple(parent), tuple(order)


@dataclass(frozen=True)
class TreeDegreeData:
    tree: TreeGraph
    d: int
    b: int
    d_v: tuple[int, ...]

    def __post_init__(self):
        dv = tuple(int(x) for x in self.d_v)
        object.__setattr__(self, "d_v", dv)
        if len(dv) != len(self.tree):
            raise ValidationError("one d_v per tree vertex is required")
        if sum(dv) - len(self.tree.edges) * 2 * self.b != self.d:
            raise ValidationError(
                f"degree data inconsistent: sum(d_v) - 2b|E| = {sum(dv) - 2 * self.b * len(self.tree.edges)} != d = {self.d}"
            )

    @classmethod
    def chain(cls, d: int, b: int, d_v: Sequence[int]) -> "TreeDegreeData":
        return cls(TreeGraph.chain(len(d_v)), d, b, tuple(d_v))

    def in_hyperplane(self, w: Sequence) -> bool:
        return len(w) == len(self.tree) and sum(w) == self.d

    def require_hyperplane(self, *ws: Sequence) -> None:
        for w in ws:
            if not self.in_hyperplane(w):
                raise ValidationError(f"{tuple(w)} is not in H_{self.d}")


@dataclass(frozen=True)
class Edge:
    tail: Multidegree
    head: Multidegree
    label: Vertex


@dataclass(frozen=True)
class LinkedGraph:
    data: TreeDegreeData
    vertices: tuple[Multidegree, ...]
    edges: tuple[Edge, ...]

    @functools.cached_property
    def index(self) -> dict[Multidegree, int]:
        return {w: i for i, w in enumerate(self.vertices)}

    @functools.cached_property
    def out_edges(self) -> dict[Multidegree, tuple[Edge, ...]]:
        out: dict = {w: [] for w in self.vertices}
        for e in self.edges:
            out[e.tail].append(e)
        return {w: tuple(es) for w, es in out.items()}

    @functools.cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def __contains__(self, w) -> bool:
        return tuple(w) in self.index

    @functools.cached_property
    def _dist_table(self) -> dict[Multidegree, dict[Multidegree, int]]:
        table = {}
        for w in self.vertices:
            dist = {w: 0}
            queue = deque([w])
            while queue:
                x = queue.popleft()
                for e in self.out_edges[x]:
                    if e.head not in dist:
                        dist[e.head] = dist[x] + 1
                        queue.append(e.head)
            table[w] = dist
        return table

    def graph_distance(self, w, w2) -> int:
        try:
            return self._dist_table[tuple(w)][tuple(w2)]
        except KeyError:
            raise NoPathError(f"no path from {tuple(w)} to {tuple(w2)}") from None

    @functools.cached_property
    def diameter(self) -> int:
        return max((max(row.values()) for row in self._dist_table.values()), default=0)


@dataclass(frozen=True)
class DirectedPath:
    start: Multidegree
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        cur = self.start
        for e in self.edges:
            if e.tail != cur:
                raise ValidationError("path edges do not compose")
            cur = e.head

    @property
    def tail(self) -> Multidegree:
        return self.start

    @property
    def head(self) -> Multidegree:
        return self.edges[-1].head if self.edges else self.start

    def __len__(self) -> int:
        return len(self.edges)

    def labels(self) -> Counter:
        """v(P) as a multiset."""
        return Counter(e.label for e in self.edges)

    def then(self, e: Edge) -> "DirectedPath":
        return DirectedPath(self.start, self.edges + (e,))


# ---------------------------------------------------------------------------
# construction


def build_linked_graph(data: TreeDegreeData) -> LinkedGraph:
    """All admissible multidegrees and the doubled-twist edges between them.

    Rooting the tree, condition (iii) says each non-root subtree sum lies in
    ``[L, L + 2b]`` with ``L = sum(d_u) - 2b|subtree|``, and the parity
    condition cuts this to ``b + 1`` values.  Every choice of subtree sums
    gives exactly one vertex.
    """
    tree = data.tree
    n = len(tree)
    parent, order = tree._rooted
    children = [[] for _ in range(n)]
    for i in range(n):
        if parent[i] >= 0:
            children[parent[i]].append(i)
    subtree = [[i] for i in range(n)]
    for i in reversed(order):
        for c in children[i]:
            subtree[i].extend(subtree[c])
    nonroot = [i for i in range(n) if parent[i] >= 0]
    low = {i: sum(data.d_v[u] for u in subtree[i]) - 2 * data.b * len(subtree[i]) for i in nonroot}
    verts = set()
    if data.b >= 0:
        for choice in product(range(data.b + 1), repeat=len(nonroot)):
            S = {i: low[i] + 2 * c for i, c in zip(nonroot, choice)}
            w = [0] * n
            for i in nonroot:
                w[i] = S[i] - sum(S[c] for c in children[i])
            root = order[0]
            w[root] = data.d - sum(w[i] for i in nonroot)
            verts.add(tuple(w))
    vertices = tuple(sorted(verts))
    vset = set(vertices)
    edges = []
    for w in vertices:
        for v in tree.vertices:
            disp = twist_multidegree(tree, v)
            if not any(disp):
                continue
            h = tuple(a + 2 * x for a, x in zip(w, disp))
            if h in vset:
                edges.append(Edge(w, h, v))
    return LinkedGraph(data, vertices, tuple(edges))


def is_admissible(data: TreeDegreeData, w: Sequence[int]) -> bool:
    """Direct check of conditions (i)-(iii); used as an enumeration oracle."""
    tree = data.tree
    if not data.in_hyperplane(w):
        return False
    if any((x - dv) % 2 for x, dv in zip(w, data.d_v)):
        return False
    for a, b in tree.edges:
        for side in _components_without_edge(tree, a, b):
            idx = [tree.index[u] for u in side]
            if len(idx) * 2 * data.b - sum(data.d_v[i] - w[i] for i in idx) < 0:
                return False
    return True


def _components_without_edge(tree: TreeGraph, a, b):
    comps = []
    for start in (a, b):
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in tree.adjacency[x]:
                if {x, y} == {a, b} or y in seen:
                    continue
                seen.add(y)
                stack.append(y)
        comps.append(seen)
    return comps


def twist_multidegree(tree: TreeGraph, v: Vertex) -> Multidegree:
    """Degree vector of the twisting bundle at ``v``."""
    if v not in tree.adjacency:
        raise ValidationError(f"unknown vertex {v!r}")
    out = [0] * len(tree)
    out[tree.index[v]] = -tree.valence(v)
    for u in tree.adjacency[v]:
        out[tree.index[u]] += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# distance on H_d


def _as_rational(w) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in w)


def move_counts(tree: TreeGraph, w, w2) -> tuple[Fraction, ...]:
    """Twist counts (normalised to minimum 0) carrying ``w`` to ``w2``.

    On a tree the counts are determined up to a common shift: crossing the
    edge into a child's subtree T changes the count by ``-sum_T(w2 - w)``.
    """
    parent, order = tree._rooted
    n = len(tree)
    diff = [Fraction(b) - Fraction(a) for a, b in zip(w, w2)]
    sub = list(diff)
    for i in reversed(order):
        if parent[i] >= 0:
            sub[parent[i]] += sub[i]
    c = [Fraction(0)] * n
    for i in order:
        if parent[i] >= 0:
            c[i] = c[parent[i]] - sub[i]
    lo = min(c)
    return tuple(x - lo for x in c)


@functools.lru_cache(maxsize=1 << 18)
def _tree_distance_cached(tree: TreeGraph, w: tuple, w2: tuple) -> int:
    if sum(Fraction(x) for x in w) != sum(Fraction(x) for x in w2):
        raise ValidationError("distance is only defined within one hyperplane")
    c = move_counts(tree, w, w2)
    if any(x.denominator != 1 for x in c):
        raise UnreachableError(f"{w} and {w2} differ by a non-lattice vector")
    return int(sum(c))


def tree_distance(data: TreeDegreeData | TreeGraph, w, w2) -> int:
    """Closed-form distance; agrees with :func:`distance` (tested)."""
    tree = data.tree if isinstance(data, TreeDegreeData) else data
    return _tree_distance_cached(tree, _as_rational(w), _as_rational(w2))


def distance(data: TreeDegreeData, w, w2, cap: int = DEFAULT_CAP) -> int:
    """Breadth-first distance from ``w`` to ``w2`` in H_d.

    Rational points are handled by scaling coordinates and moves by a common
    denominator.  Points that no move sequence connects raise
    :class:`UnreachableError` up front instead of exhausting the cap.
    """
    wq, w2q = _as_rational(w), _as_rational(w2)
    if sum(wq) != data.d or sum(w2q) != data.d or len(wq) != len(data.tree):
        raise ValidationError(f"both points must lie in H_{data.d}")
    tree = data.tree
    c = move_counts(tree, wq, w2q)
    if any(x.denominator != 1 for x in c):
        raise UnreachableError(f"{tuple(w)} cannot be moved to {tuple(w2)}")
    D = math.lcm(*(x.denominator for x in wq + w2q))
    start = [int(x * D) for x in wq]
    target = [int(x * D) for x in w2q]
    moves = [[D * x for x in twist_multidegree(tree, v)] for v in tree.vertices]
    res = _accel.bfs_distance(start, target, moves, cap)
    if res == _accel.NOT_FOUND:
        raise BoundedSearchError(f"distance search exceeded {cap} states")
    return res


def twist_sequence(data: TreeDegreeData, w, w2) -> Counter:
    """A minimal multiset of twists carrying ``w`` to ``w2``."""
    data.require_hyperplane(w, w2)
    c = move_counts(data.tree, w, w2)
    if any(x.denominator != 1 for x in c):
        raise UnreachableError(f"{tuple(w)} cannot be moved to {tuple(w2)}")
    return Counter({v: int(x) for v, x in zip(data.tree.vertices, c) if x})


def midpoint(w, w2) -> tuple[Fraction, ...]:
    return tuple(Fraction(a + b, 2) for a, b in zip(w, w2))


# ---------------------------------------------------------------------------
# paths in G


def minimal_path(G: LinkedGraph, w, w2) -> DirectedPath:
    """One shortest directed path (first found in edge order)."""
    w, w2 = tuple(w), tuple(w2)
    for x in (w, w2):
        if x not in G.index:
            raise ValidationError(f"{x} is not a vertex of G")
    prev: dict = {w: None}
    queue = deque([w])
    while queue and w2 not in prev:
        x = queue.popleft()
        for e in G.out_edges[x]:
            if e.head not in prev:
                prev[e.head] = e
                queue.append(e.head)
    if w2 not in prev:
        raise NoPathError(f"no path from {w} to {w2}")
    edges = []
    cur = w2
    while prev[cur] is not None:
        edges.append(prev[cur])
        cur = prev[cur].tail
    return DirectedPath(w, tuple(reversed(edges)))


def all_minimal_paths(G: LinkedGraph, w, w2) -> Iterator[DirectedPath]:
    w, w2 = tuple(w), tuple(w2)
    target = G.graph_distance(w, w2)
    dist_to = {x: G._dist_table[x].get(w2) for x in G.vertices}

    def rec(path: DirectedPath):
        if path.head == w2 and len(path) == target:
            yield path
            return
        for e in G.out_edges[path.head]:
            r = dist_to[e.head]
            if r is not None and len(path) + 1 + r == target:
                yield from rec(path.then(e))

    yield from rec(DirectedPath(w))


def paths_of_length(G: LinkedGraph, w, n: int) -> Iterator[DirectedPath]:
    """Every directed path of exactly ``n`` edges starting at ``w``."""

    def rec(path: DirectedPath):
        if len(path) == n:
            yield path
            return
        for e in G.out_edges[path.head]:
            yield from rec(path.then(e))

    yield from rec(DirectedPath(tuple(w)))
