"""Explicit families of rank-2 limit linear series on a chain of elliptic curves.

Only the combinatorial shadow is modelled: vanishing sequences, the shape of
each component bundle, which section spaces are forced and which carry a
one-parameter choice, and which lines the gluing maps must match. That is
enough to audit dimensions, check refinedness and decide stability.

Components are numbered 1..g and sections 1..k throughout, as in the tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

from .chain_graph import TreeDegreeData
from .dimensions import SPECIAL_CASES, BNParams, case_inequality, rho_special
from .errors import CheckFailure, ValidationError

# ---------------------------------------------------------------------------
# labels


@dataclass(frozen=True)
class LineBundleLabel:
    """O(aP + bQ) when ``twist`` is None, else L_i(-aP - bQ) for the aspect L_i."""

    a: int
    b: int
    twist: int | None = None
    det_degree: int | None = None  # degree of L_i when twisted

    @property
    def degree(self) -> int:
        if self.twist is None:
            return self.a + self.b
        return self.det_degree - self.a - self.b

    def render(self) -> str:
        if self.twist is None:
            return f"O({self.a},{self.b})"
        return f"L_{self.twist}({self.a},{self.b})"


@dataclass(frozen=True)
class GenericLine:
    """An aspect or summand only known up to its degree and genericity flags."""

    index: int
    degree: int
    not_split_form: bool = True
    square_not_det: bool = True

    def render(self) -> str:
        return f"L_{self.index}"


@dataclass(frozen=True)
class Dec:
    first: LineBundleLabel
    second: LineBundleLabel

    @property
    def isomorphic(self) -> bool:
        return self.first == self.second

    @property
    def degrees(self) -> tuple[int, int]:
        return (self.first.degree, self.second.degree)

    def render(self) -> str:
        return f"{self.first.render()} + {self.second.render()}"


@dataclass(frozen=True)
class EI:
    """The nonsplit self-extension of O(a,b)."""

    a: int
    b: int

    def render(self) -> str:
        return f"EI({self.a},{self.b})"


@dataclass(frozen=True)
class OI:
    """A stable bundle of odd degree with determinant ``det``."""

    det: LineBundleLabel | GenericLine

    def render(self) -> str:
        return f"OI({self.det.render()})"


@dataclass(frozen=True)
class Generic:
    """L' + L_i (L')^-1 with L' of degree d' avoiding the split and square forms."""

    index: int
    degrees: tuple[int, int]

    def render(self) -> str:
        return f"Gen(L_{self.index})"


BundleLabel = Dec | EI | OI | Generic


def aut_dim(E: BundleLabel) -> int:
    """Dimension of automorphisms fixing the determinant."""
    if isinstance(E, Dec):
        return 3 if E.isomorphic else 1
    if isinstance(E, OI):
        return 0
    return 1


def is_semistable(E: BundleLabel) -> bool:
    if isinstance(E, (Dec, Generic)):
        a, b = E.degrees
        return a == b
    return True


# ---------------------------------------------------------------------------
# the curve and its determinant


def det_aspect(g: int, d: int, i: int, j: int | None = None) -> LineBundleLabel | GenericLine:
    """Aspect of the special determinant on component i.

    With ``j`` given the multidegree is d - 1 everywhere except d at j.
    """
    if not g - 2 <= d <= 2 * g - 2:
        raise ValidationError(f"degree {d} outside [g-2, 2g-2] for g={g}")
    if not 1 <= i <= g:
        raise ValidationError(f"component {i} outside 1..{g}")
    deg = d if j is None or i == j else d - 1
    if i > d + 2 - g:
        return GenericLine(i, deg)
    if j is None or i == j:
        return LineBundleLabel(2 * (i - 1), d - 2 * i + 2)
    if i < j:
        return LineBundleLabel(2 * (i - 1), d - 2 * i + 1)
    return LineBundleLabel(2 * i - 3, d - 2 * i + 2)


def special_det_aspects(g: int, d: int, j: int | None = None) -> list:
    return [det_aspect(g, d, i, j) for i in range(1, g + 1)]


@dataclass(frozen=True)
class ChainCurveSpec:
    g: int
    d: int
    k: int
    b: int
    multidegree: tuple[int, ...]
    special_component: int | None
    # P_i - Q_i is not m-torsion for 1 <= m <= 2d
    generic_points: bool = True

    def aspect(self, i: int):
        return det_aspect(self.g, self.d, i, self.special_component)

    def degree_data(self) -> TreeDegreeData:
        """The same chain as tree degree data; construction validates the degree identity."""
        return TreeDegreeData.chain(self.d, self.b, self.multidegree)


# ---------------------------------------------------------------------------
# component roles


@dataclass(frozen=True)
class Role:
    kind: str  # init, cyc, pre, mid, ei, oi, post, generic
    c: int = 0
    m: int = 0


@dataclass(frozen=True)
class Layout:
    p: BNParams
    case: str

    @property
    def K2(self) -> int:
        return self.p.k1**2

    @property
    def ei(self) -> int | None:
        k1 = self.p.k1
        return {"EO": self.K2 + k1 + 1, "OO": self.K2 + 2 * k1 + 1}.get(self.case)

    @property
    def oi(self) -> int | None:
        p, k1 = self.p, self.p.k1
        if self.case == "OE":
            return self.K2 + 2 * k1 * (p.g - 2 - p.d1) + 1
        if self.case == "OO":
            return self.K2 + 2 * k1 + 2
        return None

    @property
    def end(self) -> int:
        """Last component with prescribed behaviour."""
        p, k1 = self.p, self.p.k1
        if self.case == "EE":
            return self.K2 + 2 * k1 * (p.g - 1 - p.d1)
        if self.case == "EO":
            return self.ei + (2 * k1 + 1) * (p.g - 1 - p.d1)
        if self.case == "OE":
            return self.oi + k1
        return self.oi + (2 * k1 + 1) * (p.g - 2 - p.d1)

    def role(self, i: int) -> Role:
        k1, K2 = self.p.k1, self.K2
        if i <= K2:
            m = isqrt(i - 1)
            return Role("init", i - m * m, m)
        if i > self.end:
            return Role("generic")
        case = self.case
        if case == "EE":
            m, c = divmod(i - K2 - 1, 2 * k1)
            return Role("cyc", c + 1, m)
        if case == "EO":
            if i <= K2 + k1:
                return Role("pre", i - K2)
            if i == self.ei:
                return Role("ei")
            m, c = divmod(i - self.ei - 1, 2 * k1 + 1)
            return Role("cyc", c + 1, m)
        if case == "OE":
            if i < self.oi:
                m, c = divmod(i - K2 - 1, 2 * k1)
                return Role("cyc", c + 1, m)
            if i == self.oi:
                return Role("oi")
            return Role("post", i - self.oi)
        if i <= K2 + k1:
            return Role("pre", i - K2)
        if i <= K2 + 2 * k1:
            return Role("mid", i - K2 - k1)
        if i == self.ei:
            return Role("ei")
        if i == self.oi:
            return Role("oi")
        m, c = divmod(i - self.oi - 1, 2 * k1 + 1)
        return Role("cyc", c + 1, m)

    def bumped(self, i: int) -> frozenset:
        """Indices j with epsilon^i_j = 1 (the sections that gain no vanishing)."""
        r = self.role(i)
        k1 = self.p.k1
        if r.kind == "init":
            c, m = r.c, r.m
            if c == 2 * m + 1:
                return frozenset({2 * m + 1, 2 * m + 2})
            return frozenset({c, 2 * m + 1 if c % 2 else 2 * m + 2})
        if r.kind == "cyc":
            return frozenset({r.c})
        if r.kind == "pre":
            return frozenset({2 * r.c - 1, 2 * k1 + 1})
        if r.kind in ("mid", "post"):
            return frozenset({2 * r.c})
        if r.kind == "ei":
            return frozenset({2 * k1 + 1})
        if r.kind == "oi":
            return frozenset(range(1, self.p.k + 1, 2))
        return frozenset()

    def summand_index(self, i: int) -> int | None:
        """Which a^i_j fixes the O(a, d'-a) summand (None for non-split bundles)."""
        r = self.role(i)
        if r.kind in ("init", "cyc"):
            return r.c
        if r.kind in ("pre", "ei"):
            return 2 * self.p.k1 + 1
        if r.kind in ("mid", "post"):
            return 2 * r.c
        return None


def _layout(case: str, g: int, d: int, k: int) -> Layout:
    p = BNParams(g, d, k)
    case = case.upper()
    ineq = case_inequality(p, case)
    if k < 2 or p.d1 < 0:
        raise ValidationError(f"{p.triple}: need k >= 2 and d >= 0")
    if not g - 2 <= d <= 2 * g - 2:
        raise ValidationError(f"{p.triple}: degree outside [g-2, 2g-2]")
    if not ineq.holds:
        raise ValidationError(f"{p.triple}: the construction needs {ineq.rhs} components but g = {g}")
    return Layout(p, case)


def curve_spec(lay: Layout) -> ChainCurveSpec:
    p = lay.p
    j = lay.oi
    degs = tuple(p.d if j is None or i == j else p.d - 1 for i in range(1, p.g + 1))
    return ChainCurveSpec(p.g, p.d, p.k, p.d1, degs, j)


# ---------------------------------------------------------------------------
# vanishing sequences


@dataclass(frozen=True)
class VanishingTable:
    g: int
    k: int
    b: int
    sequences: tuple[tuple[int, ...], ...]  # a^1 .. a^{g+1}

    def a(self, i: int) -> tuple[int, ...]:
        return self.sequences[i - 1]

    def p_column(self, i: int) -> tuple[int, ...]:
        return self.a(i)

    def q_column(self, i: int) -> tuple[int, ...]:
        return tuple(self.b - x for x in self.a(i + 1))

    def rows(self) -> list[list[tuple[int, int]]]:
        return [[(self.a(i)[j], self.q_column(i)[j]) for i in range(1, self.g + 1)] for j in range(self.k)]

    def render(self) -> list[str]:
        return [" | ".join(f"{x} {y}" for x, y in row) for row in self.rows()]


def initial_sequence(k: int) -> tuple[int, ...]:
    """0, 0, 1, 1, ... of length k."""
    return tuple(j // 2 for j in range(k))


def _sequences(lay: Layout) -> VanishingTable:
    p = lay.p
    seqs = [initial_sequence(p.k)]
    for i in range(1, p.g + 1):
        eps = lay.bumped(i)
        prev = seqs[-1]
        seqs.append(tuple(x + (0 if j + 1 in eps else 1) for j, x in enumerate(prev)))
    return VanishingTable(p.g, p.k, p.d1, tuple(seqs))


def gen_sequences(case: str, g: int, d: int, k: int) -> VanishingTable:
    lay = _layout(case, g, d, k)
    table = _sequences(lay)
    check_table(lay, table)
    return table


# ---------------------------------------------------------------------------
# observations on the sequences


@dataclass(frozen=True)
class Observation:
    name: str
    holds: bool
    detail: str = ""


def observations(lay: Layout, T: VanishingTable) -> list[Observation]:
    p, case = lay.p, lay.case
    k1, K2 = p.k1, lay.K2
    out = []

    # refinedness: Q value + next P value = b on every row
    bad = [
        (i, j)
        for i in range(1, p.g)
        for j in range(p.k)
        if T.q_column(i)[j] + T.p_column(i + 1)[j] != T.b
    ]
    out.append(Observation("refined", not bad, f"failures at {bad[:3]}" if bad else ""))

    nondecr = all(all(s[j] <= s[j + 1] for j in range(p.k - 1)) for s in T.sequences)
    out.append(Observation("nondecreasing", nondecr))

    # (i): pairs interleave; in the odd-k and odd-d cases only a weaker shape holds
    if case == "EE":
        ok = all(
            s[2 * j - 2] <= s[2 * j - 1] < s[2 * j] <= s[2 * j + 1] for s in T.sequences for j in range(1, k1)
        )
    else:
        ok = nondecr and all(max(s.count(v) for v in s) <= 2 for s in T.sequences)
    out.append(Observation("interleaving", ok))

    # (ii): a^{i+1}_{2j} = a^i_{2j-1} + 1 except at squares
    if case == "EE":
        ok = True
        for i in range(1, p.g + 1):
            for j in range(1, k1 + 1):
                lhs, base = T.a(i + 1)[2 * j - 1], T.a(i)[2 * j - 2]
                square = any(i == (m + 1) ** 2 and j == m + 1 for m in range(k1))
                ok &= lhs == (base if square else base + 1)
        out.append(Observation("pair-advance", ok))

    # (iii): the two bumped entries on the first K2 components sum to 2(i - 1)
    ok = True
    for i in range(1, min(K2, p.g) + 1):
        j1, j2 = sorted(lay.bumped(i))
        ok &= T.a(i)[j1 - 1] + T.a(i)[j2 - 1] == 2 * (i - 1)
    out.append(Observation("bumped-sum", ok))

    # (iv): room left by the single bump in the cycling range
    if case == "EE":
        ok = True
        for i in range(K2 + 1, lay.end + 1):
            (j,) = lay.bumped(i)
            ok &= 2 * (i - 1) > T.a(i)[j - 1] + T.a(i)[2 * k1 - 1] + 1
        out.append(Observation("cycling-room", ok))

    # (v): the last sequence is the initial one reflected through b
    last = T.sequences[-1]
    ok = tuple(sorted(T.b - x for x in last)) == T.sequences[0]
    out.append(Observation("final-sequence", ok, f"a^{p.g + 1} = {last}"))
    return out


def check_table(lay: Layout, T: VanishingTable) -> None:
    failed = [o for o in observations(lay, T) if not o.holds]
    if failed:
        names = ", ".join(o.name for o in failed)
        raise CheckFailure("vanishing-observations", f"{lay.p.triple} {lay.case}: {names}", failed)


# ---------------------------------------------------------------------------
# bundles


def _bundle(lay: Layout, T: VanishingTable, spec: ChainCurveSpec, i: int) -> BundleLabel:
    p = lay.p
    r = lay.role(i)
    L = spec.aspect(i)
    if r.kind == "generic":
        deg = spec.multidegree[i - 1]
        return Generic(i, (p.d1, deg - p.d1))
    if r.kind == "oi":
        return OI(L)
    a = T.a(i)[lay.summand_index(i) - 1]
    if r.kind == "ei":
        return EI(a, p.d1 - a)
    first = LineBundleLabel(a, p.d1 - a)
    if isinstance(L, GenericLine):
        second = LineBundleLabel(a, p.d1 - a, twist=i, det_degree=L.degree)
        return Dec(first, second)
    second = LineBundleLabel(L.a - a, L.b - (p.d1 - a))
    return Dec(*sorted((first, second), key=lambda x: (x.a, x.b)))


# ---------------------------------------------------------------------------
# section spaces


def _h0_line(lb: LineBundleLabel, x: int, y: int) -> int:
    """h^0 of lb(-xP - yQ) with P - Q of large order and generic aspects."""
    deg = lb.degree - x - y
    if deg > 0:
        return deg
    if deg < 0:
        return 0
    if lb.twist is not None:
        return 0  # genericity of the aspect rules out O(aP + bQ)
    return 1 if lb.a == x else 0


def h0(E: BundleLabel, x: int, y: int) -> int:
    if isinstance(E, Dec):
        return _h0_line(E.first, x, y) + _h0_line(E.second, x, y)
    if isinstance(E, EI):
        deg = E.a + E.b - x - y
        if deg > 0:
            return 2 * deg
        return 1 if deg == 0 and E.a == x else 0
    if isinstance(E, OI):
        return max(E.det.degree - 2 * (x + y), 0)
    return sum(max(deg - x - y, 0) for deg in E.degrees)


@dataclass(frozen=True)
class Piece:
    """One summand of V^i built from spaces Gamma(E(-a^i_p P - (b - a^{i+1}_q) Q)).

    kinds: span (the whole space), line (1-dim choice in a 2-dim space),
    usum (sum of two spaces meeting in a line), plane (2-dim choice in a
    3-dim space through a fixed line, added to a base space), pair (two
    lines tied by one condition).
    """

    kind: str
    spaces: tuple[tuple[int, int], ...]
    dim: int
    params: int


def _twist(T: VanishingTable, i: int, pq: tuple[int, int]) -> tuple[int, int]:
    pi, qi = pq
    return T.a(i)[pi - 1], T.b - T.a(i + 1)[qi - 1]


def _piece(kind: str, E, T, i, *spaces) -> Piece:
    tw = [_twist(T, i, s) for s in spaces]
    hs = [h0(E, *t) for t in tw]
    where = f"component {i} {kind}{spaces}"
    if kind == "span":
        return Piece(kind, spaces, hs[0], 0)
    if kind == "line":
        if hs[0] != 2:
            raise CheckFailure("section-space", f"{where}: ambient has dimension {hs[0]}, not 2")
        return Piece(kind, spaces, 1, 1)
    if kind == "usum":
        (x1, y1), (x2, y2) = tw
        dim = hs[0] + hs[1] - h0(E, max(x1, x2), max(y1, y2))
        if dim != 3:
            raise CheckFailure("section-space", f"{where}: sum has dimension {dim}, not 3")
        return Piece(kind, spaces, dim, 0)
    if kind == "plane":
        base, amb, fixed = tw
        if hs[1] != 3 or hs[2] != 1:
            raise CheckFailure("section-space", f"{where}: ambient {hs[1]}, fixed line {hs[2]}")
        meet = h0(E, max(base[0], amb[0]), max(base[1], amb[1]))
        if meet != 1:
            raise CheckFailure("section-space", f"{where}: base meets ambient in dimension {meet}")
        return Piece(kind, spaces, hs[0] + 1, 1)
    if kind == "pair":
        if hs != [2, 2]:
            raise CheckFailure("section-space", f"{where}: ambients have dimensions {hs}")
        return Piece(kind, spaces, 2, 1)
    raise ValueError(kind)


def _pieces(lay: Layout, T: VanishingTable, E, i: int) -> tuple[Piece, ...]:
    r, case, k1 = lay.role(i), lay.case, lay.p.k1
    top = 2 * k1 + 1
    P = lambda kind, *s: _piece(kind, E, T, i, *s)  # noqa: E731
    odd_pairs = tuple(P("span", (2 * j - 1, 2 * j)) for j in range(1, k1 + 1))

    def even_pairs():
        return tuple(P("span", (2 * j, 2 * j + 1)) for j in range(1, k1 + 1))

    if case == "EE" or (case == "OE" and r.kind in ("init", "cyc", "generic")):
        return odd_pairs
    if case == "OE":
        if r.kind == "oi":
            return (P("plane", (1, 2 * k1 - 1), (2 * k1 - 1, 2 * k1), (2 * k1 - 1, 2 * k1 - 1)),)
        c = r.c
        if c == k1:
            # the sum collapses: the would-be second space needs a (k+1)-th section
            return odd_pairs
        return tuple(
            [P("span", (2 * j - 1, 2 * j)) for j in range(1, c)]
            + [P("usum", (2 * c - 1, 2 * c), (2 * c, 2 * c + 1))]
            + [P("span", (2 * j, 2 * j + 1)) for j in range(c + 1, k1)]
            + [P("line", (2 * k1, 2 * k1))]
        )

    # odd k: EO and OO share most shapes
    def pre_shape(c):
        return tuple(
            [P("line", (1, 1))]
            + [P("span", (2 * j, 2 * j + 1)) for j in range(1, c - 1)]
            + [P("usum", (2 * c - 2, 2 * c - 1), (2 * c - 1, 2 * c))]
            + [P("span", (2 * j - 1, 2 * j)) for j in range(c + 1, k1 + 1)]
            + [P("span", (top, top))]
        )

    if r.kind == "init" or (case == "OO" and r.kind == "mid" and r.c == k1):
        return (P("line", (top, top)), *odd_pairs)
    if r.kind == "pre":
        return (P("span", (top, top)), *odd_pairs) if r.c == 1 else pre_shape(r.c)
    if r.kind == "ei":
        return (P("line", (1, 1)), *even_pairs()) if case == "EO" else (P("span", (top, top)), *odd_pairs)
    if r.kind == "oi":
        return (P("span", (1, top)),)
    if r.kind == "mid":
        c = r.c
        return tuple(
            [P("span", (2 * j - 1, 2 * j)) for j in range(1, c)]
            + [P("usum", (2 * c - 1, 2 * c), (2 * c, 2 * c + 1))]
            + [P("span", (2 * j - 2, 2 * j - 1)) for j in range(c + 2, k1 + 1)]
            + [P("pair", (2 * k1, 2 * k1), (top, top))]
        )
    if r.kind == "cyc" and r.c == 1:
        return (P("span", (1, 1)), *even_pairs())
    return (P("line", (1, 1)), *even_pairs())


# ---------------------------------------------------------------------------
# gluing constraints

# line names at a node: O and L are the restrictions of the two summands
# (O is also the distinguished line subbundle of an EI), "ell" a fiber line
# cut out by the section space and distinct from both.
SWAP = (("O", "L"), ("L", "O"))


def _gluing(lay: Layout, i: int) -> tuple[tuple[str, str], ...]:
    """Forced line matchings (source at Q_i, target at P_{i+1}) on edge i."""
    r, case, k1 = lay.role(i), lay.case, lay.p.k1
    kind, c, m = r.kind, r.c, r.m
    odd_k = case in ("EO", "OO")
    ell = (("ell", "ell"),)
    if kind == "init":
        base = ell if odd_k else ()
        return base + (SWAP if c % 2 and c < 2 * m + 1 else ())
    if kind == "generic":
        return ell if odd_k else ()
    if case == "EE":
        return SWAP if c % 2 else ()
    if case == "OE":
        if kind == "cyc":
            return SWAP if c % 2 else ()
        if kind == "oi":
            return (("ell", "L"), ("ell", "ell"))
        return (("L", "L"), ("ell", "ell")) if c <= k1 - 1 else ()
    if kind == "cyc":
        first = (("O", "ell"),) if case == "EO" and c == 1 else ell
        return first + (SWAP if c % 2 == 0 else ())
    if kind == "ei":
        return (("ell", "O"),) if case == "EO" else (("O", "ell"),)
    if kind == "oi":
        return ell
    if case == "EO":  # pre
        return ((("L", "ell"),) if c == 1 else ell) + (("O", "O"),)
    if kind == "pre":
        return (("ell", "ell"), ("O", "O")) if c < k1 else (("ell", "L"), ("O", "ell"))
    return (("L", "L"), ("ell", "ell")) if c < k1 else (("ell", "O"),)


# ---------------------------------------------------------------------------
# nondegeneracy requirements (recorded, not verified)


def _flags(lay: Layout, i: int) -> tuple[str, ...]:
    r, case, k1 = lay.role(i), lay.case, lay.p.k1
    out = []
    if case == "EO":
        if r.kind == "init" and r.c % 2 == 0 and r.c < 2 * r.m + 1:
            out.append(f"nondegenerate l(V,a_{2 * k1 + 1},P)")
        if r.kind == "pre" and r.c >= 3 or r.kind == "ei" and k1 >= 2:
            out.append("nondegenerate l(V,a_1,P)")
        if r.kind == "cyc" and r.c >= 3 and r.c % 2:
            out.append("nondegenerate l(V,a_1,P)")
    elif case == "OE":
        if r.kind == "post" and r.c <= k1 - 1:
            out.append(f"nondegenerate l(V,a_{2 * k1},P) and l(V,Q)")
        if r.kind == "oi":
            out.append("l(V,Q) lines distinct")
    elif case == "OO":
        if r.kind == "init" and r.c % 2 and r.c < 2 * r.m + 1:
            out.append(f"nondegenerate l(V,Q) for a_{2 * k1 + 1}")
        if r.kind == "pre" and r.c >= 2:
            out.append("nondegenerate l(V,Q) for a_1")
        if r.kind == "mid":
            out.append("assumed: l-lines at P agree iff l-lines at Q agree (taken as given, not modelled)")
        if r.kind == "cyc" and r.c % 2 == 0:
            out.append("nondegenerate l(V,Q) for a_1")
    return tuple(out)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Component:
    index: int
    role: Role
    bundle: BundleLabel
    pieces: tuple[Piece, ...]
    flags: tuple[str, ...]

    @property
    def vchoices(self) -> int:
        return sum(pc.params for pc in self.pieces)

    @property
    def section_dim(self) -> int:
        return sum(pc.dim for pc in self.pieces)


@dataclass(frozen=True)
class FamilyReport:
    case: str
    params: BNParams
    curve: ChainCurveSpec
    table: VanishingTable
    components: tuple[Component, ...]
    gluings: tuple[tuple[tuple[str, str], ...], ...]  # edge i at position i - 1
    chain_adaptable: bool = True  # asserted by the construction, not modelled
    notes: tuple[str, ...] = field(default=())

    @property
    def bundles(self) -> tuple[BundleLabel, ...]:
        return tuple(c.bundle for c in self.components)

    def constraint_counts(self) -> list[int]:
        return [len(x) for x in self.gluings]

    def render(self) -> str:
        rows = self.table.render()
        rows.append(" | ".join(b.render() for b in self.bundles))
        return "\n".join(rows) + "\n"


def build_family(case: str, g: int, d: int, k: int) -> FamilyReport:
    return _build(case.upper(), g, d, k)


@lru_cache(maxsize=512)
def _build(case: str, g: int, d: int, k: int) -> FamilyReport:
    lay = _layout(case, g, d, k)
    T = _sequences(lay)
    check_table(lay, T)
    spec = curve_spec(lay)
    spec.degree_data()
    comps = []
    for i in range(1, g + 1):
        E = _bundle(lay, T, spec, i)
        pieces = _pieces(lay, T, E, i)
        comp = Component(i, lay.role(i), E, pieces, _flags(lay, i))
        if comp.section_dim != k:
            raise CheckFailure("section-space", f"component {i}: V has dimension {comp.section_dim}, not {k}")
        comps.append(comp)
    glue = tuple(_gluing(lay, i) for i in range(1, g))
    return FamilyReport(case, lay.p, spec, T, tuple(comps), glue)


# ---------------------------------------------------------------------------
# dimension audit


@dataclass(frozen=True)
class DimensionAudit:
    moduli: int
    aut: int
    gluing: int
    vchoices: int
    expected: int

    @property
    def total(self) -> int:
        return self.moduli - self.aut + self.gluing + self.vchoices

    @property
    def ok(self) -> bool:
        return self.total == self.expected

    def as_dict(self) -> dict:
        return {
            "moduli": self.moduli,
            "aut": self.aut,
            "gluing": self.gluing,
            "vchoices": self.vchoices,
            "total": self.total,
            "rho_L": self.expected,
        }


def audit_terms(rep: FamilyReport) -> DimensionAudit:
    return DimensionAudit(
        moduli=sum(isinstance(c.bundle, Generic) for c in rep.components),
        aut=sum(aut_dim(c.bundle) for c in rep.components),
        gluing=sum(3 - n for n in rep.constraint_counts()),
        vchoices=sum(c.vchoices for c in rep.components),
        expected=rho_special(rep.params),
    )


def dimension_audit(rep: FamilyReport) -> DimensionAudit:
    a = audit_terms(rep)
    if not a.ok:
        raise CheckFailure("dimension-audit", f"{rep.params.triple}: total {a.total} != rho_L {a.expected}", a.as_dict())
    return a


# ---------------------------------------------------------------------------
# stability


@dataclass(frozen=True)
class StabilityVerdict:
    semistable: bool
    stable_status: str  # Stable, SemistableOnly or SpecialCase
    surviving_chain: tuple[str, ...]

    def as_dict(self) -> dict:
        return {"semistable": self.semistable, "stable_status": self.stable_status}


ANY = "*"


def _destabilizers(E: BundleLabel):
    """Weakly destabilizing line subbundles, by the name of their fiber lines."""
    if isinstance(E, Dec) and E.isomorphic:
        return ANY
    if isinstance(E, (Dec, Generic)):
        return frozenset({"O", "L"})
    if isinstance(E, EI):
        return frozenset({"O"})
    return frozenset()


def destabilizing_chain(rep: FamilyReport):
    """Follow equal-slope line subbundles along the chain for a general gluing.

    Returns the set of surviving fiber-line names at the last node (empty when
    no chain reaches the end, which is the stability criterion).
    """
    state = ANY
    fresh = 0
    for n, comp in enumerate(rep.components):
        D = _destabilizers(comp.bundle)
        if D == ANY:
            if state != ANY:
                # a line at P extends uniquely; named summand lines keep their name
                names = set()
                for s in state:
                    if s in ("O", "L"):
                        names.add(s)
                    else:
                        fresh += 1
                        names.add(f"gen{fresh}")
                state = frozenset(names)
        else:
            state = D if state == ANY else frozenset(s for s in state if s in D)
        if not state:
            return frozenset()
        if n < len(rep.gluings):
            if state == ANY:
                continue
            rule = dict(rep.gluings[n])
            names = set()
            for s in state:
                if s in rule:
                    names.add(rule[s])
                else:
                    fresh += 1
                    names.add(f"gen{fresh}")
            state = frozenset(names)
    return state


def stability_check(rep: FamilyReport) -> StabilityVerdict:
    semi = all(is_semistable(c.bundle) for c in rep.components)
    chain = destabilizing_chain(rep)
    if not chain:
        status = "Stable"
    elif rep.params.triple in SPECIAL_CASES:
        status = "SpecialCase"
    else:
        status = "SemistableOnly"
    names = ("*",) if chain == ANY else tuple(sorted(chain))
    return StabilityVerdict(semi, status, names)


# ---------------------------------------------------------------------------
# the four worked examples

EXAMPLES = (
    ("EE", 8, 12, 4),
    ("EO", 7, 12, 5),
    ("OE", 7, 11, 4),
    ("OO", 10, 17, 5),
)


def example_name(case: str, g: int, d: int, k: int) -> str:
    return f"{case.lower()}_{g}_{d}_{k}"


def emit_appendix_tables() -> dict[str, str]:
    return {example_name(*ex): build_family(*ex).render() for ex in EXAMPLES}


def family_report_dict(rep: FamilyReport) -> dict:
    return {
        "case": rep.case,
        "g": rep.params.g,
        "d": rep.params.d,
        "k": rep.params.k,
        "b": rep.table.b,
        "multidegree": list(rep.curve.multidegree),
        "sequences": [list(s) for s in rep.table.sequences],
        "rows": rep.table.render(),
        "components": [
            {
                "index": c.index,
                "role": c.role.kind,
                "bundle": c.bundle.render(),
                "sections": [
                    {"kind": pc.kind, "spaces": [list(s) for s in pc.spaces], "dim": pc.dim, "params": pc.params}
                    for pc in c.pieces
                ],
                "flags": list(c.flags),
            }
            for c in rep.components
        ],
        "gluing": [
            {"edge": i + 1, "constraints": len(x), "matched": [f"{s}|Q -> {t}|P" for s, t in x]}
            for i, x in enumerate(rep.gluings)
        ],
        "chain_adaptable": rep.chain_adaptable,
        "audit": audit_terms(rep).as_dict(),
        "stability": stability_check(rep).as_dict(),
    }
