"""Linked subbundles, isotropy and the tangent-map certificate.

Tangent vectors at a simple point F are tuples of matrices ``phi_w`` of
shape ``(t - r) x r_w``: the image of the j-th basis vector of W_w in
E_w/F_w, written against a complement basis K_w of F_w.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping

from . import exact as X
from .errors import PreconditionError, ValidationError
from .forms import ALTERNATING, LinkedForm, extend_from_restriction, is_alternating, is_internally_symplectic
from .prelinked import (
    PrelinkedDiagram,
    SimplicityCertificate,
    WDecomposition,
    is_internally_simple,
    is_simple,
    w_decomposition,
)


@dataclass(frozen=True)
class LinkedSubbundle:
    rank: int
    subspaces: tuple[X.Matrix, ...]  # t_w x r column basis per vertex of G

    def basis(self, D: PrelinkedDiagram, w) -> X.Matrix:
        return self.subspaces[D.graph.index[tuple(w)]]


def subbundle(D: PrelinkedDiagram, bases: Mapping) -> LinkedSubbundle:
    subs = tuple(X.mat(bases[w]) for w in D.graph.vertices)
    r = len(subs[0][0]) if subs and subs[0] and subs[0][0] else 0
    return LinkedSubbundle(r, subs)


def _cols(B: X.Matrix) -> int:
    return len(B[0]) if B and B[0] else 0


def is_linked_subbundle(F: LinkedSubbundle, D: PrelinkedDiagram) -> bool:
    for B, t in zip(F.subspaces, D.dims):
        if len(B) != t:
            return False
        if _cols(B) != F.rank or (F.rank and X.rank(B) != F.rank):
            return False
    for e in D.graph.edges:
        Bt, Bh = F.basis(D, e.tail), F.basis(D, e.head)
        if not F.rank:
            continue
        img = X.matmul(D.f(e), Bt)
        if not X.subspace_contains(Bh, img, D.dim(e.head)):
            return False
    return True


def restricted_diagram(F: LinkedSubbundle, D: PrelinkedDiagram) -> PrelinkedDiagram:
    """The induced prelinked diagram on F, in the coordinates of the chosen bases."""
    if not is_linked_subbundle(F, D):
        raise ValidationError("not a linked subbundle")
    maps = []
    for e in D.graph.edges:
        Bt, Bh = F.basis(D, e.tail), F.basis(D, e.head)
        if not F.rank:
            maps.append(())
            continue
        M = X.solve_matrix(Bh, X.matmul(D.f(e), Bt), F.rank)
        maps.append(M)
    return PrelinkedDiagram(D.graph, D.s, (F.rank,) * len(D.graph.vertices), tuple(maps))


def is_isotropic(F: LinkedSubbundle, form: LinkedForm, D: PrelinkedDiagram) -> bool:
    if not F.rank:
        return True
    G = D.graph
    for w in G.vertices:
        Bw = X.transpose(F.basis(D, w))
        for w2 in G.vertices:
            if not X.is_zero(X.matmul(X.matmul(Bw, form.block(G, w, w2)), F.basis(D, w2))):
                return False
    return True


def lg_tangent_dimension(F: LinkedSubbundle, D: PrelinkedDiagram, cert=None) -> int:
    DF = restricted_diagram(F, D)
    cert = is_simple(DF) if cert is None else cert
    if not isinstance(cert, SimplicityCertificate):
        raise PreconditionError("the subbundle is not a simple point", "simple")
    t = D.rank
    r = F.rank
    ranks = w_decomposition(cert, DF).ranks
    total = sum(k * (t - r) for k in ranks.values())
    if total != r * (t - r):
        raise ValidationError(f"tangent dimension {total} differs from r(t-r) = {r * (t - r)}")
    return total


# ---------------------------------------------------------------------------
# the induced form on tangent vectors


@dataclass(frozen=True)
class TangentContext:
    """Everything needed to evaluate the tangent map at one point."""

    D: PrelinkedDiagram
    F: LinkedSubbundle
    form: LinkedForm
    DF: PrelinkedDiagram
    wdec: WDecomposition  # in F-coordinates
    complements: dict  # w -> t x (t - r)

    @property
    def domain_shape(self) -> list[tuple[tuple, int, int]]:
        """(w, rows, cols) of each phi_w block with r_w > 0."""
        t, r = self.D.rank, self.F.rank
        return [(w, t - r, k) for w, k in self.wdec.ranks.items() if k]


def tangent_context(
    F: LinkedSubbundle,
    form: LinkedForm,
    D: PrelinkedDiagram,
    m=None,
    cert=None,
    complements: Mapping | None = None,
) -> TangentContext:
    """Validate the hypotheses of the tangent construction and fix its choices."""
    m = form.m if m is None else tuple(X.q(x) for x in m)
    if not is_alternating(form):
        raise PreconditionError("the form is not alternating", "alternating")
    if not is_linked_subbundle(F, D):
        raise PreconditionError("F is not a linked subbundle", "linked-subbundle")
    if not is_isotropic(F, form, D):
        raise PreconditionError("F is not isotropic for the form", "isotropic")
    DF = restricted_diagram(F, D)
    if cert is None:
        cert = is_internally_simple(DF, m)
    if not isinstance(cert, SimplicityCertificate):
        raise PreconditionError("F is not internally simple relative to m", "internally-simple")
    wdec = w_decomposition(cert, DF)
    if complements is None:
        complements = {w: X.complement_basis(F.basis(D, w), D.dim(w)) for w in D.graph.vertices}
    for w in D.graph.vertices:
        full = X.hstack([F.basis(D, w), complements[w]], D.dim(w))
        if _cols(full) != D.dim(w) or X.det(full) == 0:
            raise ValidationError(f"complement at {w} does not complete F_w to a basis")
    return TangentContext(D, F, form, DF, wdec, dict(complements))


def induced_pairing(ctx: TangentContext, phi: Mapping) -> X.Matrix:
    """The alternating r x r matrix on the W-sum induced by ``phi``."""
    D, G = ctx.D, ctx.D.graph
    basis = ctx.wdec.ordered_basis()  # (w, coordinates in F_w)
    vecs = []  # actual vectors in E_w and their tangent images
    counters: dict = {}
    for w, coords in basis:
        j = counters.get(w, 0)
        counters[w] = j + 1
        v = X.matvec(ctx.F.basis(D, w), coords)
        P = phi.get(w)
        if P is None:
            tv = (Fraction(0),) * D.dim(w)
        else:
            col = tuple(row[j] for row in P)
            tv = X.matvec(ctx.complements[w], col)
        vecs.append((w, v, tv))
    r = len(vecs)
    out = []
    for i in range(r):
        wi, vi, ti = vecs[i]
        row = []
        for j in range(r):
            wj, vj, tj = vecs[j]
            B = ctx.form.block(G, wi, wj)
            row.append(_pair(ti, B, vj) + _pair(vi, B, tj))
        out.append(tuple(row))
    return tuple(out)


def _pair(x, B, y) -> Fraction:
    return sum((x[a] * B[a][b] * y[b] for a in range(len(x)) if x[a] for b in range(len(y)) if y[b]), Fraction(0))


def induced_form(ctx: TangentContext, phi: Mapping) -> LinkedForm:
    """The linked alternating form on F attached to a tangent vector."""
    Xw = induced_pairing(ctx, phi)
    return extend_from_restriction(ctx.DF, ctx.wdec, Xw, ctx.form.m, ALTERNATING)


@dataclass(frozen=True)
class TangentRank:
    rank: int
    target_dim: int
    domain_dim: int

    @property
    def surjective(self) -> bool:
        return self.rank == self.target_dim


def tangent_map_rank(ctx: TangentContext) -> TangentRank:
    """Exact rank of phi -> induced form, read off the upper-triangular entries."""
    r = ctx.F.rank
    cols = []
    for w, rows, ncols in ctx.domain_shape:
        for a in range(rows):
            for b in range(ncols):
                phi = {w: tuple(tuple(Fraction(int(i == a and j == b)) for j in range(ncols)) for i in range(rows))}
                Xw = induced_pairing(ctx, phi)
                cols.append(tuple(Xw[i][j] for i in range(r) for j in range(i + 1, r)))
    target = comb(r, 2)
    M = X.from_columns(cols, target) if cols else ()
    rk = X.rank(M, len(cols)) if cols and target else 0
    return TangentRank(rk, target, len(cols))


@dataclass(frozen=True)
class LagVerdict:
    equations: int
    smooth_of_expected_codim: bool
    rank: int
    internally_symplectic: bool
    tangent_dim: int

    def as_dict(self) -> dict:
        return {
            "equations": self.equations,
            "smooth_of_expected_codim": self.smooth_of_expected_codim,
            "rank": self.rank,
            "internally_symplectic": self.internally_symplectic,
            "lg_tangent_dim": self.tangent_dim,
        }


def lag_local_verdict(F: LinkedSubbundle, form: LinkedForm, D: PrelinkedDiagram, m=None, cert=None) -> LagVerdict:
    """Equation count at a simple isotropic point plus the transversality certificate."""
    ctx = tangent_context(F, form, D, m, cert)
    tr = tangent_map_rank(ctx)
    symp = is_internally_symplectic(form, D)
    equations = comb(F.rank, 2)
    return LagVerdict(
        equations=equations,
        smooth_of_expected_codim=tr.surjective,
        rank=tr.rank,
        internally_symplectic=symp,
        tangent_dim=lg_tangent_dimension(F, D),
    )
