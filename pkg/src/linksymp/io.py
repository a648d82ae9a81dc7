"""JSON readers and writers for the command line.

Rationals are written as integers or ``"p/q"`` strings and read back with
the same convention. Every reader raises ``ValidationError`` on malformed
input so the CLI can map it to exit code 2.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import exact as X
from .chain_graph import LinkedGraph, TreeDegreeData, TreeGraph, build_linked_graph
from .errors import ValidationError
from .forms import LinkedForm
from .grassmannian import LinkedSubbundle
from .prelinked import PrelinkedDiagram


def load_json(text: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValidationError("top-level JSON value must be an object")
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def to_jsonable(obj: Any):
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else X.fmt(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def _need(obj: dict, key: str):
    if key not in obj:
        raise ValidationError(f"missing field {key!r}")
    return obj[key]


def _int_list(x, what: str) -> tuple[int, ...]:
    if not isinstance(x, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        raise ValidationError(f"{what} must be a list of integers")
    return tuple(x)


def _rational(x, what: str) -> Fraction:
    try:
        return X.q(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{what}: {exc}") from exc


def _matrix(x, rows: int, cols: int, what: str) -> X.Matrix:
    if not isinstance(x, list) or len(x) != rows:
        raise ValidationError(f"{what} must have {rows} rows")
    out = []
    for row in x:
        if not isinstance(row, list) or len(row) != cols:
            raise ValidationError(f"{what} must have {cols} columns")
        out.append(tuple(_rational(v, what) for v in row))
    return tuple(out)


# ---------------------------------------------------------------------------
# graph


def read_degree_data(obj: dict) -> TreeDegreeData:
    """``{"d": 2, "b": 2, "d_v": [3, 3]}`` plus optional ``vertices``/``edges`` (default: a chain)."""
    d_v = _int_list(_need(obj, "d_v"), "d_v")
    d, b = _need(obj, "d"), _need(obj, "b")
    if not isinstance(d, int) or not isinstance(b, int):
        raise ValidationError("d and b must be integers")
    if b < 0:
        raise ValidationError("b must be nonnegative")
    if "vertices" in obj or "edges" in obj:
        verts = tuple(_need(obj, "vertices"))
        edges = tuple(tuple(e) for e in _need(obj, "edges"))
        tree = TreeGraph(verts, edges)
    else:
        tree = TreeGraph.chain(len(d_v))
    return TreeDegreeData(tree, d, b, d_v)


def graph_dict(G: LinkedGraph) -> dict:
    return {
        "tree": {"vertices": list(G.data.tree.vertices), "edges": [list(e) for e in G.data.tree.edges]},
        "d": G.data.d,
        "b": G.data.b,
        "d_v": list(G.data.d_v),
        "vertices": [list(w) for w in G.vertices],
        "edges": [{"tail": list(e.tail), "head": list(e.head), "label": e.label} for e in G.edges],
    }


def read_multidegree(x, what: str = "multidegree") -> tuple[int, ...]:
    if isinstance(x, str):
        try:
            return tuple(int(v) for v in x.split(","))
        except ValueError as exc:
            raise ValidationError(f"{what}: expected comma-separated integers") from exc
    return _int_list(x, what)


# ---------------------------------------------------------------------------
# diagrams and forms


def read_diagram(obj: dict) -> PrelinkedDiagram:
    """Graph fields plus ``s``, ``dims`` and ``maps``: a list of {"tail", "head", "matrix"}."""
    G = build_linked_graph(read_degree_data(obj))
    s = _rational(obj.get("s", 0), "s")
    dims = _int_list(_need(obj, "dims"), "dims")
    if len(dims) != len(G.vertices):
        raise ValidationError(f"dims needs {len(G.vertices)} entries, one per vertex of G in sorted order")
    by_pair = {}
    for item in _need(obj, "maps"):
        key = (read_multidegree(_need(item, "tail"), "tail"), read_multidegree(_need(item, "head"), "head"))
        by_pair[key] = _need(item, "matrix")
    maps = []
    for e in G.edges:
        if (e.tail, e.head) not in by_pair:
            raise ValidationError(f"no map given for edge {e.tail} -> {e.head}")
        maps.append(_matrix(by_pair.pop((e.tail, e.head)), dims[G.index[e.head]], dims[G.index[e.tail]], "map"))
    if by_pair:
        raise ValidationError(f"maps given for non-edges: {sorted(by_pair)}")
    return PrelinkedDiagram(G, s, dims, tuple(maps))


def diagram_dict(D: PrelinkedDiagram) -> dict:
    out = graph_dict(D.graph)
    del out["vertices"], out["edges"], out["tree"]
    if D.graph.data.tree.vertices != TreeGraph.chain(len(D.graph.data.tree)).vertices:
        out["vertices"] = list(D.graph.data.tree.vertices)
        out["edges"] = [list(e) for e in D.graph.data.tree.edges]
    out["s"] = D.s
    out["dims"] = list(D.dims)
    out["maps"] = [
        {"tail": list(e.tail), "head": list(e.head), "matrix": [list(r) for r in M]} for e, M in zip(D.graph.edges, D.maps)
    ]
    return out


def read_form(obj: dict, D: PrelinkedDiagram) -> LinkedForm:
    """``{"m": [...], "pairings": [[B_00, B_01, ...], ...]}`` in vertex order."""
    n = len(D.graph.vertices)
    m = tuple(_rational(x, "m") for x in _need(obj, "m"))
    if len(m) != len(D.graph.data.tree):
        raise ValidationError("m needs one entry per tree vertex")
    rows = _need(obj, "pairings")
    if not isinstance(rows, list) or len(rows) != n:
        raise ValidationError(f"pairings must be a {n}x{n} array of blocks")
    blocks = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"pairings must be a {n}x{n} array of blocks")
        blocks.append(tuple(_matrix(B, D.dims[i], D.dims[j], f"pairing ({i},{j})") for j, B in enumerate(row)))
    return LinkedForm(m, tuple(blocks))


def form_dict(F: LinkedForm) -> dict:
    return {"m": list(F.m), "pairings": [[[list(r) for r in B] for B in row] for row in F.pairings]}


def read_subbundle(obj: dict, D: PrelinkedDiagram) -> LinkedSubbundle:
    """``{"rank": r, "bases": [t_w x r matrices in vertex order]}``."""
    r = _need(obj, "rank")
    bases = _need(obj, "bases")
    if not isinstance(bases, list) or len(bases) != len(D.dims):
        raise ValidationError("one basis per vertex of G is required")
    return LinkedSubbundle(r, tuple(_matrix(B, t, r, "basis") for B, t in zip(bases, D.dims)))


def subbundle_dict(F: LinkedSubbundle) -> dict:
    return {"rank": F.rank, "bases": [[list(r) for r in B] for B in F.subspaces]}
