"""Command-line entry point.

Exit codes: 0 on success, 1 when a mathematical check fails (the output
names the check by tag), 2 on invalid input. Output is deterministic for a
fixed request and seed; JSON keys are sorted.
"""

from __future__ import annotations

import argparse
import difflib
import os
import sys
import warnings
from importlib import resources
from pathlib import Path

from . import __version__
from . import exact as X
from . import io
from .chain_graph import build_linked_graph, distance, minimal_path, tree_distance
from .dimensions import BNParams, RangeWarning, dims_report, parameter_grid
from .errors import BoundedSearchError, CheckFailure, LinkSympError, PreconditionError, ValidationError
from .families import (
    EXAMPLES,
    audit_terms,
    build_family,
    dimension_audit,
    emit_appendix_tables,
    example_name,
    family_report_dict,
    stability_check,
)
from .forms import ALTERNATING, BILINEAR, check_compatibility, form_module_basis
from .grassmannian import lag_local_verdict
from .instances import certificate_instances
from .prelinked import NotSimple, SimplicityCertificate, check_prelinked, is_simple

GOLDEN_VERSION = "v1"


class _Fail(Exception):
    """A check failed; ``payload`` has already been written."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 itself; keep the message terse
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    raw = os.environ.get("LINKSYMP_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"LINKSYMP_SEED must be an integer, got {raw!r}") from None


def golden_dir() -> Path:
    return Path(str(resources.files("linksymp") / "golden" / GOLDEN_VERSION))


def _read_input(args) -> dict:
    if args.json is not None:
        return io.load_json(args.json)
    if args.input is None:
        raise ValidationError("give --input PATH or --json TEXT")
    src = sys.stdin.read() if args.input == "-" else _read_file(args.input)
    return io.load_json(src)


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc


def _tsv(rows: list[dict]) -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    out = ["\t".join(keys)]
    for r in rows:
        out.append("\t".join(_cell(r[k]) for k in keys))
    return "\n".join(out) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (list, tuple)):
        return ",".join(_cell(x) for x in v)
    return str(io.to_jsonable(v))


def _table(d: dict, indent: str = "") -> str:
    lines = []
    for k in sorted(d):
        v = d[k]
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_table(v, indent + "  ").rstrip("\n"))
        else:
            lines.append(f"{indent}{k}: {_cell(v)}")
    return "\n".join(lines) + "\n"


def _emit(args, obj, rows: list[dict] | None = None, text: str | None = None) -> None:
    fmt = args.format
    if fmt == "json":
        sys.stdout.write(io.dumps(obj))
    elif fmt == "tsv":
        sys.stdout.write(_tsv(rows if rows is not None else [_flat(obj)]))
    else:
        sys.stdout.write(text if text is not None else _table(obj))


def _flat(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flat(v, f"{prefix}{k}."))
        else:
            out[f"{prefix}{k}"] = v
    return out


def _fail(args, tag: str, message: str, detail=None) -> None:
    obj = {"ok": False, "check": tag, "message": message}
    if detail is not None:
        obj["detail"] = detail
    _emit(args, obj, text=f"FAIL [{tag}] {message}\n")
    raise _Fail


# ---------------------------------------------------------------------------
# subcommands


def cmd_graph(args) -> None:
    G = build_linked_graph(io.read_degree_data(_read_input(args)))
    obj = io.graph_dict(G)
    obj["diameter"] = G.diameter
    rows = [{"vertex": w} for w in G.vertices]
    text = "".join(f"{w}\n" for w in G.vertices) + "".join(
        f"{e.tail} -[{e.label}]-> {e.head}\n" for e in G.edges
    )
    _emit(args, obj, rows, text)


def cmd_dist(args) -> None:
    data = io.read_degree_data(_read_input(args))
    w = tuple(X.q(x) for x in args.source.split(","))
    w2 = tuple(X.q(x) for x in args.target.split(","))
    n = distance(data, w, w2, cap=args.cap)
    obj = {"from": list(w), "to": list(w2), "distance": n, "closed_form": tree_distance(data, w, w2)}
    if all(x.denominator == 1 for x in w + w2):
        G = build_linked_graph(data)
        if tuple(int(x) for x in w) in G and tuple(int(x) for x in w2) in G:
            P = minimal_path(G, tuple(int(x) for x in w), tuple(int(x) for x in w2))
            obj["twists"] = [e.label for e in P.edges]
    _emit(args, obj, text=f"{n}\n")


def cmd_prelinked(args) -> None:
    obj = _read_input(args)
    D = io.read_diagram(obj)
    rep = check_prelinked(D, max_length=args.max_length)
    out = {
        "prelinked": rep.ok,
        "max_length": rep.max_length,
        "violations": [
            {"start": list(v.start), "end": list(v.end), "path": list(v.path), "reason": v.reason}
            for v in rep.violations
        ],
    }
    if not rep.ok:
        v = rep.violations[0]
        _fail(args, "prelinked", f"paths from {v.start} to {v.end}: {v.reason}", out)
    if args.simple:
        cert = is_simple(D, seed=args.seed)
        out["simple"] = _cert_dict(cert)
    _emit(args, out)


def _cert_dict(cert) -> dict:
    if isinstance(cert, SimplicityCertificate):
        return {"verdict": "simple", "r": cert.r, "witnesses": [list(w) for w in cert.witness_vertices()], "method": cert.method}
    if isinstance(cert, NotSimple):
        return {"verdict": "not-simple", "reason": cert.reason}
    return {"verdict": "indeterminate", "reason": cert.reason}


def cmd_forms(args) -> None:
    obj = _read_input(args)
    D = io.read_diagram(obj)
    m = obj.get("m", args.m.split(",") if args.m else None)
    if m is None:
        raise ValidationError("give m in the input or with --m")
    kind = obj.get("kind", args.kind)
    if kind not in (BILINEAR, ALTERNATING):
        raise ValidationError(f"unknown form kind {kind!r}")
    try:
        basis = form_module_basis(D, [X.q(x) for x in m], kind)
    except PreconditionError as exc:
        _fail(args, exc.hypothesis or "precondition", str(exc))
    _emit(args, {"kind": kind, "m": [X.q(x) for x in m], "dimension": basis.dimension, "rank": D.rank})


def cmd_lag(args) -> None:
    rows = []
    for inst in certificate_instances(args.count, args.seed):
        v = lag_local_verdict(inst.F, inst.form, inst.D, inst.m)
        c = lag_local_verdict(inst.F, inst.control, inst.D, inst.m)
        rows.append(
            {
                "instance": inst.name,
                "equations": v.equations,
                "rank": v.rank,
                "surjective": v.smooth_of_expected_codim,
                "control_rank": c.rank,
                "control_surjective": c.smooth_of_expected_codim,
            }
        )
    bad = [r["instance"] for r in rows if not r["surjective"] or r["control_surjective"]]
    text = "".join(
        f"{r['instance']}\tform rank {r['rank']}/{r['equations']}\tcontrol rank {r['control_rank']}\n" for r in rows
    )
    _emit(args, {"instances": rows}, rows, text)
    if bad:
        sys.stderr.write(f"tangent certificate failed on {', '.join(bad)}\n")
        raise _Fail


def cmd_dims(args) -> None:
    if args.grid is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RangeWarning)
            rows = [_dims_row(p) for p in parameter_grid(args.grid, args.kmax)]
        _emit(args, {"rows": rows}, rows, _tsv(rows))
        return
    if None in (args.g, args.d, args.k):
        raise ValidationError("dims needs --g, --d and --k, or --grid GMAX")
    p = BNParams(args.g, args.d, args.k)
    for msg in p.range_problems():
        sys.stderr.write(f"warning: {p.triple}: {msg}\n")
    _emit(args, dims_report(p))


def _dims_row(p: BNParams) -> dict:
    r = dims_report(p)
    return {
        "g": p.g,
        "d": p.d,
        "k": p.k,
        "case": p.case,
        "rho": r["rho"],
        "rho_L": r["rho_L"],
        "main_holds": r["main_inequality"]["holds"],
        "case_holds": r["case_inequality"]["holds"],
        "semistable_only": r["semistable_only_exception"],
        "special": r["special_case"],
    }


def cmd_family(args) -> None:
    rep = build_family(args.case, args.g, args.d, args.k)
    audit = dimension_audit(rep)
    obj = family_report_dict(rep)
    obj["audit"] = audit.as_dict()
    obj["stability"] = stability_check(rep).as_dict()
    _emit(args, obj, text=rep.render())


def cmd_appendix(args) -> None:
    tables = emit_appendix_tables()
    if args.format == "json":
        _emit(args, {name: text.splitlines() for name, text in tables.items()})
        return
    parts = [f"# {name}\n{text}" for name, text in tables.items()]
    sys.stdout.write("\n".join(parts))


def cmd_audit(args) -> None:
    rows = []
    failures = []
    for p in parameter_grid(args.gmax, args.kmax):
        if p.d < 0 or not dims_report(p)["case_inequality"]["holds"]:
            continue
        rep = build_family(p.case, p.g, p.d, p.k)
        a = audit_terms(rep)
        st = stability_check(rep)
        row = {"g": p.g, "d": p.d, "k": p.k, "case": p.case, **a.as_dict(), "ok": a.ok, "stability": st.stable_status}
        rows.append(row)
        if not a.ok:
            failures.append(p.triple)
    _emit(args, {"rows": rows, "failures": [list(t) for t in failures]}, rows, _tsv(rows))
    if failures:
        sys.stderr.write(f"[dimension-audit] mismatch at {failures}\n")
        raise _Fail


def cmd_verify(args) -> None:
    if args.golden:
        _verify_golden(args)
        return
    obj = _read_input(args)
    D = io.read_diagram(obj["diagram"] if "diagram" in obj else obj)
    rep = check_prelinked(D)
    if not rep.ok:
        v = rep.violations[0]
        _fail(args, "prelinked", f"paths from {v.start} to {v.end}: {v.reason}")
    if "form" not in obj:
        _emit(args, {"ok": True, "checked": ["prelinked"]}, text="OK prelinked\n")
        return
    F = io.read_form(obj["form"], D)
    rep = check_compatibility(F, D, additivity_samples=args.samples, seed=args.seed)
    if not rep.ok:
        if rep.violations:
            v = rep.violations[0]
            e = D.graph.edges[v.edge]
            pair = [list(v.w), list(v.w2)]
            msg = f"pair {tuple(v.w)}, {tuple(v.w2)} along edge {e.tail} -> {e.head} (side {v.side}, s-exponent {v.delta})"
            detail = {
                "pair": pair,
                "edge": {"tail": list(e.tail), "head": list(e.head), "label": e.label},
                "side": v.side,
                "exponent": v.delta,
                "violations": len(rep.violations),
            }
        else:
            msg = f"{rep.additivity_failures} of {rep.additivity_checked} path pairs break additivity"
            detail = None
        _fail(args, "linked-form-compatibility", msg, detail)
    _emit(args, {"ok": True, "checked": ["prelinked", "linked-form-compatibility"]}, text="OK linked form\n")


def _verify_golden(args) -> None:
    root = Path(args.golden_dir) if args.golden_dir else golden_dir()
    fresh = emit_appendix_tables()
    diffs = {}
    for case, g, d, k in EXAMPLES:
        name = example_name(case, g, d, k)
        path = root / f"{name}.txt"
        if not path.exists():
            raise ValidationError(f"missing golden file {path}")
        old = path.read_text()
        if old != fresh[name]:
            diffs[name] = "".join(
                difflib.unified_diff(old.splitlines(True), fresh[name].splitlines(True), f"golden/{name}", f"fresh/{name}")
            )
    if diffs:
        _fail(args, "golden-tables", f"{len(diffs)} table(s) differ: {', '.join(sorted(diffs))}", diffs)
    _emit(args, {"ok": True, "checked": sorted(fresh)}, text=f"OK {len(fresh)} golden tables\n")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table", "tsv"), default=None)
    common.add_argument("--seed", type=int, default=None, help="defaults to $LINKSYMP_SEED or 0")

    inp = argparse.ArgumentParser(add_help=False)
    inp.add_argument("--input", "-i", help="JSON file, or - for stdin")
    inp.add_argument("--json", help="inline JSON")

    ap = _Parser(prog="linksymp", description="Linked Grassmannian and chain-curve computations.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("graph", parents=[common, inp], help="vertices and edges of G")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("dist", parents=[common, inp], help="twist distance between two multidegrees")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--cap", type=int, default=10**6)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("prelinked", parents=[common, inp], help="check the prelinked axioms")
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--simple", action="store_true", help="also search for a simplicity certificate")
    p.set_defaults(func=cmd_prelinked)

    p = sub.add_parser("forms", parents=[common, inp], help="dimension of the module of linked forms")
    p.add_argument("--m")
    p.add_argument("--kind", default=BILINEAR)
    p.set_defaults(func=cmd_forms)

    p = sub.add_parser("lag", parents=[common], help="tangent certificates on seeded instances")
    p.add_argument("--count", type=int, default=24)
    p.set_defaults(func=cmd_lag)

    p = sub.add_parser("dims", parents=[common], help="dimension counts and inequalities")
    p.add_argument("--g", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--grid", type=int, metavar="GMAX")
    p.add_argument("--kmax", type=int, default=8)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("family", parents=[common], help="one explicit family on a chain")
    p.add_argument("--case", required=True, type=str.upper, choices=("EE", "EO", "OE", "OO"))
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("appendix", parents=[common], help="the four worked tables")
    p.set_defaults(func=cmd_appendix)

    p = sub.add_parser("audit", parents=[common], help="sweep the dimension audit over a grid")
    p.add_argument("--gmax", type=int, default=20)
    p.add_argument("--kmax", type=int, default=8)
    p.set_defaults(func=cmd_audit, default_format="tsv")

    p = sub.add_parser("verify", parents=[common, inp], help="check a diagram/form file or the golden tables")
    p.add_argument("--golden", action="store_true")
    p.add_argument("--golden-dir")
    p.add_argument("--samples", type=int, default=0, help="additivity samples")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.seed is None:
            args.seed = default_seed()
        if args.format is None:
            args.format = getattr(args, "default_format", "json")
        args.func(args)
    except _Fail:
        return 1
    except CheckFailure as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except (ValidationError, KeyError, TypeError) as exc:
        msg = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        sys.stderr.write(f"error: {msg}\n")
        return 2
    except (BoundedSearchError, PreconditionError, LinkSympError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
