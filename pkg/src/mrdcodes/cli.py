"""Command-line interface.

Exit codes: 0 success or PASS, 1 failed verdict / FAIL / computation error,
2 usage or input error.  Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__
from . import io as mio
from .errors import MRDError, ParseError, ValidationError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# run manifests


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunManifest:
    argv: list[str]
    inputs: dict[str, str] = dc_field(default_factory=dict)
    moduli: dict[str, list[int]] = dc_field(default_factory=dict)
    workers: int = 1
    seconds: float = 0.0
    result_digest: str = ""
    state: dict | None = None

    def add_input(self, path):
        self.inputs[str(path)] = _digest(Path(path).read_bytes())

    def add_field(self, F):
        self.moduli[repr(F)] = list(F.modulus)

    def to_json(self) -> dict:
        out = {
            "argv": self.argv,
            "inputs": self.inputs,
            "library_version": __version__,
            "moduli": self.moduli,
            "workers": self.workers,
            "seconds": round(self.seconds, 3),
            "result_digest": self.result_digest,
        }
        if self.state is not None:
            out["state"] = self.state
        return out


class Context:
    def __init__(self, args, argv):
        self.args = args
        self.manifest = RunManifest(list(argv), workers=_workers(args))
        self.out_parts: list[str] = []

    def emit(self, obj):
        text = obj if isinstance(obj, str) else mio.dumps(obj)
        self.out_parts.append(text)
        sys.stdout.write(text)

    def code(self, path):
        self.manifest.add_input(path)
        C = mio.import_code(path)
        self.manifest.add_field(C.field)
        return C

    def table(self, path):
        self.manifest.add_input(path)
        return mio.import_table(path)


def _workers(args) -> int:
    w = getattr(args, "workers", None)
    if w is None:
        w = int(os.environ.get("MRD_WORKERS", "1") or 1)
    return max(1, int(w))


# ---------------------------------------------------------------------------
# construct


def cmd_construct(ctx: Context):
    a = ctx.args
    if a.kind == "gabidulin":
        from .gabidulin import GabidulinSpec, gabidulin_code

        spec = GabidulinSpec(a.q, a.m, a.n, a.k, tuple(a.points) if a.points else None, tuple(a.basis) if a.basis else None)
        C = gabidulin_code(spec)
    elif a.kind == "singer":
        from .gabidulin import singer_code

        C = singer_code(a.q, a.n)
    elif a.kind == "dickson":
        from .constructions import dickson_nearfield

        ctx.emit(mio.table_to_json(dickson_nearfield(a.q, a.n)))
        return 0
    elif a.kind == "exceptional-11":
        from .constructions import exceptional_nearfield_gl2_11

        C = exceptional_nearfield_gl2_11().code
    elif a.kind == "fixture":
        from .constructions import fixture, fixture_code

        if a.name == "sl25_generators":
            mats = fixture(a.name)
            ctx.emit({"field": mats[0].field.descriptor(), "matrices": [mio.matrix_to_json(M) for M in mats]})
            return 0
        C = fixture_code(a.name)
    elif a.kind == "semifield":
        from .classify import enumerate_semifields

        census = enumerate_semifields(a.p, a.n, isotopy=False)
        if not 0 <= a.index < len(census.classes):
            raise UsageError(f"index must be in [0, {len(census.classes)})")
        ctx.emit(mio.table_to_json(census.classes[a.index].quasifield))
        return 0
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(a.kind)
    ctx.manifest.add_field(C.field)
    ctx.emit(mio.code_to_json(C))
    return 0


# ---------------------------------------------------------------------------
# verify / invariants / dual


def cmd_verify(ctx: Context):
    from .code import is_additively_closed, is_linear_over, is_mrd

    a = ctx.args
    if a.property == "quasifield":
        from .algebra import check_quasifield

        v = check_quasifield(ctx.table(a.file))
        ctx.emit({"ok": v.ok, "axiom": v.axiom, "witness": v.witness})
        return 0 if v.ok else 1
    C = ctx.code(a.file)
    if a.property == "mrd":
        v = is_mrd(C)
        ctx.emit({"is_mrd": v.is_mrd, "k": v.k, "d": v.d, "reason": v.reason})
        return 0 if v.is_mrd else 1
    ok = is_additively_closed(C) if a.property == "additive" else is_linear_over(C, C.field)
    ctx.emit({a.property: ok})
    return 0 if ok else 1


def _code_invariants(C) -> dict:
    from .code import is_additively_closed, is_linear_over, is_mrd, min_distance, rank_distribution

    out = {"q": C.field.q, "m": C.m, "n": C.n, "size": len(C)}
    if len(C) > 1:
        out["min_distance"] = min_distance(C)
        v = is_mrd(C)
        out["is_mrd"] = v.is_mrd
        out["k"] = v.k
    out["additively_closed"] = is_additively_closed(C)
    out["linear"] = is_linear_over(C, C.field)
    if C.keys[0] == 0:
        out["rank_distribution"] = {str(r): c for r, c in sorted(rank_distribution(C).items())}
    return out


def _table_invariants(Q) -> dict:
    from .algebra import (
        center,
        check_quasifield,
        is_field,
        is_nearfield,
        is_semifield,
        kernel,
        nucleus_left,
        nucleus_middle,
        nucleus_right,
    )

    v = check_quasifield(Q)
    out = {"order": Q.order, "quasifield": v.ok}
    if not v.ok:
        out["failed_axiom"] = v.axiom
        return out
    out.update(semifield=is_semifield(Q), nearfield=is_nearfield(Q), field=is_field(Q), kernel=kernel(Q).order)
    if out["semifield"] or out["nearfield"]:
        out.update(
            nucleus_left=nucleus_left(Q).order,
            nucleus_middle=nucleus_middle(Q).order,
            nucleus_right=nucleus_right(Q).order,
            center=center(Q).order,
        )
    return out


def cmd_invariants(ctx: Context):
    path = ctx.args.file
    if ctx.args.table or _looks_like_table(path):
        ctx.emit(_table_invariants(ctx.table(path)))
    else:
        ctx.emit(_code_invariants(ctx.code(path)))
    return 0


def _looks_like_table(path) -> bool:
    d = mio.read_json(path)
    return isinstance(d, dict) and "table" in d


def cmd_dual(ctx: Context):
    from .code import dual

    ctx.emit(mio.code_to_json(dual(ctx.code(ctx.args.file))))
    return 0


# ---------------------------------------------------------------------------
# classify / equivalence / isotopy


def _witness_json(w):
    return None if w is None else w.to_json()


def cmd_equiv(ctx: Context):
    from .classify import are_equivalent

    a = ctx.args
    w = are_equivalent(ctx.code(a.a), ctx.code(a.b), a.mode)
    ctx.emit({"equivalent": w is not None, "witness": _witness_json(w)})
    return 0


def cmd_isotopy(ctx: Context):
    from .classify import are_isotopic

    a = ctx.args
    iso = are_isotopic(ctx.table(a.a), ctx.table(a.b))
    out = {"isotopic": iso is not None}
    if iso is not None:
        out["F"], out["G"], out["H"] = iso.F.tolist(), iso.G.tolist(), iso.H.tolist()
        out["verified"] = iso.verified
    ctx.emit(out)
    return 0


def _state_from_json(d, p, n):
    from .classify import SpreadsetSearch
    from .gf import gf

    if d is None:
        return None
    if d.get("p") != p or d.get("n") != n:
        raise ValidationError("resume state was written for other parameters")
    bases = [np.array(b, dtype=np.int64).reshape(-1, n, n) for b in d["bases"]]
    return SpreadsetSearch(gf(p), n, bases, 0, complete=False, resume_token=tuple(d["token"]))


def _state_to_json(partial, p, n) -> dict:
    return {"p": p, "n": n, "token": list(partial.resume_token), "bases": [b.tolist() for b in partial.bases]}


def cmd_classify(ctx: Context):
    from .classify import classify_codes, enumerate_semifields
    from .errors import BudgetExceeded

    a = ctx.args
    if a.what == "equiv":
        return cmd_equiv(ctx)
    if a.what == "isotopy":
        return cmd_isotopy(ctx)
    p, n = (a.p, a.n) if a.what == "semifields" else (a.q, a.n)
    resume = None
    if a.resume:
        ctx.manifest.add_input(a.resume)
        d = mio.read_json(a.resume)
        resume = _state_from_json(d.get("state", d), p, n)
    try:
        if a.what == "semifields":
            census = enumerate_semifields(p, n, budget=a.budget, resume=resume)
            ctx.emit(
                {
                    "raw_spreadsets": census.raw_count,
                    "isomorphism_classes": len(census.classes),
                    "proper": len(census.proper),
                    "isotopy_classes": len(census.isotopy_classes),
                    "proper_isotopy_classes": census.proper_isotopy_count,
                    "classes": [
                        {"field": c.is_field, "aut_order": c.aut_order, "isotopy_class": c.isotopy_class}
                        for c in census.classes
                    ],
                }
            )
        else:
            classes = classify_codes(a.q, a.n, a.d, a.mode, budget=a.budget, resume=resume)
            ctx.emit({"count": len(classes), "classes": [mio.code_to_json(c.code) for c in classes]})
    except BudgetExceeded as exc:
        partial = exc.partial
        ctx.manifest.state = _state_to_json(partial, p, n)
        ctx.emit({"complete": False, "resume_token": list(exc.resume_token), "found": len(partial.bases)})
        return 0
    return 0


# ---------------------------------------------------------------------------
# symmetric / algebra


def cmd_symmetric(ctx: Context):
    from .symmetric import find_invariant_form, knarr_subgroup, scaled_family_code

    a = ctx.args
    if a.action == "build":
        from .gf import gf

        E, K = gf(a.field[0] ** a.field[1]), gf(a.field[0])
        ctx.emit(mio.code_to_json(scaled_family_code(E, K)))
        return 0
    Q = ctx.table(a.file)
    if a.action == "knarr":
        r = knarr_subgroup(Q)
        ctx.emit({"proper": r.proper, "span_size": r.size})
        return 0
    from .algebra import kernel

    form = find_invariant_form(Q, kernel(Q))
    ctx.emit({"found": form is not None, "gram": None if form is None else form.gram.tolist()})
    return 0 if form is not None else 1


def cmd_algebra(ctx: Context):
    from .algebra import quasifield_from_code, right_representation

    a = ctx.args
    if a.action == "check":
        from .algebra import check_quasifield

        v = check_quasifield(ctx.table(a.file))
        ctx.emit({"ok": v.ok, "axiom": v.axiom, "witness": v.witness})
        return 0 if v.ok else 1
    if a.action == "invariants":
        ctx.emit(_table_invariants(ctx.table(a.file)))
        return 0
    if a.action == "to-code":
        ctx.emit(mio.code_to_json(right_representation(ctx.table(a.file)).code()))
        return 0
    from .code import normalize

    ctx.emit(mio.table_to_json(quasifield_from_code(normalize(ctx.code(a.file)))))
    return 0


# ---------------------------------------------------------------------------
# reproduce


def _claim_ex16():
    from .classify import are_equivalent, classify_codes, enumerate_semifields
    from .constructions import fixture
    from .gabidulin import singer_code

    census = enumerate_semifields(2, 4)
    classes = classify_codes(2, 4, 4, "additive")
    hits = [[are_equivalent(C, c.code, "additive") is not None for c in classes] for C in (fixture("code2"), fixture("code3"), singer_code(2, 4))]
    got = {
        "proper_semifields": len(census.proper),
        "proper_isotopy_classes": census.proper_isotopy_count,
        "code_classes": len(classes),
        "each_fixture_in_one_class": all(sum(h) == 1 for h in hits),
        "fixtures_in_distinct_classes": len({h.index(True) for h in hits if True in h}) == 3,
    }
    want = {"proper_semifields": 23, "proper_isotopy_classes": 2, "code_classes": 3, "each_fixture_in_one_class": True, "fixtures_in_distinct_classes": True}
    return got == want, got


def _claim_sec6_classes():
    from .classify import are_equivalent, classify_codes
    from .constructions import fixture_code

    G, C = fixture_code("sec6_G_basis"), fixture_code("sec6_C_basis")
    classes = classify_codes(3, 3, 2, "linear")
    got = {
        "G_equivalent_to_C": are_equivalent(G, C) is not None,
        "classes": len(classes),
        "G_class": [are_equivalent(G, c.code) is not None for c in classes],
        "C_class": [are_equivalent(C, c.code) is not None for c in classes],
    }
    ok = not got["G_equivalent_to_C"] and got["classes"] == 2 and sum(got["G_class"]) == 1 and sum(got["C_class"]) == 1
    return ok, got


def _claim_sec6_rankdist():
    from .code import rank_distribution
    from .constructions import fixture_code
    from .gabidulin import GabidulinSpec, gabidulin_code

    want = {0: 1, 2: 338, 3: 390}
    dC = dict(rank_distribution(fixture_code("sec6_C_basis")))
    dG = dict(rank_distribution(gabidulin_code(GabidulinSpec(3, 3, 3, 2))))
    return dC == want and dG == want, {"C": {str(k): v for k, v in dC.items()}, "gabidulin": {str(k): v for k, v in dG.items()}}


def _claim_sl25():
    from .code import is_additively_closed, is_mrd
    from .constructions import exceptional_nearfield_gl2_11, fixture, is_abelian
    from .gf import gf
    from .matgf import MatGF, mat_order

    ng = exceptional_nearfield_gl2_11()
    F = gf(11)
    A = fixture("sl25_generators")[0].a
    got = {
        "order": len(ng.group),
        "element_orders": sorted(ng.order_counts),
        "mrd_d": is_mrd(ng.code).d,
        "order_I_plus_A": mat_order(MatGF._wrap(F, (A + np.eye(2, dtype=np.int64)) % 11)),
        "additively_closed": is_additively_closed(ng.code),
        "abelian": is_abelian(F, ng.group),
    }
    want = {"order": 120, "element_orders": [1, 2, 3, 4, 5, 6, 10], "mrd_d": 2, "order_I_plus_A": 40, "additively_closed": False, "abelian": False}
    return got == want, got


def _claim_knarr16():
    from .algebra import kernel
    from .classify import enumerate_semifields
    from .symmetric import find_invariant_form, knarr_subgroup

    census = enumerate_semifields(2, 4, isotopy=False)
    rows = [(knarr_subgroup(c.quasifield).proper, find_invariant_form(c.quasifield, kernel(c.quasifield)) is not None) for c in census.classes]
    got = {"structures": len(rows), "agree": sum(a == b for a, b in rows), "with_form": sum(b for _, b in rows)}
    return got["agree"] == got["structures"] == 24, got


def _claim_dual27():
    from .algebra import right_representation
    from .classify import are_equivalent
    from .code import dual, is_mrd
    from .constructions import fixture_code, semifields_order_27

    codes = [right_representation(Q).code() for Q in semifields_order_27()]
    got = {}
    ok = True
    for name in ("sec6_G_basis", "sec6_C_basis"):
        D = dual(fixture_code(name))
        v = is_mrd(D)
        hits = [are_equivalent(D, c) is not None for c in codes]
        got[name] = {"dual_mrd": v.is_mrd, "dual_d": v.d, "semifield_matches": hits}
        ok &= v.is_mrd and v.d == 3 and sum(hits) == 1
    ok &= got["sec6_G_basis"]["semifield_matches"] != got["sec6_C_basis"]["semifield_matches"]
    return ok, got


CLAIMS = {
    "ex16-classes": _claim_ex16,
    "sec6-classes": _claim_sec6_classes,
    "sec6-rankdist": _claim_sec6_rankdist,
    "sl25": _claim_sl25,
    "knarr-16": _claim_knarr16,
    "dual-27": _claim_dual27,
}


def cmd_reproduce(ctx: Context):
    claim = ctx.args.claim
    ok, got = CLAIMS[claim]()
    ctx.emit({"claim": claim, "result": "PASS" if ok else "FAIL", "values": got})
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mrdcodes", description="Construct, verify and classify rank-metric MRD codes.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--workers", type=int, default=None, help="worker count (default: MRD_WORKERS or 1)")
    p.add_argument("--manifest", help="write a run manifest JSON to this path")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="build codes and structures")
    cs = c.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    g = cs.add_parser("gabidulin")
    for name in ("q", "m", "n", "k"):
        g.add_argument(f"--{name}", type=int, required=True)
    g.add_argument("--points", type=int, nargs="+")
    g.add_argument("--basis", type=int, nargs="+")
    s = cs.add_parser("singer")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    d = cs.add_parser("dickson")
    d.add_argument("--q", type=int, required=True)
    d.add_argument("--n", type=int, required=True)
    cs.add_parser("exceptional-11")
    f = cs.add_parser("fixture")
    f.add_argument("name", choices=["code2", "code3", "sec6_G_basis", "sec6_C_basis", "sl25_generators"])
    sf = cs.add_parser("semifield", help="one isomorphism class representative as a table")
    sf.add_argument("--p", type=int, required=True)
    sf.add_argument("--n", type=int, required=True)
    sf.add_argument("--index", type=int, default=0)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check a property of a code or table")
    v.add_argument("property", choices=["mrd", "additive", "linear", "quasifield"])
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    inv = sub.add_parser("invariants", help="rank distribution, distance, closure flags or nuclei")
    inv.add_argument("file")
    inv.add_argument("--table", action="store_true", help="treat the input as a multiplication table")
    inv.set_defaults(func=cmd_invariants)

    cl = sub.add_parser("classify", help="classification and equivalence searches")
    cls = cl.add_subparsers(dest="what", required=True, parser_class=_Parser)
    cc = cls.add_parser("codes")
    cc.add_argument("--q", type=int, required=True)
    cc.add_argument("--n", type=int, required=True)
    cc.add_argument("--d", type=int, required=True)
    cc.add_argument("--mode", choices=["linear", "additive"], default="linear")
    csf = cls.add_parser("semifields")
    csf.add_argument("--p", type=int, required=True)
    csf.add_argument("--n", type=int, required=True)
    for sp in (cc, csf):
        sp.add_argument("--budget", type=int, help="maximum search nodes before stopping with a resume state")
        sp.add_argument("--resume", help="manifest or state JSON from an interrupted run")
    ce = cls.add_parser("equiv")
    ce.add_argument("a")
    ce.add_argument("b")
    ce.add_argument("--mode", choices=["linear", "additive", "semilinear", "general"], default="linear")
    ci = cls.add_parser("isotopy")
    ci.add_argument("a")
    ci.add_argument("b")
    cl.set_defaults(func=cmd_classify)

    e = sub.add_parser("equiv", help="equivalence test between two codes")
    e.add_argument("a")
    e.add_argument("b")
    e.add_argument("--mode", choices=["linear", "additive", "semilinear", "general"], default="linear")
    e.set_defaults(func=cmd_equiv)

    it = sub.add_parser("isotopy", help="isotopy test between two tables")
    it.add_argument("a")
    it.add_argument("b")
    it.set_defaults(func=cmd_isotopy)

    du = sub.add_parser("dual", help="dual code under tr(AB^t)")
    du.add_argument("file")
    du.set_defaults(func=cmd_dual)

    sy = sub.add_parser("symmetric", help="invariant forms and symmetric codes")
    sys_ = sy.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ff = sys_.add_parser("find-form")
    ff.add_argument("file")
    kn = sys_.add_parser("knarr")
    kn.add_argument("file")
    sb = sys_.add_parser("build")
    sb.add_argument("--field", type=int, nargs=2, metavar=("q", "n"), required=True)
    sy.set_defaults(func=cmd_symmetric)

    al = sub.add_parser("algebra", help="quasifield tables")
    als = al.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("check", "invariants", "to-code", "from-code"):
        als.add_parser(name).add_argument("file")
    al.set_defaults(func=cmd_algebra)

    r = sub.add_parser("reproduce", help="run a named computation and compare with the expected values")
    r.add_argument("claim", choices=sorted(CLAIMS))
    r.set_defaults(func=cmd_reproduce)
    return p


def _error(kind: str, message: str, **extra) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _error("UsageError", str(exc), usage=parser.format_usage().strip())
        return 2
    ctx = Context(args, argv)
    start = time.perf_counter()
    try:
        code = args.func(ctx)
    except UsageError as exc:
        _error("UsageError", str(exc))
        return 2
    except (ParseError, ValidationError) as exc:
        extra = {"line": exc.line, "column": exc.column} if isinstance(exc, ParseError) else {}
        _error(type(exc).__name__, str(exc), **extra)
        return 2
    except (FileNotFoundError, IsADirectoryError) as exc:
        _error("UsageError", str(exc))
        return 2
    except MRDError as exc:
        _error(type(exc).__name__, str(exc))
        return 1
    ctx.manifest.seconds = time.perf_counter() - start
    ctx.manifest.result_digest = _digest("".join(ctx.out_parts).encode())
    if args.manifest:
        mio.write_text(args.manifest, mio.dumps(ctx.manifest.to_json()))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
