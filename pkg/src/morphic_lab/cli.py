"""Command-line front end: check, scan, triple, formats."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from . import groups as G
from .catalog import builtin_specs, describe_builtin, load_directory, resolve_source
from .errors import InputError, InternalConsistencyError, MorphicLabError
from .families import family_order
from .fplinalg import enumerate_maximal_subspaces
from .formats import FORMATS
from .iso import SEARCH_BUDGET
from .lattice import LATTICE_CAP
from .morphic import (
    EA_READINGS,
    all_maximal_isomorphic,
    extract_triple,
    images_properties,
    is_ea_morphic,
    is_morphic,
    is_self_dual,
    reverify,
)
from .triples import Triple, check_dim_bound, pair_index, search_triples, spread, verify_morphic_triple, zset

PREDICATES = ("morphic", "ea-morphic", "self-dual", "all-max-iso", "images")
SCAN_DEFAULT = ("morphic", "ea-morphic", "all-max-iso")


def dumps(obj, indent=None) -> str:
    return json.dumps(obj, sort_keys=True, indent=indent)


def _selected(choice: str | None, default=PREDICATES) -> tuple[str, ...]:
    if choice is None:
        return default
    return PREDICATES if choice == "all" else (choice,)


def run_predicates(g, preds, budget, cap, reading) -> list:
    out = []
    for name in preds:
        if name == "morphic":
            out.append(is_morphic(g, budget, cap))
        elif name == "ea-morphic":
            out.append(is_ea_morphic(g, reading, budget, cap))
        elif name == "self-dual":
            out.append(is_self_dual(g, budget, cap))
        elif name == "all-max-iso":
            out.append(all_maximal_isomorphic(g, budget, cap))
        elif name == "images":
            out.extend(images_properties(g, budget, cap))
    return out


def _reverified(g, report) -> bool:
    ok = reverify(g, report)
    if not ok:
        raise InternalConsistencyError(f"{report.predicate} witness for {g.name} does not re-verify")
    return ok


def _heisenberg_type(g) -> bool:
    p = g.prime
    return bool(p and p % 2 and g.order == p**3 and not g.is_abelian and G.exponent(g) == p)


# -- check ------------------------------------------------------------------------


def cmd_check(args) -> dict:
    g = resolve_source(args.source)
    reports = run_predicates(g, _selected(args.predicate), args.budget, args.cap, args.ea_reading)
    rows = []
    for r in reports:
        row = r.to_json()
        if args.verify and not r.verdict:
            row["reverified"] = _reverified(g, r)
        rows.append(row)
    return {"group": g.name, "order": g.order, "reports": rows, "version": __version__}


# -- scan -------------------------------------------------------------------------


def _triple_summary(g) -> dict:
    ex = extract_triple(g)
    return {
        "d": ex.d,
        "e": ex.e,
        "morphic_triple": ex.checks["morphic_triple"],
        "dim_bound": ex.checks["dim_bound"],
    }


def scan_row(job) -> dict:
    """One catalog row; errors are caught and reported in the row."""
    name, source, preds, budget, cap, reading, verify = job
    row = {"name": name, "source": source}
    try:
        g = resolve_source(source)
        g.name = name
        abel = g.is_abelian
        row.update(
            order=g.order,
            p=g.prime,
            d=G.min_generators(g) if g.is_p_group else None,
            abelian=abel,
            homocyclic=abel and G.is_homocyclic(g),
            heisenberg_type=_heisenberg_type(g),
        )
        verdicts = {}
        for r in run_predicates(g, preds, budget, cap, reading):
            key = r.predicate.replace("-existential", "")
            verdicts[key] = r.verdict
            if verify and not r.verdict:
                _reverified(g, r)
        row["verdicts"] = verdicts
        if verify:
            row["reverified"] = True
        row["triple"] = None
        if not abel and verdicts.get("ea-morphic"):
            row["triple"] = _triple_summary(g)
    except MorphicLabError as exc:
        row["error"] = exc.to_json()
    return row


def summarize(rows: list[dict], preds) -> dict:
    ok = [r for r in rows if "error" not in r]
    errors = [{"name": r["name"], "source": r["source"], **r["error"]} for r in rows if "error" in r]
    summary = {"groups": len(rows), "scanned": len(ok), "errors": errors}
    counts = {}
    for r in ok:
        for k, v in r["verdicts"].items():
            counts[k] = counts.get(k, 0) + int(v)
    summary["true_counts"] = dict(sorted(counts.items()))
    summary["nonabelian"] = sum(not r["abelian"] for r in ok)

    if "morphic" in preds:
        bad = []
        for r in ok:
            expected = r["homocyclic"] or r["heisenberg_type"]
            if r["verdicts"]["morphic"] != expected:
                bad.append({"name": r["name"], "morphic": r["verdicts"]["morphic"], "expected": expected})
        summary["classification"] = {"holds": not bad, "discrepancies": bad}
    if "ea-morphic" in preds:
        eam = [r for r in ok if not r["abelian"] and r["verdicts"]["ea-morphic"]]
        bad = [{"name": r["name"], "d": r["d"]} for r in eam if r["d"] != 2]
        summary["two_generated"] = {
            "holds": not bad,
            "vacuous": not eam,
            "checked": len(eam),
            "discrepancies": bad,
        }
        tri = [r for r in eam if r["triple"]]
        summary["triples"] = {
            "extracted": len(tri),
            "all_verified": all(r["triple"]["morphic_triple"] and r["triple"]["dim_bound"] for r in tri),
        }
    if "self-dual" in preds and "ea-morphic" in preds:
        summary["ea_morphic_not_self_dual"] = sorted(
            r["name"] for r in ok if r["verdicts"]["ea-morphic"] and not r["verdicts"]["self-dual"]
        )
    checks = [summary[k]["holds"] for k in ("classification", "two_generated") if k in summary]
    summary["consistent"] = all(checks) and not errors
    return summary


def _threads() -> int:
    raw = os.environ.get("MORPHIC_LAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"MORPHIC_LAB_THREADS must be an integer, got {raw!r}")


def cmd_scan(args):
    preds = _selected(args.predicate, SCAN_DEFAULT)
    if args.catalog:
        if not Path(args.catalog).is_dir():
            raise InputError(f"catalog directory not found: {args.catalog}")
        entries = load_directory(args.catalog)
        description = f"directory {args.catalog}"
        jobs, failed = [], []
        for e in entries:
            if e.error is not None:
                failed.append({"name": e.name, "source": e.source, "error": e.error.to_json()})
            else:
                jobs.append((e.group.name, e.source, preds, args.budget, args.cap, args.ea_reading, args.verify))
    else:
        specs = [s for s in builtin_specs() if family_order(s) <= args.cap]
        description = describe_builtin()
        jobs = [(str(s), str(s), preds, args.budget, args.cap, args.ea_reading, args.verify) for s in specs]
        failed = []
    threads = _threads()
    if threads == 1 or len(jobs) < 2:
        rows = [scan_row(j) for j in jobs]
    else:
        with ProcessPoolExecutor(threads) as pool:
            rows = list(pool.map(scan_row, jobs, chunksize=1))
    rows = sorted(rows + failed, key=lambda r: (r["name"], r["source"]))
    summary = summarize(rows, preds)
    report = {
        "version": __version__,
        "catalog": description,
        "predicates": list(preds),
        "ea_reading": args.ea_reading,
        "rows": rows,
        "summary": summary,
    }
    budget_hit = any(r.get("error", {}).get("kind") == "budget" for r in rows)
    return report, 3 if budget_hit else 0


# -- triple -----------------------------------------------------------------------


def _parse_search(tokens: list[str]) -> dict:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key not in ("p", "dimV", "dimW"):
            raise InputError(f"search parameter must be p=, dimV= or dimW=, got {tok!r}")
        try:
            out[key] = int(val)
        except ValueError:
            raise InputError(f"search parameter {key} must be an integer, got {val!r}")
    if "p" not in out or "dimV" not in out:
        raise InputError("search needs p= and dimV=")
    return out


def _triple_geometry(t: Triple) -> dict:
    sizes = sorted({len(spread(t, u)) for u in enumerate_maximal_subspaces(t.dim_v, t.p)})
    return {"spread_sizes": sizes, "zset_size": len(zset(t)), "dim_bound": check_dim_bound(t)}


def cmd_triple(args):
    if args.source:
        ex = extract_triple(resolve_source(args.source))
        out = {"mode": "extract", **ex.to_json()}
        if ex.checks["morphic_triple"]:
            out.update(_triple_geometry(ex.triple))
        return out, 0
    if args.check:
        try:
            t = Triple.from_json(json.loads(Path(args.check).read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            if isinstance(exc, MorphicLabError):
                raise
            raise InputError(f"cannot read triple file {args.check}: {exc}")
        verdict = verify_morphic_triple(t)
        out = {"mode": "check", "triple": t.to_json(), "verdict": verdict.to_json()}
        if verdict.is_morphic_triple and not verdict.degenerate:
            out.update(_triple_geometry(t))
        return out, 0
    params = _parse_search(args.search)
    p, d = params["p"], params["dimV"]
    npairs = len(pair_index(d))
    dims = [params["dimW"]] if "dimW" in params else list(range(1, npairs + 1))
    results, status = [], 0
    for e in dims:
        res = search_triples(p, d, e, budget=args.budget, mode=args.mode, seed=args.seed)
        results.append(res.to_json())
        if res.budget_exceeded:
            status = 3
    found = sum(r["found"] for r in results)
    reason = None
    if not found:
        if d % 2:
            reason = "d must be even"
        elif all(e < d - 1 for e in dims):
            reason = "dimension bound e >= d - 1 fails"
        else:
            reason = "none found in the searched space"
    out = {"mode": "search", "p": p, "dimV": d, "results": results, "found": found, "reason": reason}
    if status:
        out["partial"] = True
    return out, status


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphic-lab",
        description="Morphic and ea-morphic finite p-groups. Group sources are family specs "
        "(family:prime[:params], e.g. heisenberg:3, abelian:2:1,2) or group file paths; "
        "see the 'formats' verb.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--budget", type=int, default=None, help="search budget in nodes or tensors")
        p.add_argument("--cap", type=int, default=LATTICE_CAP, help="maximum group order for lattice work")
        p.add_argument("--report", metavar="PATH", help="also write the full JSON report here")

    def preds(p, default_help):
        p.add_argument("--predicate", choices=PREDICATES + ("all",), help=default_help)
        p.add_argument("--verify", action="store_true", help="re-verify every FALSE witness")
        p.add_argument("--ea-reading", choices=EA_READINGS, default="paper")

    c = sub.add_parser("check", help="run predicates on one group")
    c.add_argument("source")
    preds(c, "predicate to run (default: all)")
    common(c)

    s = sub.add_parser("scan", help="scan a catalog directory or the built-in catalog")
    s.add_argument("catalog", nargs="?", help="directory of group files (default: built-in catalog)")
    preds(s, "predicates to run (default: morphic, ea-morphic, all-max-iso)")
    common(s)

    t = sub.add_parser("triple", help="extract, check or search morphic triples")
    mode = t.add_mutually_exclusive_group(required=True)
    mode.add_argument("--from", dest="source", metavar="SOURCE", help="extract the triple of a group")
    mode.add_argument("--check", metavar="FILE", help="verify a triple file")
    mode.add_argument("--search", nargs="+", metavar="KEY=VALUE", help="p=.. dimV=.. [dimW=..]")
    t.add_argument("--mode", choices=("auto", "exhaustive", "sample"), default="auto")
    t.add_argument("--seed", type=int, default=0)
    common(t)

    sub.add_parser("formats", help="describe input and output formats")
    return parser


def _emit(text: str, path: str | None) -> None:
    print(text)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "formats":
        print(FORMATS, end="")
        return 0
    if args.budget is None:
        args.budget = 10**5 if args.verb == "triple" else SEARCH_BUDGET
    try:
        if args.verb == "check":
            _emit(dumps(cmd_check(args)), args.report)
            return 0
        if args.verb == "scan":
            report, status = cmd_scan(args)
            for row in report["rows"]:
                print(dumps(row))
            print(dumps({"summary": report["summary"], "catalog": report["catalog"], "version": __version__}))
            if args.report:
                Path(args.report).write_text(dumps(report, indent=2) + "\n", encoding="utf-8")
            return status
        out, status = cmd_triple(args)
        _emit(dumps(out), args.report)
        if status:
            print(dumps({"error": "BudgetExceeded", "kind": "budget",
                         "message": "search budget exhausted; output is partial"}), file=sys.stderr)
        return status
    except MorphicLabError as exc:
        print(dumps(exc.to_json()), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
