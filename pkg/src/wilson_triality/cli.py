"""Command-line front end: ``wilson-triality {field,search,table1,classify,geometry}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from ._jit import use_numba
from .geometry import (
    DEFAULT_BOUND,
    GeometryBoundError,
    build_geometry,
    chamber_orbits,
    duality_absence,
    is_firm,
    is_geometry,
    triality_action,
)
from .gf import build_field, factorize
from .maps import (
    MapTriple,
    TripleParseError,
    format_triple,
    group_for,
    map_type,
    parse_triple,
    validate_triple,
    wilson_class,
)
from .search import TABLE1, SearchParams, build_triple, default_jobs, run_search

CHECKS = ("counts", "geometry", "orbits", "firmness", "triality", "duality")

# seconds per candidate (a, b, c) for scan, generation tests and classification,
# measured with the compiled kernels on one core
_COST_PER_CANDIDATE = 5e-6
_NUMPY_SLOWDOWN = 8.0


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _prime_power(q: int) -> tuple[int, int]:
    f = factorize(q)
    if q < 2 or len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, n), = f.items()
    return p, n


def estimate_seconds(q: int) -> float:
    cost = _COST_PER_CANDIDATE * float(q) ** 6
    return cost if use_numba() else cost * _NUMPY_SLOWDOWN


# ---------------------------------------------------------------------------


def cmd_field(args, out: TextIO) -> int:
    deg = args.deg if args.deg is not None else 3 * args.n
    F = build_field(args.p, deg)
    out.write(f"field      GF({F.p}^{F.deg}), {F.order} elements\n")
    out.write(f"modulus    {' '.join(map(str, F.modulus))}  (coefficients, constant term first)\n")
    out.write(f"primitive  {F.format(F.primitive)}\n")
    if F.n is not None:
        out.write(f"q          {F.q}  (x -> x^q has order 3)\n")
    return 0


def cmd_search(args, out: TextIO) -> int:
    params = SearchParams(
        args.p, args.n,
        report_all_orders=args.all_orders,
        worker_count=args.jobs,
        classify_sample=args.classify_sample,
        seed=args.seed,
    )
    report, sols = run_search(params)
    F = group_for(args.p, args.n).ctx
    Q = F.order
    out.write(f"q = {report.q}, q^3 = {Q}\n")
    out.write(f"{'column':<12}{'count':>8}\n")
    out.write(f"{'q^3-1':<12}{report.count_minus:>8}\n")
    out.write(f"{'q^3+1':<12}{report.count_plus:>8}\n")
    out.write(f"{'degenerate':<12}{report.degenerate:>8}\n")
    for order, count in report.other_counts.items():
        out.write(f"{'order ' + str(order):<12}{count:>8}\n")
    out.write(f"solutions of the Frobenius system: {report.eq4_solutions}, "
              f"not generating: {report.not_full}\n")
    out.write(f"classified: {_dumps(report.class_counts)}\n")
    ref = report.matches_table1()
    if ref is not None:
        out.write(f"Table 1: {'PASS' if ref else 'FAIL'}\n")
    print(f"elapsed {report.elapsed:.2f}s", file=sys.stderr)
    if args.emit:
        meta = {
            "meta": {
                "p": args.p, "n": args.n, "q": report.q,
                "modulus": list(F.modulus), "all_orders": args.all_orders,
                "classify_sample": args.classify_sample, "seed": args.seed,
                "version": __version__,
            }
        }
        with open(args.emit, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_dumps(meta) + "\n")
            for s in sols:
                fh.write(_dumps(s.record()) + "\n")
    if args.triples:
        G = group_for(args.p, args.n)
        with open(args.triples, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# seed {args.seed}\n")
            for s in sols:
                fh.write(format_triple(build_triple(G, s.a, s.b, s.c)) + "\n")
    bad = [c for c in report.class_counts if c != "III"]
    return 1 if bad or ref is False else 0


def cmd_table1(args, out: TextIO) -> int:
    rows = []
    for q in args.q:
        p, n = _prime_power(q)
        est = estimate_seconds(q)
        if est > args.budget:
            print(f"q = {q}: refused, estimated {est:.0f}s exceeds the budget of {args.budget:.0f}s "
                  f"(raise --budget to run it)", file=sys.stderr)
            return 2
        rows.append((q, p, n))
    out.write(f"{'q':>4} {'q^3':>7} {'q^3-1':>7} {'q^3+1':>7}  {'ref':>11}  result\n")
    failed = False
    for q, p, n in rows:
        report, _ = run_search(SearchParams(p, n, worker_count=args.jobs,
                                            classify_sample=args.classify_sample, seed=args.seed))
        ref = TABLE1.get(q)
        if ref is None:
            verdict, ref_text = "n/a", "-"
        else:
            ok = (report.count_minus, report.count_plus) == ref
            failed |= not ok
            verdict, ref_text = ("PASS" if ok else "FAIL"), f"{ref[0]}/{ref[1]}"
        out.write(f"{q:>4} {q**3:>7} {report.count_minus:>7} {report.count_plus:>7}  {ref_text:>11}  {verdict}\n")
        out.flush()
    return 1 if failed else 0


def _read_triples(path: str) -> list[tuple[int, MapTriple | TripleParseError]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                out.append((lineno, parse_triple(text, lineno)))
            except TripleParseError as exc:
                out.append((lineno, exc))
    return out


def cmd_classify(args, out: TextIO) -> int:
    status = 0
    for lineno, item in _read_triples(args.file):
        if isinstance(item, TripleParseError):
            print(str(item), file=sys.stderr)
            out.write(_dumps({"line": lineno, "error": str(item)}) + "\n")
            status = 1
            continue
        diag = validate_triple(item, seed=args.seed)
        record: dict = {"line": lineno, "valid": diag.ok, "failures": list(diag.failures)}
        if diag.ok:
            rep = wilson_class(item)
            record["type"] = list(map_type(item))
            record["class"] = rep.wilson_class.value
            record["triality_k"] = rep.triality.k if rep.triality else None
            record["duality_k"] = {op.name: (w.k if w else None) for op, w in rep.dualities.items()}
        else:
            status = 1
        out.write(_dumps(record) + "\n")
    return status


def _load_solution(spec: str, p: int, n: int) -> MapTriple:
    path, _, index = spec.rpartition(":")
    if not path:
        raise ValueError(f"--solution expects FILE:INDEX, got {spec!r}")
    k = int(index)
    G = group_for(p, n)
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln.strip() and not ln.startswith("#")]
    rows = []
    for ln in lines:
        if ln.lstrip().startswith("{"):
            rec = json.loads(ln)
            if "meta" in rec:
                continue
            F = G.ctx
            rows.append(build_triple(G, *(F.from_coeffs(rec[x]) for x in "abc")))
        else:
            t = parse_triple(ln)
            if t.ctx != G.ctx:
                raise ValueError(f"triple over GF({t.ctx.order}) but --p/--n give GF({G.ctx.order})")
            rows.append(t)
    if not 0 <= k < len(rows):
        raise IndexError(f"{path} holds {len(rows)} solutions; index {k} is out of range")
    return rows[k]


def cmd_geometry(args, out: TextIO) -> int:
    G = group_for(args.p, args.n)
    if G.order > args.bound:
        print(f"refused: |PSL(2, {G.Q})| = {G.order} exceeds the group-order bound {args.bound}",
              file=sys.stderr)
        return 2
    if args.solution:
        t = _load_solution(args.solution, args.p, args.n)
    else:
        _, sols = run_search(SearchParams(args.p, args.n, classify_sample=0, seed=args.seed))
        if not sols:
            print("the search found no solutions", file=sys.stderr)
            return 1
        t = build_triple(G, sols[0].a, sols[0].b, sols[0].c)
    try:
        geo = build_geometry(t, bound=args.bound)
    except GeometryBoundError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    wanted = CHECKS if "all" in args.verify else tuple(c for c in CHECKS if c in args.verify)
    ok_all = True

    def line(name: str, ok: bool, detail: str) -> None:
        nonlocal ok_all
        ok_all &= ok
        out.write(f"{name:<10} {'PASS' if ok else 'FAIL'}  {detail}\n")
        out.flush()

    mt = map_type(t)
    out.write(f"triple     {format_triple(t)}\n")
    out.write(f"type       {mt}\n")
    for check in wanted:
        if check == "counts":
            orders = geo.subgroup_orders()
            counts = geo.element_counts()
            expect_orders = (2 * mt.p, 4, 2 * mt.q, 2 * mt.r)
            ok = orders == expect_orders and all(c * o == G.order for c, o in zip(counts, orders))
            line("counts", ok, f"elements {counts}, parabolic orders {orders}, |G| = {G.order}")
        elif check == "geometry":
            line("geometry", is_geometry(geo), f"every flag lies in one of {len(geo.chambers())} chambers")
        elif check == "orbits":
            sizes = chamber_orbits(geo)
            line("orbits", len(sizes) == 2, f"{len(sizes)} chamber orbits of sizes {sizes}")
        elif check == "firmness":
            rep = is_firm(geo)
            ok = (not rep.firm) and rep.chambers_through_witness == 1
            witness = " ".join(f"{i}:{a}" for i, a in rep.witness) if rep.witness else "-"
            line("firmness", ok, f"not firm; flag {witness} lies in {rep.chambers_through_witness} chamber")
        elif check == "triality":
            tr = triality_action(geo)
            ok = tr.order == 3 and tr.preserves_incidence and tr.type_map == (2, 1, 3, 0)
            line("triality", ok, f"type map 0->2->3->0, 1 fixed; order {tr.order}; "
                                 f"incidence {'preserved' if tr.preserves_incidence else 'broken'}")
        elif check == "duality":
            line("duality", duality_absence(t), "no Galois twist and conjugator realises D, P or DPD")
    if args.export_edges:
        with open(args.export_edges, "w", encoding="utf-8", newline="\n") as fh:
            for e in geo.edge_list():
                fh.write(e + "\n")
    return 0 if ok_all else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wilson-triality", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def pn(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--p", type=int, required=True, help="characteristic")
        sp.add_argument("--n", type=int, required=True, help="q = p^n; the field is GF(q^3)")

    sp = sub.add_parser("field", help="describe the field GF(p^(3n))")
    pn(sp)
    sp.add_argument("--deg", type=int, help="override the extension degree")
    sp.set_defaults(func=cmd_field)

    seed_help = "seed for randomised generation tests and sampling"
    sp = sub.add_parser("search", help="count and emit solutions for one q")
    pn(sp)
    sp.add_argument("--all-orders", action="store_true", help="also emit solutions outside the two columns")
    sp.add_argument("--jobs", type=int, default=default_jobs(), help="worker processes (env WILSON_TRIALITY_JOBS)")
    sp.add_argument("--emit", metavar="PATH", help="write solutions as JSON lines")
    sp.add_argument("--triples", metavar="PATH", help="write solutions in the triple-file format")
    sp.add_argument("--classify-sample", type=int, default=None, metavar="K",
                    help="classify only K seeded-random solutions (default: all)")
    sp.add_argument("--seed", type=int, default=0, help=seed_help)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("table1", help="reproduce the solution-count table")
    sp.add_argument("--q", type=int, nargs="+", default=[3, 4, 5, 7, 8, 9])
    sp.add_argument("--budget", type=float, default=120.0, help="refuse any q estimated to take longer (seconds)")
    sp.add_argument("--jobs", type=int, default=default_jobs())
    sp.add_argument("--classify-sample", type=int, default=None, metavar="K")
    sp.add_argument("--seed", type=int, default=0, help=seed_help)
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("classify", help="validate and classify triples from a file")
    sp.add_argument("file")
    sp.add_argument("--seed", type=int, default=0, help=seed_help)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("geometry", help="build and verify the coset geometry of a solution")
    pn(sp)
    sp.add_argument("--solution", metavar="FILE:INDEX",
                    help="JSONL from 'search --emit' or a triple file; default: first search solution")
    sp.add_argument("--verify", nargs="+", choices=CHECKS + ("all",), default=["all"])
    sp.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="largest group order to enumerate")
    sp.add_argument("--export-edges", metavar="PATH", help="write the incidence graph as an edge list")
    sp.add_argument("--seed", type=int, default=0, help=seed_help)
    sp.set_defaults(func=cmd_geometry)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
