"""Command-line front end: ``dpweyl <subcommand>``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import DecompositionError, DomainError, RefusalError, ResourceError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

SCHEMA_VERSION = 1


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _emit(obj, out) -> None:
    out.write(_dump(obj) + "\n")


def _load_matrix(args):
    from .fixtures import load_fixture
    from .lattice import parse_matrix

    if args.fixture:
        return load_fixture(args.fixture)
    if args.file is None:
        raise DomainError("give a matrix file or --fixture NAME")
    text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text()
    return parse_matrix(text)


def _int_list(text: str):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------- subcommands


def cmd_enumerate(args, out):
    from . import cache
    from . import weylgroups as wg

    kind = {"weyl": "weyl", "parabolic": "parabolic_P"}[args.kind]
    gens = wg.weyl_generators(args.n) if kind == "weyl" else wg.parabolic_P_generators(args.n)
    group = wg.enumerate_group(gens, large=args.large, threads=args.threads)
    path = cache.cache_path(args.cache or cache.default_cache_dir(), args.n, kind)
    cache.write_group(path, group)
    record = {
        "schema": "enumerate",
        "version": SCHEMA_VERSION,
        "n": args.n,
        "kind": kind,
        "order": group.order,
        "depth": group.depth,
        "layer_sizes": [int(x) for x in group.layer_sizes],
    }
    if args.json:
        _emit(record, out)
    else:
        out.write(f"{kind} n={args.n}: {group.order} elements, word length at most {group.depth}\n")
        out.write(f"cache: {path}\n")
    return EXIT_OK


def cmd_classes(args, out):
    from .conjugacy import census

    records = census(args.n, threads=args.threads, cache_dir=args.cache)
    if args.cuspidal:
        records = [r for r in records if r.fingerprint.cuspidal_W]
    if args.json:
        _emit({"schema": "classes", "version": SCHEMA_VERSION, "n": args.n,
               "classes": [r.to_json() for r in records]}, out)
        return EXIT_OK
    out.write(f"{'#':>3} {'order':>5} {'size':>8} {'trace_E':>7} {'cusp':>4}  {'label':<14} {'irreducibility':<22} charpoly on E_{args.n}\n")
    for i, r in enumerate(records):
        fp = r.fingerprint
        out.write(
            f"{i:>3} {fp.order:>5} {r.size:>8} {fp.trace_E:>7} {'yes' if fp.cuspidal_W else 'no':>4}  "
            f"{r.carter_label or '-':<14} {r.irreducibility:<22} {fp.charpoly_E}\n"
        )
    return EXIT_OK


def _classify_record(g):
    from .conjugacy import carter_label, fingerprint
    from .verdict import realizability_verdict

    v = realizability_verdict(g)
    fp = fingerprint(g)
    return {
        "schema": "classify",
        "version": SCHEMA_VERSION,
        "n": g.n,
        "fingerprint": fp.to_json(),
        "label": carter_label(fp),
        "irreducibility": v.irreducibility,
        "status": v.status,
    }


def cmd_classify(args, out):
    g = _load_matrix(args)
    rec = _classify_record(g)
    if args.json:
        _emit(rec, out)
    else:
        fp = rec["fingerprint"]
        out.write(f"n: {rec['n']}\norder: {fp['order']}\ntrace on H_2: {fp['trace_full']}\n")
        out.write(f"cuspidal: {fp['cuspidal_W']}\nlabel: {rec['label'] or '-'}\n")
        out.write(f"irreducibility: {rec['irreducibility']}\nstatus: {rec['status']}\n")
    return EXIT_OK


def cmd_verdict(args, out):
    from .verdict import realizability_verdict

    v = realizability_verdict(_load_matrix(args))
    if args.json:
        rec = v.to_json()
        rec.update({"schema": "verdict", "version": SCHEMA_VERSION})
        _emit(rec, out)
        return EXIT_OK
    out.write(f"status: {v.status}\nlabel: {v.label or '-'}\norder: {v.fingerprint.order}\n")
    for claim, basis in v.justification:
        out.write(f"  - {claim}  [{basis}]\n")
    if v.certificate is not None:
        cert = v.certificate.to_json()
        if "checks" in cert:
            for c in cert["checks"]:
                out.write(f"    {'ok ' if c['holds'] else 'BAD'} {c['claim']}\n")
        out.write(f"  certificate: {cert['conclusion']}\n")
    return EXIT_OK


def cmd_counts(args, out):
    from .verdict import counts_table

    table = counts_table(large=args.large, threads=args.threads, cache_dir=args.cache)
    if args.json:
        _emit({"schema": "counts", "version": SCHEMA_VERSION,
               "rows": [table[n].to_json() for n in sorted(table)]}, out)
        return EXIT_OK
    out.write(f"{'n':>2} {'h_n':>4} {'count':>10}  method\n")
    for n in sorted(table):
        row = table[n]
        out.write(f"{row.n:>2} {row.h:>4} {row.count:>10}  {row.method}\n")
    return EXIT_OK


def cmd_gsig(args, out):
    from .obstruct import SearchShape, g_signature_feasible

    shape = SearchShape(
        points=args.points,
        surfaces=args.surfaces,
        point_rotations=args.rotations,
        first_rotations=args.first_rotations,
        second_offset=args.offset,
        surface_rotations=args.surface_rotations,
        selfints=args.selfints,
    )
    sols = g_signature_feasible(args.m, args.target, shape, cap=args.cap)
    if args.json:
        _emit({"schema": "gsig", "version": SCHEMA_VERSION, "m": args.m, "target": args.target,
               "solutions": [d.to_json() for d in sols]}, out)
    else:
        out.write(f"{len(sols)} configuration(s) with G-signature {args.target} for m = {args.m}\n")
        for d in sols:
            out.write(f"  points {list(d.points)} surfaces {list(d.surfaces)}\n")
    return EXIT_OK


def cmd_verify_paper(args, out):
    from .checks import verify_paper

    report = verify_paper(skip_large=args.skip_large, threads=args.threads, cache_dir=args.cache,
                          only=set(args.only) if args.only else None)
    if args.json:
        rec = report.to_json()
        rec.update({"schema": "report", "version": SCHEMA_VERSION})
        _emit(rec, out)
    else:
        for c in report.checks:
            tag = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
            out.write(f"[{tag}] {c.criterion}. {c.name}: {c.detail} ({c.seconds:.1f}s)\n")
        out.write("all checks passed\n" if report.passed else "some checks failed\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------- parser


def _common(p):
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--cache", type=Path, default=None, help="cache directory (default: $DPWC_CACHE or the user cache dir)")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpweyl", description="Weyl groups of del Pezzo lattices and realizability checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="enumerate W_n or P_n and write it to the cache")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("weyl", "parabolic"), default="weyl")
    p.add_argument("--large", action="store_true", help="allow n = 8")
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classes", help="conjugacy classes of W_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cuspidal", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_classes)

    for name, func, text in (("classify", cmd_classify, "fingerprint, label and irreducibility of a matrix"),
                             ("verdict", cmd_verdict, "realizability verdict with certificate")):
        p = sub.add_parser(name, help=text)
        p.add_argument("file", nargs="?", help="matrix file (whitespace rows or JSON); '-' reads stdin")
        p.add_argument("--fixture", help="use a bundled matrix instead of a file")
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("counts", help="irreducible elements of order h_n")
    p.add_argument("--large", action="store_true", help="compute the n = 8 entry by orbit search")
    _common(p)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("gsig", help="G-signature feasibility search")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--points", type=int, default=0)
    p.add_argument("--surfaces", type=int, default=0)
    p.add_argument("--rotations", type=_int_list, default=None, help="allowed point rotation numbers")
    p.add_argument("--first-rotations", type=_int_list, default=None, help="allowed first rotation number")
    p.add_argument("--offset", type=int, default=None, help="second rotation = first + offset mod m")
    p.add_argument("--surface-rotations", type=_int_list, default=None)
    p.add_argument("--selfints", type=_int_list, default=(0,), help="allowed self-intersections of surfaces")
    p.add_argument("--cap", type=int, default=1_000_000)
    _common(p)
    p.set_defaults(func=cmd_gsig)

    p = sub.add_parser("verify-paper", help="run the full reference check suite")
    p.add_argument("--skip-large", action="store_true", help="skip the W_8 Coxeter orbit")
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    _common(p)
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "threads", 1) < 1:
        sys.stderr.write("dpweyl: --threads must be positive\n")
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except (ResourceError, RefusalError) as exc:
        sys.stderr.write(f"dpweyl: {exc}\n")
        return EXIT_RESOURCE
    except (DomainError, DecompositionError, OSError) as exc:
        sys.stderr.write(f"dpweyl: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
