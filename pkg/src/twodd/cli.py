"""Command-line interface.

Exit codes: 0 success or a true verdict, 1 a false verdict, 2 bad usage or
input, 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import certify, enumeration, factors
from .digraph import (
    Digraph,
    GraphError,
    SpliceMap,
    dumps_json,
    format_graph_text,
    graph_from_json,
    parse_graph_text,
    require_valid,
    spliced_graph,
    to_dot,
)
from .perm import PermError, format_cycles, parse_cycles
from .permset import (
    PermSet,
    ResourceLimitError,
    find_biconjugacy,
    format_permset,
    parse_permset_text,
    residue,
)

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def read_graph_file(path: str) -> Digraph:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        g = graph_from_json(json.loads(text))
    else:
        g = parse_graph_text(text)
    require_valid(g)
    return g


def _is_permset_text(text: str) -> bool:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            return line.startswith("n=")
    return False


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _factor_cap(args) -> int:
    return args.max_factor_bits if args.max_factor_bits is not None else args.max_acs


# -- subcommands ---------------------------------------------------------------

def cmd_decompose(args) -> int:
    g = read_graph_file(args.graph)
    if args.format == "json":
        _emit(dumps_json(g) + "\n", args.output)
    elif args.format == "dot":
        _emit(to_dot(g), args.output)
    else:
        lines = []
        for k, x in enumerate(g.acs):
            fwd = " ".join(f"{g.arcs[a][0] + 1}->{g.arcs[a][1] + 1}" for a in x.forward)
            bwd = " ".join(f"{g.arcs[a][0] + 1}->{g.arcs[a][1] + 1}" for a in x.backward)
            lines.append(f"AC {k + 1} r={x.r} forward: {fwd} | backward: {bwd}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_factors(args) -> int:
    g = read_graph_file(args.graph)
    facs = list(factors.enumerate_factors(g, _factor_cap(args)))
    if args.format == "json":
        _emit(json.dumps([f.to_json() for f in facs], indent=1) + "\n", args.output)
    else:
        _emit("".join(f"{f.bitstring} {f.index}\n" for f in facs), args.output)
    return EXIT_OK


def cmd_routes(args) -> int:
    g = read_graph_file(args.graph)
    rs = factors.open_routes(g, normalize=args.normalize, max_acs=_factor_cap(args))
    _emit(_format_set(rs.routes, args.format), args.output)
    return EXIT_OK


def _format_set(P: PermSet, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"n": P.n, "perms": P.cycle_strings()}) + "\n"
    return format_permset(P)


def _residue_input(path: str, args) -> PermSet:
    """Set files hold residues (route sets with --routes); graph files give the residue of their open routes."""
    text = Path(path).read_text()
    if _is_permset_text(text):
        S = parse_permset_text(text)
        return residue(S) if args.routes else S
    g = read_graph_file(path)
    return residue(factors.open_routes(g, max_acs=_factor_cap(args)).routes)


def cmd_residue(args) -> int:
    if args.permset:
        P = parse_permset_text(Path(args.permset).read_text())
    elif args.graph:
        g = read_graph_file(args.graph)
        P = factors.open_routes(g, max_acs=_factor_cap(args)).routes
    else:
        raise UsageError("residue needs a graph file or --permset")
    _emit(_format_set(residue(P), args.format), args.output)
    return EXIT_OK


def cmd_equiv(args) -> int:
    A = _residue_input(args.first, args)
    B = _residue_input(args.second, args)
    w = find_biconjugacy(A, B)
    if w is None:
        print("not equivalent")
        return EXIT_FALSE
    x, y = w
    print(f"x = {format_cycles(x)}")
    print(f"y = {format_cycles(y)}")
    return EXIT_OK


def cmd_splice(args) -> int:
    F = read_graph_file(args.first)
    Fp = read_graph_file(args.second)
    n = len(F.exits)
    m = SpliceMap(parse_cycles(args.x, n), parse_cycles(args.y, n))
    g = spliced_graph(F, Fp, m)
    _emit(dumps_json(g) + "\n" if args.format == "json" else format_graph_text(g), args.output)
    if args.hamiltonian:
        ham = factors.hamiltonicity_via_routes(F, Fp, m, _factor_cap(args))
        print("hamiltonian" if ham else "non-hamiltonian", file=sys.stderr)
        return EXIT_OK if ham else EXIT_FALSE
    return EXIT_OK


def cmd_check(args) -> int:
    g = read_graph_file(args.graph)
    cert = certify.check(g, brute_force=not args.no_brute_force, max_acs=_factor_cap(args))
    text = cert.dumps() + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(cert.verdict.value)
    else:
        sys.stdout.write(text)
    if cert.verdict is certify.Verdict.UNDECIDED:
        return EXIT_CAP if cert.reason.startswith("resource cap") else EXIT_FALSE
    return EXIT_OK


def cmd_verify_cert(args) -> int:
    g = read_graph_file(args.graph)
    cert = certify.read_certificate(args.certificate)
    try:
        ok = certify.verify_certificate(g, cert, _factor_cap(args))
    except certify.CertificateError as exc:
        print(f"invalid: {exc}")
        return EXIT_FALSE
    print("valid" if ok else "invalid: undecided certificate")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_reduce(args) -> int:
    g = read_graph_file(args.graph)
    cap = _factor_cap(args)
    steps = []
    while True:
        out = certify.reduce_2ac_step(g, cap) or certify.reduce_3ac_step(g, cap)
        if out is None:
            break
        steps.append(out[0])
        g = out[1]
        if not args.repeat:
            break
    for s in steps:
        extra = s.data.get("replacement") or s.data.get("route")
        print(f"{s.kind.value} K={[k + 1 for k in s.data['K']]} {extra}", file=sys.stderr)
    if not steps:
        print("no reduction applies", file=sys.stderr)
        return EXIT_FALSE
    _emit(dumps_json(g) + "\n" if args.format == "json" else format_graph_text(g), args.output)
    return EXIT_OK


def _family(args) -> enumeration.FamilySpec:
    return enumeration.FamilySpec(
        arcs_per_ac=args.arcs_per_ac,
        ac_count=args.acs,
        clean=not args.dirty,
        require_connected=not args.allow_disconnected,
        saturated_count=args.saturated,
        filters=tuple(args.filter or ()),
    )


def cmd_generate(args) -> int:
    spec = _family(args)
    if args.output is None:
        raise UsageError("generate needs -o/--output")
    records, index = [], []
    for k, g in enumerate(enumeration.generate(spec, long_run=args.long_run, jobs=args.jobs,
                                               max_acs=args.max_family_acs), start=1):
        records.append(f"# graph {k}\n" + format_graph_text(g))
        index.append(f"{k}\t{enumeration.canonical_form(g).code.hex()}\n")
    Path(args.output).write_text("\n".join(records))
    Path(args.output + ".index").write_text("".join(index))
    print(len(records))
    return EXIT_OK


def cmd_census(args) -> int:
    spec = _family(args)
    analyses = args.analyses.split(",") if args.analyses else ["connected", "clean", "parity_family"]
    if args.work_dir:
        if not args.long_run:
            raise UsageError("sharded census runs need --long-run")
        d = Path(args.work_dir)
        if not (d / "manifest.json").exists():
            enumeration.write_manifest(spec, analyses, d)
        if args.shard is not None:
            enumeration.run_shard(d, args.shard)
            return EXIT_OK
        if not args.merge_only:
            enumeration.run_all_shards(d, jobs=args.jobs)
        table, missing = enumeration.merge_shards(d)
        if missing:
            print(f"{missing} shards missing", file=sys.stderr)
    else:
        table = enumeration.census(spec, analyses, long_run=args.long_run, jobs=args.jobs,
                                   max_acs=args.max_family_acs)
    text = json.dumps(table.to_json(), indent=1) + "\n" if args.format == "json" else table.to_tsv()
    _emit(text, args.output)
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-acs", type=int, default=None,
                        help="factor enumeration cap in ACs (env TWODD_MAX_ACS)")
    common.add_argument("--max-factor-bits", type=int, default=None,
                        help="alias of --max-acs (env TWODD_MAX_FACTOR_BITS)")
    common.add_argument("--long-run", action="store_true", help="allow runs beyond the desk-scale caps")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--format", choices=["text", "json", "dot", "tsv"], default="text")
    common.add_argument("-o", "--output")

    p = argparse.ArgumentParser(prog="twodd", description="Residues, routes and Hamiltonicity certificates for 2-digraphs")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("decompose", parents=[common], help="alternating-cycle decomposition")
    s.add_argument("graph")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("factors", parents=[common], help="list factors and their indices")
    s.add_argument("graph")
    s.set_defaults(func=cmd_factors)

    s = sub.add_parser("routes", parents=[common], help="open routes of an open 2-digraph")
    s.add_argument("graph")
    s.add_argument("--normalize", action="store_true", help="number exits so the first open route is I")
    s.set_defaults(func=cmd_routes)

    s = sub.add_parser("residue", parents=[common], help="residue of a route set")
    s.add_argument("graph", nargs="?")
    s.add_argument("--permset", help="permutation-set file instead of a graph")
    s.set_defaults(func=cmd_residue)

    s = sub.add_parser("equiv", parents=[common], help="test two sets for biconjugacy")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--routes", action="store_true",
                   help="set files hold route sets; compare their residues")
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("splice", parents=[common], help="splice two open 2-digraphs")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--x", default="I")
    s.add_argument("--y", default="I")
    s.add_argument("--hamiltonian", action="store_true", help="report Hamiltonicity from the route sets")
    s.set_defaults(func=cmd_splice)

    s = sub.add_parser("check", parents=[common], help="certify (non-)Hamiltonicity")
    s.add_argument("graph")
    s.add_argument("--no-brute-force", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("verify-cert", parents=[common], help="re-check a certificate")
    s.add_argument("graph")
    s.add_argument("certificate")
    s.set_defaults(func=cmd_verify_cert)

    s = sub.add_parser("reduce", parents=[common], help="apply 2-AC/3-AC reductions")
    s.add_argument("graph")
    s.add_argument("--repeat", action="store_true", help="reduce to a fixpoint")
    s.set_defaults(func=cmd_reduce)

    for name, func in (("generate", cmd_generate), ("census", cmd_census)):
        s = sub.add_parser(name, parents=[common], help=f"{name} a graph family")
        s.add_argument("--acs", type=int, required=True)
        s.add_argument("--arcs-per-ac", type=int, default=6)
        s.add_argument("--saturated", type=int)
        s.add_argument("--dirty", action="store_true", help="allow dirty ACs")
        s.add_argument("--allow-disconnected", action="store_true")
        s.add_argument("--filter", action="append", choices=sorted(enumeration.FILTERS))
        s.add_argument("--max-family-acs", type=int, default=None)
        s.set_defaults(func=func)
        if name == "census":
            s.add_argument("--analyses", help="comma-separated: " + ",".join(enumeration.ANALYSES))
            s.add_argument("--work-dir", help="shard directory for --long-run")
            s.add_argument("--shard", type=int, help="run one shard only")
            s.add_argument("--merge-only", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.max_acs is None:
            args.max_acs = _env_int("TWODD_MAX_ACS", factors.DEFAULT_MAX_ACS)
        if args.max_factor_bits is None and "TWODD_MAX_FACTOR_BITS" in os.environ:
            args.max_factor_bits = _env_int("TWODD_MAX_FACTOR_BITS", factors.DEFAULT_MAX_ACS)
        if getattr(args, "max_family_acs", 0) is None:
            args.max_family_acs = _env_int("TWODD_MAX_FAMILY_ACS", enumeration.DEFAULT_MAX_ACS)
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, GraphError, PermError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
