"""Command-line front end: ``tsa check|expand-dfa|subsume|gen|bench``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .analysis import analyze_program, dfa_analyze_program
from .automata import DEFAULT_STATE_LIMIT, dump_dfa, expand_dfa, minimize_dfa
from .bench import (
    ClientSpec,
    ContractSpec,
    contract_decl,
    format_usability,
    gen_client,
    gen_contract,
    parse_matrix,
    rows_to_csv,
    run_bench,
    summarize,
    usability_rows,
)
from .contracts import build_contract, first_subsumption_failure
from .errors import SpecInvalid, TsaError
from .frontend import parse_files

EXIT_CLEAN, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _single_contract(path: str):
    prog = parse_files([path])
    bases = [c for c in prog.classes if c.is_base]
    if len(bases) != 1:
        raise UsageError(f"{path}: expected exactly one contract class, found {len(bases)}")
    return bases[0], build_contract(bases[0])


def cmd_check(args, out) -> int:
    program = parse_files(args.files)
    run = dfa_analyze_program if args.analyzer == "dfa" else analyze_program
    warnings = run(program)
    for w in warnings:
        print(w.to_json() if args.format == "json" else str(w), file=out)
    return EXIT_FINDINGS if warnings else EXIT_CLEAN


def cmd_expand_dfa(args, out) -> int:
    _, contract = _single_contract(args.file)
    dfa = expand_dfa(contract, args.state_limit)
    if args.minimize:
        dfa = minimize_dfa(dfa)
    out.write(dump_dfa(dfa))
    print(f"# states: {dfa.num_states}", file=out)
    return EXIT_CLEAN


def cmd_subsume(args, out) -> int:
    _, sub = _single_contract(args.sub)
    _, sup = _single_contract(args.super)
    failing = first_subsumption_failure(sub, sup, args.polarity)
    if failing is None:
        print("subsumes", file=out)
        return EXIT_CLEAN
    print(f"does-not-subsume (first failing method: {failing})", file=out)
    return EXIT_FINDINGS


def _key_values(items) -> dict[str, str]:
    kv = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        kv[k] = v
    return kv


def _take(kv: dict, key: str, cast, default):
    try:
        return cast(kv.pop(key)) if key in kv else default
    except ValueError:
        raise UsageError(f"bad value for {key}: {kv.get(key)!r}") from None


def cmd_gen(args, out) -> int:
    kv = _key_values(args.params)
    contract = ContractSpec(
        methods=_take(kv, "methods", int, 4),
        toggle_pairs=_take(kv, "toggles", int, 0),
        chain_length=_take(kv, "chain", int, 0),
        seed=_take(kv, "cseed" if args.what == "client" else "seed", int, 0),
        name=_take(kv, "name", str, ""),
    )
    if args.what == "contract":
        if kv:
            raise UsageError(f"unknown keys: {', '.join(sorted(kv))}")
        text = gen_contract(contract)
    else:
        spec = ClientSpec(
            loc_target=_take(kv, "loc", int, 100),
            num_base_classes=_take(kv, "bases", int, 1),
            composition_depth=_take(kv, "depth", int, 1),
            branch_density=_take(kv, "branch", float, 0.1),
            loop_density=_take(kv, "loop", float, 0.05),
            seed=_take(kv, "seed", int, 0),
            inject_bug=args.inject_bug,
        )
        if kv:
            raise UsageError(f"unknown keys: {', '.join(sorted(kv))}")
        decls = [contract_decl(replace(contract, seed=contract.seed + j)) for j in range(spec.num_base_classes)]
        client = gen_client(spec, decls)
        text = client.text
        if client.bug_site is not None:
            fn, line, col = client.bug_site
            print(f"tsa: injected violation in {fn} at {line}:{col}", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_CLEAN


def cmd_bench(args, out) -> int:
    cells = parse_matrix(Path(args.matrix).read_text(encoding="utf-8"))
    rows = run_bench(cells)
    csv_text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    else:
        out.write(csv_text)
    print(summarize(rows), file=out if args.out else sys.stderr)
    seen = {}
    for c in cells:
        seen.setdefault((c.contract.methods, c.contract.toggle_pairs, c.contract.chain_length), c.contract)
    print(format_usability(usability_rows(seen.values())), file=out if args.out else sys.stderr)
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsa", description="Typestate checking with enable/disable contracts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="analyze TSL files and report contract violations")
    p.add_argument("files", nargs="+")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--analyzer", choices=("bfa", "dfa"), default="bfa")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("expand-dfa", help="print the explicit automaton of a contract class")
    p.add_argument("file")
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--state-limit", type=int, default=DEFAULT_STATE_LIMIT)
    p.set_defaults(func=cmd_expand_dfa)

    p = sub.add_parser("subsume", help="check that one contract accepts every sequence another accepts")
    p.add_argument("sub")
    p.add_argument("super")
    p.add_argument("--polarity", choices=("language", "literal"), default="language")
    p.set_defaults(func=cmd_subsume)

    p = sub.add_parser("gen", help="generate a contract class or a client program")
    p.add_argument("what", choices=("contract", "client"))
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--inject-bug", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time both analyzers over a matrix of generated programs")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CLEAN if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args, out)
    except (TsaError, UsageError, OSError, SpecInvalid) as exc:
        print(f"tsa: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
