"""Command-line driver.

Exit codes: 0 success or "yes", 1 "no", 2 input error, 3 size guard
exceeded, 4 cyclic multi-context system, 5 engines disagree.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .af import (DEFAULT_MAX_NODES, SizeGuardError, complete_extensions, grounded,
                 preferred_extensions, stable_extensions)
from .arguments import Theory, sorted_vulns
from .games import export_game, game_to_json, moves_text, prove_literal
from .language import Literal, ParseError, parse_literal, parse_program
from .mcs import (ContextError, ContextualizationError, CyclicSystemError, QueryError,
                  SimulatedNetwork, UnknownContextError, find_cycle, load_config, monolithic,
                  prove_in_system, result_to_text)
from .resolution import StrategyError, full_strategy, instantiate, is_total, load_strategy
from .semantics import Mode, entails, output

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_GUARD, EXIT_CYCLE, EXIT_MISMATCH = range(6)


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _load(args, queried: Literal | None = None):
    program = parse_program(_read(args.program))
    theory = Theory(program, queried=[queried] if queried is not None else ())
    if args.strategy == "full":
        strategy = full_strategy(theory)
    elif args.strategy == "empty":
        strategy = load_strategy('{"resolutions": []}', theory)
    else:
        strategy = load_strategy(_read(args.strategy), theory)
    return theory, strategy


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _verdict(yes: bool) -> int:
    print(f"RESULT: {'yes' if yes else 'no'}")
    return EXIT_YES if yes else EXIT_NO


def cmd_inspect(args) -> int:
    theory, strategy = _load(args)
    fw = instantiate(strategy)
    total = is_total(strategy, theory.conflicts)
    if args.format == "json":
        sys.stdout.write(_dump({
            "arguments": [{"text": a.text, "conclusion": str(a.conclusion),
                           "vulnerabilities": [str(v) for v in sorted_vulns(a.vulnerabilities)]}
                          for a in theory.arguments],
            "conflicts": [{"arguments": [a.text for a in c.arguments], "kind": c.kind}
                          for c in theory.conflicts],
            "strategy": strategy.to_json(),
            "total": total,
            "framework": fw.to_json(strategy.label),
        }))
        return EXIT_YES
    if args.format == "dot":
        sys.stdout.write(fw.to_dot(lambda r: r.text))
        return EXIT_YES
    out = [f"arguments: {len(theory.arguments)}"]
    for a in theory.arguments:
        vulns = ", ".join(str(v) for v in sorted_vulns(a.vulnerabilities))
        out.append(f"  {a.text}  vuls: {{{vulns}}}")
    out.append(f"conflicts: {len(theory.conflicts)}")
    out.extend(f"  {c.text}  ({c.kind})" for c in theory.conflicts)
    out.append(f"resolutions: {len(strategy)}")
    out.extend(f"  {strategy.label(r)} = {r.text}" for r in strategy)
    out.append(f"attacks: {len(fw.attacks)}")
    for r in strategy:
        hit = sorted(strategy.label(t) for t in fw.attacked[r])
        if hit:
            out.append(f"  {strategy.label(r)} -> {', '.join(hit)}")
    out.append(f"total: {'yes' if total else 'no'}")
    print("\n".join(out))
    return EXIT_YES


def cmd_extensions(args) -> int:
    theory, strategy = _load(args)
    fw = instantiate(strategy)
    complete = complete_extensions(fw, args.max_nodes)
    families = {
        "complete": complete,
        "grounded": [grounded(fw)],
        "preferred": preferred_extensions(fw, args.max_nodes),
        "stable": stable_extensions(fw, args.max_nodes),
    }

    def describe(ext) -> dict:
        members = sorted(ext.members, key=fw.index)
        return {"members": [strategy.label(r) for r in members],
                "output": sorted(str(l) for l in output(theory, strategy, ext))}

    doc = {"resolutions": {strategy.label(r): r.text for r in strategy}}
    doc.update({name: [describe(e) for e in exts] for name, exts in families.items()})
    if args.format == "json":
        sys.stdout.write(_dump(doc))
        return EXIT_YES
    out = ["resolutions:"]
    out.extend(f"  {strategy.label(r)} = {r.text}" for r in strategy)
    for name in families:
        out.append(f"{name}: {len(doc[name])}")
        for e in doc[name]:
            out.append(f"  {{{', '.join(e['members'])}}}  output: {{{', '.join(e['output'])}}}")
    print("\n".join(out))
    return EXIT_YES


def cmd_query(args) -> int:
    literal = parse_literal(args.literal).with_context(None)
    theory, strategy = _load(args, literal)
    if literal.atom not in theory.program.atoms():
        raise InputError(f"literal {literal} does not occur in the program")
    mode = Mode(args.mode)
    game = oracle = None
    if args.engine in ("game", "both"):
        game = prove_literal(theory, strategy, literal, mode)
    if args.engine in ("oracle", "both"):
        oracle = entails(theory, strategy, literal, mode, args.max_nodes)
    verdict = game.success if game is not None else oracle

    if args.format == "json":
        doc = {"literal": str(literal), "mode": mode.value, "engine": args.engine,
               "result": "yes" if verdict else "no"}
        if game is not None:
            doc["game"] = game_to_json(game.game.tree) if game.success else None
            doc["attempts"] = [{"argument": g.argument.text,
                                "losing_branches": [moves_text(b) for b in g.losing_branches]}
                               for g in game.attempts if not g.success]
        if oracle is not None:
            doc["oracle"] = oracle
        sys.stdout.write(_dump(doc))
    elif game is not None:
        if game.success:
            sys.stderr.write(export_game(game.game.tree, args.format))
        else:
            if game.reason == "no-argument":
                sys.stderr.write(f"no argument concludes {literal}\n")
            for g in game.attempts:
                sys.stderr.write(f"argument {g.argument.text} fails:\n")
                for b in g.losing_branches:
                    sys.stderr.write("  " + " ; ".join(moves_text(b)) + "\n")
    if game is not None and oracle is not None and game.success != oracle:
        sys.stderr.write(f"error: game engine says {game.success}, oracle says {oracle}\n")
        return EXIT_MISMATCH
    return _verdict(verdict)


def cmd_mcs(args) -> int:
    system = load_config(args.config)
    cycle = find_cycle(system)
    if cycle is not None:
        raise CyclicSystemError(cycle)
    literal = parse_literal(args.literal).with_context(None)
    mode = Mode(args.mode)
    network = SimulatedNetwork(args.delivery, args.seed)
    result = prove_in_system(system, literal, mode, network)
    doc = result.to_json()
    agree = None
    if args.compare_monolithic:
        theory, strategy = monolithic(system)
        theory = Theory(theory.program, queried=[literal])
        mono = entails(theory, strategy, literal, mode, args.max_nodes)
        agree = mono == result.success
        doc = {"contextual": doc, "monolithic": mono, "agree": agree}
    if args.format == "json":
        sys.stdout.write(_dump(doc))
    else:
        sys.stderr.write(result_to_text(result.to_json()))
        if agree is not None:
            sys.stderr.write(f"monolithic: {'yes' if doc['monolithic'] else 'no'}, "
                             f"{'agrees' if agree else 'DISAGREES'}\n")
    if agree is False:
        return EXIT_MISMATCH
    return _verdict(result.success)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crdelp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def program_args(p):
        p.add_argument("program", help="program file")
        p.add_argument("--strategy", default="full",
                       help='strategy JSON file, "full" (default) or "empty"')

    def common(p, formats=("text", "json")):
        p.add_argument("--format", choices=formats, default="text")
        p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES,
                       help="size guard for extension enumeration")

    p = sub.add_parser("inspect", help="arguments, conflicts, strategy and its framework")
    program_args(p)
    common(p, ("text", "json", "dot"))
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("extensions", help="complete, grounded, preferred and stable extensions")
    program_args(p)
    common(p)
    p.set_defaults(func=cmd_extensions)

    p = sub.add_parser("query", help="decide entailment of a literal")
    program_args(p)
    p.add_argument("literal")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="skeptical")
    p.add_argument("--engine", choices=["game", "oracle", "both"], default="game")
    common(p, ("text", "json", "dot"))
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("mcs", help="prove a literal in a multi-context system")
    p.add_argument("config", help="system JSON file")
    p.add_argument("literal")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="skeptical")
    p.add_argument("--compare-monolithic", action="store_true",
                   help="also decide the merged program and compare")
    p.add_argument("--delivery", choices=["fifo", "lifo", "random"], default="fifo")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_mcs)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeGuardError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except CyclicSystemError as e:
        print(f"error: {e}", file=sys.stderr)
        print(f"cycle: {' '.join(e.cycle)}", file=sys.stderr)
        return EXIT_CYCLE
    except (InputError, ParseError, StrategyError, ContextError, ContextualizationError,
            QueryError, UnknownContextError, json.JSONDecodeError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
