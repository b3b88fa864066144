"""The ``respgap`` command line."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import examples
from .dictatorship import KINDS, DictatorKind, classify
from .enumeration import EnumerationConfig
from .errors import BudgetExceeded, MechanismError, ParseError, RespgapError
from .harness import verify
from .mechanism import Mechanism, validate
from .responsibility import report
from .solver import solve
from .text import export_dot, parse

EXIT_OK, EXIT_FINDINGS, EXIT_INPUT = 0, 1, 2

_PARTITIONS = {"perfect-only": "perfect-only", "exhaustive": "exhaustive-partitions", "sampled": "sampled-partitions"}
_CHECKS = {"1": "theorem1", "2": "theorem2", "3": "theorem3", "lemmas": "lemmas", "oracles": "oracles"}
_KIND_LABEL = {
    DictatorKind.PLAIN: "elected dictatorship",
    DictatorKind.EPISTEMIC: "elected epistemic dictatorship",
    DictatorKind.SEMI_EPISTEMIC: "elected semi-epistemic dictatorship",
}


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _ordered(m: Mechanism, nodes) -> list[str]:
    return sorted(nodes, key=m.index.__getitem__)


def _braces(items) -> str:
    return "{" + ", ".join(items) + "}"


def _read_text(args) -> str:
    if args.example and args.input:
        raise InputError("give either a file or --example, not both")
    if args.example:
        return examples.example_text(args.example)
    if not args.input:
        raise InputError("no input: give a file, '-' for standard input, or --example NAME")
    if args.input == "-":
        return sys.stdin.read()
    try:
        with open(args.input, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from exc


def _load(args) -> Mechanism:
    return validate(parse(_read_text(args)))


# -- subcommands -----------------------------------------------------------


def cmd_validate(args, out) -> int:
    text = _read_text(args)
    try:
        m = validate(parse(text))
    except ParseError as exc:
        problems = [f"line {i.line}: {i.message}" for i in exc.issues]
        kinds = ["SyntaxError"] * len(problems)
    except MechanismError as exc:
        problems = [str(i) for i in exc.issues]
        kinds = [i.kind for i in exc.issues]
    else:
        info = {
            "valid": True,
            "name": m.name,
            "agents": list(m.agents),
            "nodes": len(m.nodes),
            "decision_nodes": len(m.decision_nodes),
            "perfect_information": m.is_perfect_information,
        }
        if args.format == "json":
            out.write(_dump(info))
        else:
            kind = "perfect" if m.is_perfect_information else "imperfect"
            label = f" {m.name}" if m.name else ""
            agents = f"{len(m.agents)} agent" + ("s" if len(m.agents) != 1 else "")
            out.write(f"valid{label}: {len(m.nodes)} nodes, {agents}, {kind} information\n")
        return EXIT_OK
    if args.format == "json":
        out.write(_dump({"valid": False, "issues": [{"kind": k, "message": p} for k, p in zip(kinds, problems)]}))
    else:
        out.write("invalid:\n" + "".join(f"  {p}\n" for p in problems))
    return EXIT_INPUT


def cmd_solve(args, out) -> int:
    m = _load(args)
    s = solve(m, args.agent, args.outcome, args.semantics, witnesses=args.witnesses)
    nodes = _ordered(m, s.nodes)
    if args.format == "json":
        doc = {"agent": s.agent, "outcome": str(s.outcome), "semantics": str(s.semantics), "nodes": nodes}
        if s.witnesses is not None:
            doc["witnesses"] = {v: {"rule": w.rule, "action": w.action} for v, w in s.witnesses.items()}
        out.write(_dump(doc))
        return EXIT_OK
    out.write(f"{s.semantics}_{s.agent}({s.outcome}) = {_braces(nodes)}\n")
    if s.witnesses is not None:
        for v in _ordered(m, s.witnesses):
            w = s.witnesses[v]
            how = f"action {w.action}" if w.rule == 2 else "every child inside"
            out.write(f"  {v}: {how}\n")
    return EXIT_OK


def cmd_gaps(args, out) -> int:
    m = _load(args)
    rep = report(m, args.semantics)
    gap = _ordered(m, rep.gap)
    if args.format == "json":
        doc = {
            "semantics": str(rep.semantics),
            "gap": gap,
            "gap_free": rep.gap_free,
            "responsible": {leaf: rep.responsible_agents(leaf) for leaf in m.leaves},
        }
        out.write(_dump(doc))
    else:
        out.write(f"{rep.semantics} gap: {_braces(gap)}\n")
        for leaf in m.leaves:
            who = rep.responsible_agents(leaf)
            out.write(f"  {leaf} ({m.label(leaf)}): {', '.join(who) if who else 'nobody responsible'}\n")
    return EXIT_FINDINGS if args.strict and gap else EXIT_OK


def cmd_classify(args, out) -> int:
    m = _load(args)
    c = classify(m)
    if args.format == "json":
        doc = {
            "elected": {str(k): c.elected[k] for k in KINDS},
            "witnesses": {str(k): [{"agent": a, "node": v} for a, v in c.dictators(k)] for k in KINDS},
            "dictators": {
                v: sorted(f"{a}:{k}" for a, k in c.per_node[v]) for v in m.decision_nodes if c.per_node[v]
            },
        }
        out.write(_dump(doc))
        return EXIT_OK
    for k in KINDS:
        if c.elected[k]:
            who = ", ".join(f"{a} @ {v}" for a, v in c.dictators(k))
            out.write(f"{_KIND_LABEL[k]}: yes ({who})\n")
        else:
            out.write(f"{_KIND_LABEL[k]}: no\n")
    rows = [(v, c.per_node[v]) for v in m.decision_nodes if c.per_node[v]]
    if rows:
        out.write("dictators by node:\n")
        for v, entries in rows:
            by_agent: dict[str, list[str]] = {}
            for a, k in sorted(entries, key=lambda e: (m.agents.index(e[0]), KINDS.index(e[1]))):
                by_agent.setdefault(a, []).append(str(k))
            desc = "; ".join(f"{a} ({', '.join(ks)})" for a, ks in by_agent.items())
            out.write(f"  {v}: {desc}\n")
    else:
        out.write("no dictator at any node\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    check = _CHECKS[args.theorem]
    partitions = args.partitions or ("perfect-only" if check == "theorem1" else "exhaustive")
    mode = args.mode or ("sampled" if args.samples else "exhaustive")
    try:
        config = EnumerationConfig(
            max_depth=args.max_depth,
            max_children=args.max_children,
            agent_count=args.agents,
            max_actions=args.max_actions,
            partition_mode=_PARTITIONS[partitions],
            mode=mode,
            sample_count=args.samples or 0,
            seed=args.seed,
            max_decision_nodes=args.max_decision_nodes,
            cap=args.cap,
        )
        rep = verify(check, config, jobs=args.jobs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out.write(rep.to_json(args.timing) if args.format == "json" else rep.to_text(args.timing))
    return EXIT_OK if rep.ok else EXIT_FINDINGS


def cmd_examples(args, out) -> int:
    if args.action == "show":
        if not args.name:
            raise InputError("examples show needs a NAME")
        out.write(examples.example_text(args.name))
        return EXIT_OK
    if args.format == "json":
        out.write(_dump([{"name": n, "description": examples.describe(n)} for n in examples.NAMES]))
    else:
        width = max(map(len, examples.NAMES))
        for n in examples.NAMES:
            out.write(f"{n:<{width}}  {examples.describe(n)}\n")
    return EXIT_OK


def cmd_dot(args, out) -> int:
    out.write(export_dot(_load(args)))
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="mechanism file, or '-' for standard input")
    p.add_argument("--example", metavar="NAME", choices=examples.NAMES, help="use a bundled example")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(
        prog="respgap",
        description="Strategy sets, responsibility gaps and dictatorships in binary decision mechanisms.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common], help="check a mechanism file")
    _input_args(p)
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("solve", parents=[common], help="compute a strategy set")
    _input_args(p)
    p.add_argument("--agent", required=True)
    p.add_argument("--outcome", required=True, choices=("Yes", "No"))
    p.add_argument("--semantics", choices=("win", "uwin", "ewin"), default="win")
    p.add_argument("--witnesses", action="store_true", help="explain each member")
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("gaps", parents=[common], help="responsibility at leaves and the gap set")
    _input_args(p)
    p.add_argument("--semantics", choices=("counterfactual", "epistemic"), default="counterfactual")
    p.add_argument("--strict", action="store_true", help="exit 1 if the gap is non-empty")
    p.set_defaults(run=cmd_gaps)

    p = sub.add_parser("classify", parents=[common], help="dictators and elected dictatorships")
    _input_args(p)
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="bounded verification over enumerated mechanisms")
    p.add_argument("--theorem", required=True, choices=tuple(_CHECKS))
    p.add_argument("--max-depth", type=int, default=2)
    p.add_argument("--max-children", type=int, default=2)
    p.add_argument("--agents", type=int, default=2)
    p.add_argument("--max-actions", type=int, default=2)
    p.add_argument("--max-decision-nodes", type=int, default=None)
    p.add_argument("--partitions", choices=tuple(_PARTITIONS), default=None,
                   help="default: perfect-only for theorem 1, exhaustive otherwise")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=10**7)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall time (output no longer reproducible)")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("examples", parents=[common], help="list or print bundled examples")
    p.add_argument("action", nargs="?", choices=("list", "show"), default="list")
    p.add_argument("name", nargs="?", choices=examples.NAMES)
    p.set_defaults(run=cmd_examples)

    p = sub.add_parser("dot", help="export Graphviz DOT")
    _input_args(p)
    p.set_defaults(run=cmd_dot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, sys.stdout)
    except BudgetExceeded as exc:
        print(f"respgap: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ParseError, MechanismError, RespgapError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"respgap: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
