"""Command line: check, generalise, eval and lattice."""

from __future__ import annotations

import argparse
import os
import sys

from .evaluate import DEFAULT_BUDGET, BudgetExhausted, LiftError, evaluate
from .generalise import generalise_pipeline
from .goaltypes import (GoalClass, GoalType, class_join, class_meet,
                        class_orthogonal, class_subtype, gen_goal_type, gt_meet,
                        gt_orthogonal, gt_subtype)
from .graph import to_dot
from .kernel import KernelError, ReplayError, replay_script
from .lattice import canon, format_data, is_bottom, join_f, meet_f
from .terms import print_term
from .textio import (ParseError, format_class, format_goal_type, format_state,
                     format_strategy, load_strategy, load_theory, parse_class,
                     parse_data, parse_goal_type)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PIPELINE, EXIT_BUDGET = 0, 1, 2, 3, 4


def _err(msg: str):
    print(f"error: {msg}", file=sys.stderr)


def _load(path, conj, script=None):
    th = load_theory(path)
    if conj not in th.conjectures:
        raise ParseError(f"unknown conjecture {conj!r}")
    if script is not None and script not in th.scripts:
        raise ParseError(f"unknown script {script!r}")
    return th


def _concls(states) -> str:
    return "[" + ", ".join(print_term(s.concl) for s in states) + "]"


def cmd_check(args) -> int:
    try:
        th = _load(args.theory, args.conjecture, args.script)
    except (ParseError, OSError) as e:
        _err(e)
        return EXIT_PARSE
    tactics = th.scripts[args.script][1]
    conj = th.conjectures[args.conjecture]
    print(f"conjecture {conj.name}: {format_state(conj.state)}")
    try:
        trace = replay_script(th, args.conjecture, tactics)
    except ReplayError as e:
        print(f"failed: {e}")
        if e.goal is not None:
            print(f"  goal: {print_term(e.goal.concl)}")
        return EXIT_FAIL
    except KernelError as e:
        _err(e)
        return EXIT_PARSE
    frontier = [trace.root]
    for i, node in enumerate(trace.nodes(), 1):
        frontier = list(node.children) + frontier[1:]
        print(f"step {i}: {node.tactic}")
        print(f"  {_concls(n.state for n in frontier)}")
    print(f"proved in {len(trace)} steps")
    return EXIT_OK


def cmd_generalise(args) -> int:
    try:
        th = _load(args.theory, args.conjecture, args.script)
    except (ParseError, OSError) as e:
        _err(e)
        return EXIT_PARSE
    try:
        trace = replay_script(th, args.conjecture, th.scripts[args.script][1])
    except ReplayError as e:
        print(f"failed: {e}")
        return EXIT_FAIL
    try:
        result = generalise_pipeline(trace, nest=args.nest)
    except Exception as e:  # any pipeline failure maps to one exit code
        _err(f"generalisation failed: {e}")
        return EXIT_PIPELINE
    os.makedirs(args.outdir, exist_ok=True)
    log = []
    for i, step in enumerate(result.steps):
        stem = os.path.join(args.outdir, f"step-{i:03d}")
        with open(stem + ".strat", "w", encoding="utf-8") as fh:
            fh.write(format_strategy(step.graph))
        with open(stem + ".dot", "w", encoding="utf-8") as fh:
            fh.write(to_dot(step.graph))
        log.append(f"step-{i:03d} {step.kind} {step.detail}".rstrip())
    with open(os.path.join(args.outdir, "strategy.strat"), "w", encoding="utf-8") as fh:
        fh.write(format_strategy(result.graph))
    with open(os.path.join(args.outdir, "strategy.dot"), "w", encoding="utf-8") as fh:
        fh.write(to_dot(result.graph))
    with open(os.path.join(args.outdir, "steps.log"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(log) + "\n")
    for line in log:
        print(line)
    print(f"strategy: {len(result.graph.nodes)} top-level nodes")
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        th = _load(args.theory, args.conjecture)
        graph = load_strategy(args.strategy)
    except (ParseError, OSError) as e:
        _err(e)
        return EXIT_PARSE
    conj = th.conjectures[args.conjecture]
    try:
        res = evaluate(graph, conj.state, th, budget=args.budget)
    except LiftError as e:
        print(f"not applicable: {e}")
        return EXIT_FAIL
    except BudgetExhausted as e:
        print(f"budget exhausted: {e}")
        return EXIT_BUDGET
    for i, app in enumerate(res.transcript, 1):
        print(f"{i}. {app.tactic}  on  {print_term(app.consumed.concl)}")
    print(f"{res.status} after {len(res.transcript)} tactic applications")
    for g in res.open_goals:
        print(f"  open: {print_term(g.concl)}")
    return EXIT_OK if res.proved else EXIT_FAIL


def _operand(text: str, feature):
    t = text.strip()
    if t.startswith("gt"):
        return parse_goal_type(t)
    if t.startswith("{"):
        return parse_class(t)
    return parse_data(t, feature)


_CLASS_OPS = {"meet": class_meet, "join": class_join, "gen": class_join,
              "orthogonal": class_orthogonal, "subtype": class_subtype}
_GT_OPS = {"meet": gt_meet, "join": gen_goal_type, "gen": gen_goal_type,
           "orthogonal": gt_orthogonal, "subtype": gt_subtype}


def lattice_op(op: str, operands: list) -> str:
    """Evaluate one lattice operation given textual operands."""
    feature = None
    if len(operands) == 3:
        feature, operands = operands[0], operands[1:]
    if len(operands) != 2:
        raise ParseError("expected two operands")
    x, y = (_operand(o, feature) for o in operands)
    if type(x) is not type(y):
        raise ParseError("operands are of different sorts")
    if isinstance(x, GoalType):
        r = _GT_OPS[op](x, y)
    elif isinstance(x, GoalClass):
        r = _CLASS_OPS[op](x, y)
    else:
        x, y = canon(x, feature), canon(y, feature)
        r = {"meet": lambda: meet_f(x, y, feature),
             "join": lambda: join_f(x, y, feature),
             "gen": lambda: join_f(x, y, feature),
             "orthogonal": lambda: is_bottom(meet_f(x, y, feature)),
             "subtype": lambda: meet_f(x, y, feature) == x}[op]()
    if isinstance(r, bool):
        return "true" if r else "false"
    if isinstance(r, GoalType):
        return format_goal_type(r)
    if isinstance(r, GoalClass):
        return format_class(r)
    return format_data(r)


def cmd_lattice(args) -> int:
    try:
        print(lattice_op(args.op, args.operands))
    except (ParseError, ValueError) as e:
        _err(e)
        return EXIT_PARSE
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="proofstrat", description="Replay, generalise and evaluate proof strategies.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="replay a script on a conjecture")
    c.add_argument("theory")
    c.add_argument("conjecture")
    c.add_argument("script")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("generalise", help="turn a replayed script into a strategy")
    g.add_argument("theory")
    g.add_argument("conjecture")
    g.add_argument("script")
    g.add_argument("outdir")
    g.add_argument("--nest", action="store_true",
                   help="allow nesting of tactics that do not generalise")
    g.set_defaults(func=cmd_generalise)

    e = sub.add_parser("eval", help="run a strategy on a conjecture")
    e.add_argument("theory")
    e.add_argument("conjecture")
    e.add_argument("strategy")
    e.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    e.set_defaults(func=cmd_eval)

    la = sub.add_parser("lattice", help="meet, join, orthogonal or subtype")
    la.add_argument("op", choices=["meet", "join", "gen", "orthogonal", "subtype"])
    la.add_argument("operands", nargs="+",
                    help="[FEATURE] X Y, each a data list, a {class} or a gt {...}")
    la.set_defaults(func=cmd_lattice)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
