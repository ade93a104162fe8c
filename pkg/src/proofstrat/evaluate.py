"""Lifting tactics to goal types and evaluating strategy graphs.

Evaluation moves goal nodes along wires.  One step either deletes an empty
goal node, splits a goal node into singletons, or feeds the head goal of
the first ready goal node to the tactic at the end of its wire.  Search
over the alternatives is depth first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

from .goaltypes import (CONCL, Goal, goal_has_type, match_class,
                        match_link_feature)
from .graph import AtomicTactic, GoalNode, LabelVar, StrategyGraph
from .kernel import ProofState, TacticApp, Theory, hypothesis_label, run_tactic

DEFAULT_BUDGET = 10_000


class LiftError(ValueError):
    def __init__(self, step: int, message: str):
        super().__init__(f"lift failed at step {step}: {message}")
        self.step = step


class BudgetExhausted(RuntimeError):
    pass


def unlift(g: Goal) -> ProofState:
    return g.ps


def lift_one(ps: ProofState, g: Optional[Goal], G, new_facts=()) -> Goal:
    """Lift ``ps`` into a goal of type ``G`` whose parent is ``g``."""
    parent = () if g is None else (g,)
    pool = frozenset(new_facts) | (g.facts() if g is not None else frozenset())
    if isinstance(G, LabelVar):
        fmap = dict(g.fmap) if g is not None else {}
        return Goal(fmap, ps, parent)
    # 1. conclusion
    if not match_class(G.concl, ps.concl):
        raise LiftError(1, "conclusion does not match the concl class")
    # 2. facts
    fmap = {}
    for c in G.facts:
        fmap[c.label] = {e for e in pool if match_class(c, e)}
        if not fmap[c.label]:
            raise LiftError(2, f"no fact for class {c.label}")
    # 3. links: keep only captured elements, to a fixpoint
    changed = True
    while changed:
        changed = False
        for (name, r1, r2), d in G.link.entries.items():
            side = {r: ({ps.concl} if r == CONCL else fmap.get(r)) for r in (r1, r2)}
            s1, s2 = side[r1], side[r2]
            if not s1 or not s2:
                raise LiftError(3, f"link {name}({r1},{r2}) refers to an empty class")
            k1 = {a for a in s1 if any(match_link_feature(name, d, a, b) for b in s2)}
            k2 = {b for b in s2 if any(match_link_feature(name, d, a, b) for a in s1)}
            if not k1 or not k2:
                raise LiftError(3, f"no witness for link {name}({r1},{r2})")
            for r, kept, full in ((r1, k1, s1), (r2, k2, s2)):
                if kept != full:
                    if r == CONCL:
                        raise LiftError(3, f"conclusion not captured by {name}({r1},{r2})")
                    fmap[r] = kept
                    changed = True
    goal = Goal(fmap, ps, parent)
    if not goal_has_type(goal, G):
        raise LiftError(3, "lifted goal does not have the target type")
    return goal


def initial_goal(ps: ProofState, G) -> Goal:
    """Type the hypotheses of ``ps`` against ``G`` to make a root goal."""
    if isinstance(G, LabelVar):
        fmap = {}
        for n, t in ps.hyps.items():
            fmap.setdefault(hypothesis_label(n), set()).add(t)
        return Goal(fmap, ps)
    return lift_one(ps, None, G, new_facts=ps.hyps.values())


def try_lift(ps: ProofState, g: Optional[Goal], G, new_facts=()) -> Optional[Goal]:
    try:
        return lift_one(ps, g, G, new_facts)
    except LiftError:
        return None


def lp(betas: Sequence, states: Sequence[ProofState], g: Goal) -> list:
    """All type-correct ways to route ``states`` into the output types.

    Each result is a tuple holding one goal list per entry of ``betas``.
    """
    options = []
    for ps in states:
        opts = []
        for i, b in enumerate(betas):
            lifted = try_lift(ps, g, b)
            if lifted is not None:
                opts.append((i, lifted))
        if not opts:
            return []
        options.append(opts)
    out, seen = [], set()
    for choice in product(*options):
        lists = [[] for _ in betas]
        for i, goal in choice:
            lists[i].append(goal)
        key = tuple(tuple(l) for l in lists)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def lift_tactic(tac: TacticApp, alpha, betas: Sequence, theory: Theory):
    """``g -> [partition, ...]``; empty when ``g`` is not of type ``alpha``."""
    def lifted(g: Goal) -> list:
        if not goal_has_type(g, alpha):
            return []
        out = []
        for states in run_tactic(theory, tac, unlift(g), fmap=g.fmap):
            for part in lp(betas, states, g):
                if part not in out:
                    out.append(part)
        return out
    return lifted


# -- evaluation ---------------------------------------------------------------

@dataclass(frozen=True)
class Application:
    node: str
    tactic: TacticApp
    consumed: Goal
    produced: tuple

    def __str__(self):
        return f"{self.node}: {self.tactic}"


@dataclass(frozen=True)
class EvalResult:
    status: str  # proved | open | stuck
    open_goals: tuple
    transcript: tuple
    steps: int = 0

    @property
    def proved(self) -> bool:
        return self.status == "proved"


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.steps = 0

    def tick(self):
        self.steps += 1
        if self.steps > self.limit:
            raise BudgetExhausted(f"step budget of {self.limit} exhausted")


def place(graph: StrategyGraph, goal: Goal, wire: Optional[str] = None) -> StrategyGraph:
    wire = wire or graph.inputs[0]
    return graph.replace(goal_nodes=graph.goal_nodes + (GoalNode(wire, (goal,)),))


def _ready(graph: StrategyGraph) -> Optional[int]:
    rank = graph.order()
    best = None
    for i, gn in enumerate(graph.goal_nodes):
        dst = graph.wires[gn.wire].dst
        if dst is None:
            continue
        key = (rank[dst[0]], i)
        if best is None or key < best[0]:
            best = (key, i)
    return None if best is None else best[1]


def _route(graph: StrategyGraph, nid: str, port: int, goals) -> list:
    """Ways to send finished goals out of ``port`` by type, feedback first."""
    wires = [w for w in graph.out_wires(nid) if w.src[1] == port]
    options = []
    for goal in goals:
        opts = [w.id for w in wires if goal_has_type(goal, w.label)]
        if not opts:
            return []
        options.append(opts)
    return list(product(*options))


def _emit(graph: StrategyGraph, drop: int, placed: dict) -> StrategyGraph:
    nodes = [gn for i, gn in enumerate(graph.goal_nodes) if i != drop]
    for wid, goals in placed.items():
        if goals:
            nodes.append(GoalNode(wid, tuple(goals)))
    return graph.replace(goal_nodes=tuple(nodes))


def _successors(graph: StrategyGraph, tr: tuple, theory: Theory, budget: _Budget):
    gns = graph.goal_nodes
    for i, gn in enumerate(gns):
        if not gn.goals:
            yield graph.replace(goal_nodes=gns[:i] + gns[i + 1:]), tr
            return
    for i, gn in enumerate(gns):
        if len(gn.goals) > 1:
            split = tuple(GoalNode(gn.wire, (g,)) for g in gn.goals)
            yield graph.replace(goal_nodes=gns[:i] + split + gns[i + 1:]), tr
            return
    i = _ready(graph)
    if i is None:
        return
    gn = gns[i]
    wire = graph.wires[gn.wire]
    nid = wire.dst[0]
    node = graph.nodes[nid]
    goal = gn.goals[0]
    if isinstance(node, AtomicTactic):
        outs = graph.out_wires(nid)
        lifted = lift_tactic(node.tactic, wire.label, [w.label for w in outs], theory)
        for part in lifted(goal):
            placed = {}
            for w, goals in zip(outs, part):
                placed.setdefault(w.id, []).extend(goals)
            app = Application(nid, node.tactic, goal, part)
            yield _emit(graph, i, placed), tr + (app,)
        return
    for child in node.children:
        start = child.inputs[0]
        if not goal_has_type(goal, child.wires[start].label):
            continue
        for done, ctr in _search(place(child.without_goals(), goal, start), theory, budget, tr):
            per_port = {}
            for cgn in done.goal_nodes:
                port = child.outputs.index(cgn.wire)
                per_port.setdefault(port, []).extend(cgn.goals)
            ports = sorted(per_port)
            routes = [_route(graph, nid, p, per_port[p]) for p in ports]
            for combo in product(*routes):
                placed = {}
                for p, wids in zip(ports, combo):
                    for goal2, wid in zip(per_port[p], wids):
                        placed.setdefault(wid, []).append(goal2)
                yield _emit(graph, i, placed), ctr


def _terminal(graph: StrategyGraph) -> bool:
    return all(graph.wires[gn.wire].dst is None for gn in graph.goal_nodes)


def _search(graph: StrategyGraph, theory: Theory, budget: _Budget, tr: tuple = ()):
    stack = [iter([(graph, tr)])]
    while stack:
        try:
            g, t = next(stack[-1])
        except StopIteration:
            stack.pop()
            continue
        budget.tick()
        if _terminal(g):
            yield g, t
            continue
        stack.append(_successors(g, t, theory, budget))


def eval_step(graph: StrategyGraph, theory: Theory) -> list:
    """Every successor of ``graph`` under one evaluation step."""
    return [g for g, _ in _successors(graph, (), theory, _Budget(float("inf")))]


def evaluate(graph: StrategyGraph, initial, theory: Theory,
             budget: int = DEFAULT_BUDGET) -> EvalResult:
    """Run ``initial`` (a Goal or ProofState) through ``graph``."""
    label = graph.wires[graph.inputs[0]].label
    if isinstance(initial, ProofState):
        initial = initial_goal(initial, label)
    elif not goal_has_type(initial, label):
        raise LiftError(0, "initial goal does not have the input type")
    b = _Budget(budget)
    for done, tr in _search(place(graph.without_goals(), initial), theory, b):
        goals = tuple(g for gn in done.goal_nodes for g in gn.goals)
        status = "open" if goals else "proved"
        return EvalResult(status, goals, tr, b.steps)
    return EvalResult("stuck", (), (), b.steps)
