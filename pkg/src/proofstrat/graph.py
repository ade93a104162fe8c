"""Strategy graphs: tactic nodes joined by goal-type labelled wires.

A wire runs from a node output port to a node input port.  A missing
source makes it an input boundary wire, a missing target an output
boundary wire.  A wire whose source and target are the same node is a
feedback wire; such a node is *looped*.  Goal nodes sit on wires and hold
the goals travelling along them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .goaltypes import GoalType
from .kernel import TacticApp
from .util import FrozenDict


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class LabelVar:
    """Goal-type variable; matches any goal."""

    name: str

    def __str__(self):
        return f"var {self.name}"


WireLabel = Union[GoalType, LabelVar]


@dataclass(frozen=True)
class Wire:
    id: str
    src: Optional[tuple]  # (node id, port) or None for the input boundary
    dst: Optional[tuple]  # (node id, port) or None for the output boundary
    label: WireLabel

    @property
    def feedback(self) -> bool:
        return self.src is not None and self.dst is not None and self.src[0] == self.dst[0]


@dataclass(frozen=True)
class AtomicTactic:
    tactic: TacticApp

    def __str__(self):
        return str(self.tactic)


@dataclass(frozen=True)
class GraphTactic:
    name: str
    children: tuple

    def __post_init__(self):
        if not self.children:
            raise GraphError(f"graph tactic {self.name} needs a child graph")

    def __str__(self):
        return f"graph {self.name}"


@dataclass(frozen=True)
class GoalNode:
    wire: str
    goals: tuple


Node = Union[AtomicTactic, GraphTactic]


@dataclass(frozen=True)
class StrategyGraph:
    nodes: FrozenDict = field(default_factory=FrozenDict)
    wires: FrozenDict = field(default_factory=FrozenDict)
    inputs: tuple = ()
    outputs: tuple = ()
    goal_nodes: tuple = ()

    def __init__(self, nodes=None, wires=None, inputs=(), outputs=(), goal_nodes=()):
        if wires is not None and not isinstance(wires, (dict, FrozenDict)):
            wires = {w.id: w for w in wires}
        object.__setattr__(self, "nodes", FrozenDict(nodes or {}))
        object.__setattr__(self, "wires", FrozenDict(wires or {}))
        object.__setattr__(self, "inputs", tuple(inputs))
        object.__setattr__(self, "outputs", tuple(outputs))
        object.__setattr__(self, "goal_nodes", tuple(goal_nodes))

    # -- queries --
    def node_ids(self) -> list:
        return list(self.nodes)

    def in_wires(self, nid: str) -> list:
        return [w for w in self.wires.values() if w.dst is not None and w.dst[0] == nid]

    def out_wires(self, nid: str) -> list:
        """Outgoing wires by port; a feedback wire precedes its sibling."""
        ws = [w for w in self.wires.values() if w.src is not None and w.src[0] == nid]
        return sorted(ws, key=lambda w: (w.src[1], not w.feedback))

    def entry_wires(self, nid: str) -> list:
        return [w for w in self.in_wires(nid) if not w.feedback]

    def exit_wires(self, nid: str) -> list:
        return [w for w in self.out_wires(nid) if not w.feedback]

    def feedback_wire(self, nid: str) -> Optional[Wire]:
        for w in self.out_wires(nid):
            if w.feedback:
                return w
        return None

    def is_looped(self, nid: str) -> bool:
        return self.feedback_wire(nid) is not None

    def is_plain(self, nid: str) -> bool:
        """Not looped, one entry wire, at most one exit wire."""
        return (not self.is_looped(nid) and len(self.in_wires(nid)) == 1
                and len(self.out_wires(nid)) <= 1)

    def successor(self, nid: str) -> Optional[str]:
        ex = self.exit_wires(nid)
        if len(ex) == 1 and ex[0].dst is not None:
            return ex[0].dst[0]
        return None

    def order(self) -> dict:
        """Topological-ish rank of nodes (feedback wires ignored), ties by insertion."""
        ids = list(self.nodes)
        indeg = {n: 0 for n in ids}
        for w in self.wires.values():
            if w.src and w.dst and not w.feedback:
                indeg[w.dst[0]] += 1
        rank, ready = {}, [n for n in ids if indeg[n] == 0]
        pos = {n: i for i, n in enumerate(ids)}
        while ready:
            ready.sort(key=pos.get)
            n = ready.pop(0)
            rank[n] = len(rank)
            for w in self.out_wires(n):
                if w.dst and not w.feedback:
                    indeg[w.dst[0]] -= 1
                    if indeg[w.dst[0]] == 0:
                        ready.append(w.dst[0])
        for n in ids:  # cycles through non-feedback wires
            rank.setdefault(n, len(rank))
        return rank

    def tactic_count(self) -> int:
        return len(self.nodes)

    # -- edits --
    def replace(self, **kw) -> "StrategyGraph":
        args = dict(nodes=self.nodes, wires=self.wires, inputs=self.inputs,
                    outputs=self.outputs, goal_nodes=self.goal_nodes)
        args.update(kw)
        return StrategyGraph(**args)

    def without_goals(self) -> "StrategyGraph":
        return self.replace(goal_nodes=())

    def validate(self):
        for w in self.wires.values():
            for end in (w.src, w.dst):
                if end is not None and end[0] not in self.nodes:
                    raise GraphError(f"wire {w.id} references unknown node {end[0]}")
        for wid in self.inputs:
            if self.wires[wid].src is not None:
                raise GraphError(f"input {wid} has a source")
        for wid in self.outputs:
            if self.wires[wid].dst is not None:
                raise GraphError(f"output {wid} has a target")
        dangling = {w.id for w in self.wires.values() if w.src is None} - set(self.inputs)
        dangling |= {w.id for w in self.wires.values() if w.dst is None} - set(self.outputs)
        if dangling:
            raise GraphError(f"boundary wires missing from the interface: {sorted(dangling)}")
        for gn in self.goal_nodes:
            if gn.wire not in self.wires:
                raise GraphError(f"goal node on unknown wire {gn.wire}")
        return self


def tactic_signature(graph: StrategyGraph, nid: str):
    """Input label and output labels read off the wires around ``nid``.

    A looped node reports its entry label and, per port, the feedback label
    followed by the exit label.
    """
    entries = graph.entry_wires(nid)
    if len(entries) != 1:
        raise GraphError(f"node {nid} has {len(entries)} entry wires")
    return entries[0].label, [w.label for w in graph.out_wires(nid)]


def nominal_outputs(tac: TacticApp, theory) -> int:
    """Output count of an atomic tactic: 2 for conditional rewriting, else 1."""
    if tac.kind == "subst":
        eqs = theory.equations(tac.arg.names)
        return 2 if any(e.condition is not None for e in eqs) else 1
    return 1


# -- DOT ---------------------------------------------------------------------

def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def abbreviate(label) -> str:
    if isinstance(label, LabelVar):
        return label.name
    from .lattice import format_data
    parts = []
    for (name, r1, r2), d in label.link.entries.items():
        parts.append(f"{name}({r1},{r2})={format_data(d)}")
    facts = ",".join(label.fact_labels)
    return "{" + facts + "} " + " ".join(parts)


def to_dot(graph: StrategyGraph, name: str = "strategy") -> str:
    lines = [f"digraph {name} {{", "  rankdir=TB;"]
    _dot_body(graph, lines, "", "  ")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_body(graph: StrategyGraph, lines: list, prefix: str, ind: str):
    for nid, node in graph.nodes.items():
        key = prefix + nid
        if isinstance(node, GraphTactic):
            lines.append(f'{ind}"{key}" [shape=box, style=rounded, label="{_dot_escape(nid + ": " + str(node))}"];')
            for i, child in enumerate(node.children):
                lines.append(f'{ind}subgraph "cluster_{key}_{i}" {{')
                lines.append(f'{ind}  label="{_dot_escape(node.name)}";')
                _dot_body(child, lines, f"{key}/{i}/", ind + "  ")
                lines.append(f"{ind}}}")
        else:
            lines.append(f'{ind}"{key}" [shape=box, label="{_dot_escape(nid + ": " + str(node))}"];')
    for w in graph.wires.values():
        src = f'"{prefix}{w.src[0]}"' if w.src else f'"{prefix}in:{w.id}"'
        dst = f'"{prefix}{w.dst[0]}"' if w.dst else f'"{prefix}out:{w.id}"'
        for end, tag in ((w.src, "in"), (w.dst, "out")):
            if end is None:
                lines.append(f'{ind}"{prefix}{tag}:{w.id}" [shape=point];')
        style = ", style=dashed, constraint=false" if w.feedback else ""
        label = _dot_escape(f"{w.id} {abbreviate(w.label)}")
        lines.append(f'{ind}{src} -> {dst} [label="{label}"{style}];')
