"""From a replayed proof to a reusable strategy graph.

The pipeline labels a trace-shaped graph with derived goal types, folds
repeated tactics into loops, wraps repeated adjacent segments into graph
tactics, fuses those by gluing along their largest common subgraph, and
folds again.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .goaltypes import (CONCL, GoalClass, GoalType, Link,
                        gen_goal_type, gt_orthogonal, gt_subtype)
from .graph import (AtomicTactic, GraphTactic, LabelVar, StrategyGraph, Wire)
from .kernel import (ClassRef, ProofState, ProofTrace, RuleRefs, TacticApp,
                     hypothesis_label)
from .lattice import (BOT, HAS_SYMBOL, IS_MATCH, SYMB_AT_POS, TOP_SYMBOL, Bool,
                      Pos, Sym, data)
from .terms import (Term, leaf_positions, operator_symbols, positions,
                    top_symbol_of)


class DerivationError(ValueError):
    pass


class LayeringError(ValueError):
    pass


class PushoutError(ValueError):
    pass


# -- goal-type derivation -----------------------------------------------------

def derive_class(label: str, t: Term) -> GoalClass:
    ops = operator_symbols(t)
    has = [[Sym(s) for s in ops]] if ops else [[BOT]]
    return GoalClass(label, {TOP_SYMBOL: data([[Sym(top_symbol_of(t))]], TOP_SYMBOL),
                             HAS_SYMBOL: data(has, HAS_SYMBOL)})


def first_common_position(e1: Term, e2: Term):
    """Leftmost-outermost leaf position holding the same atom in both terms."""
    shared = leaf_positions(e1) & leaf_positions(e2)
    if not shared:
        return None
    keys = {p for p, _ in shared}
    for p in positions(e1):
        if p in keys:
            return p
    return None


def derive_link(concl: Term, facts: dict) -> Link:
    entries = {}
    for label, t in facts.items():
        p = first_common_position(concl, t)
        entries[(SYMB_AT_POS, CONCL, label)] = data([[BOT if p is None else Pos(p)]], SYMB_AT_POS)
        entries[(IS_MATCH, CONCL, label)] = data([[Bool(concl == t)]], IS_MATCH)
    return Link(entries)


def derive_goal_type(ps: ProofState) -> GoalType:
    """The most specific goal type of ``ps``: one class per hypothesis."""
    facts, classes = {}, {}
    for name in sorted(ps.hyps):
        label = hypothesis_label(name)
        cls = derive_class(label, ps.hyps[name])
        if label in classes:
            raise DerivationError(f"hypotheses share the class label {label}")
        classes[label] = cls
        facts[label] = ps.hyps[name]
    return GoalType(derive_class(CONCL, ps.concl), classes.values(),
                    derive_link(ps.concl, facts))


def generalise_tactic_args(tac: TacticApp, ps: ProofState) -> TacticApp:
    """Replace hypothesis names in a ``rule`` argument with their class."""
    if tac.kind != "rule" or not isinstance(tac.arg, RuleRefs):
        return tac
    hyps = [n for n in sorted(tac.arg.names) if n in ps.hyps]
    if len(hyps) == 1 and len(tac.arg.names) == 1:
        return TacticApp("rule", ClassRef(hypothesis_label(hyps[0])))
    return tac


def trace_to_graph(trace: ProofTrace) -> StrategyGraph:
    nodes, wires = {}, {}
    ids = {}
    for i, tn in enumerate(trace.nodes(), 1):
        ids[id(tn)] = f"t{i}"
    counter = [0]

    def wire(src, dst, ps):
        counter[0] += 1
        wid = f"w{counter[0]}"
        wires[wid] = Wire(wid, src, dst, derive_goal_type(ps))
        return wid

    root = trace.root
    first = wire(None, (ids[id(root)], 0), root.state)
    for tn in trace.nodes():
        nid = ids[id(tn)]
        nodes[nid] = AtomicTactic(generalise_tactic_args(tn.tactic, tn.state))
        for port, child in enumerate(tn.children):
            wire((nid, port), (ids[id(child)], 0), child.state)
    return StrategyGraph(nodes, wires, (first,), ())


# -- tactic generalisation ----------------------------------------------------

def _nest(t) -> StrategyGraph:
    body = StrategyGraph({"n1": t}, {"i": Wire("i", None, ("n1", 0), LabelVar("a")),
                                     "o": Wire("o", ("n1", 0), None, LabelVar("b"))},
                         ("i",), ("o",))
    return body


def gen_tactic(t1, t2, nest: bool = False):
    """Generalise two tactic nodes; ``None`` when they do not generalise."""
    if isinstance(t1, AtomicTactic) and isinstance(t2, AtomicTactic):
        a, b = t1.tactic, t2.tactic
        if a.kind == b.kind:
            if isinstance(a.arg, RuleRefs) and isinstance(b.arg, RuleRefs):
                return AtomicTactic(TacticApp(a.kind, RuleRefs(a.arg.names | b.arg.names)))
            if isinstance(a.arg, ClassRef) and isinstance(b.arg, ClassRef) \
                    and a.arg.label == b.arg.label:
                return t1
    elif isinstance(t1, GraphTactic) and isinstance(t2, GraphTactic):
        try:
            return pushout_gen(t1, t2)
        except PushoutError:
            pass
    if nest:
        name = "alt"
        return GraphTactic(name, (_nest(t1), _nest(t2)))
    return None


# -- loop rules ---------------------------------------------------------------

@dataclass(frozen=True)
class LoopPattern:
    rule: str
    node: str        # id kept for the looped node
    absorbed: str    # id of the node folded into it
    entry: object
    feedback: object
    exit: object


def _single(seq):
    return seq[0] if len(seq) == 1 else None


def _loop_ok(feedback, exit_label, entry) -> bool:
    if not all(isinstance(x, GoalType) for x in (feedback, exit_label, entry)):
        return False
    return gt_orthogonal(feedback, exit_label) and gt_subtype(feedback, entry)


def loop1_redexes(graph: StrategyGraph, nest: bool = False) -> list:
    out = []
    for t in graph.nodes:
        if not graph.is_plain(t):
            continue
        b = _single(graph.exit_wires(t))
        if b is None or b.dst is None:
            continue
        t2 = b.dst[0]
        if t2 == t or not graph.is_plain(t2):
            continue
        c = _single(graph.exit_wires(t2))
        a = _single(graph.entry_wires(t))
        if c is None or a is None:
            continue
        g = gen_tactic(graph.nodes[t], graph.nodes[t2], nest)
        if g is None or not _loop_ok(b.label, c.label, a.label):
            continue
        out.append((LoopPattern("loop1", t, t2, a.label, b.label, c.label), g))
    return out


def _fold(graph: StrategyGraph, keep: str, drop: str, tactic, entry: Wire,
          fb_id: str, fb_label, exit_w: Wire, remove=()) -> StrategyGraph:
    nodes = {}
    for nid, n in graph.nodes.items():
        if nid == keep:
            nodes[nid] = tactic
        elif nid != drop:
            nodes[nid] = n
    wires = {}
    for wid, w in graph.wires.items():
        if wid in remove:
            continue
        if wid == entry.id:
            w = Wire(wid, w.src, (keep, 0), w.label)
        elif wid == exit_w.id:
            w = Wire(wid, (keep, 0), w.dst, w.label)
        elif wid == fb_id:
            continue
        wires[wid] = w
    wires[fb_id] = Wire(fb_id, (keep, 0), (keep, 0), fb_label)
    ordered = {}
    for wid in graph.wires:  # keep wire order stable
        if wid in wires:
            ordered[wid] = wires[wid]
    return graph.replace(nodes=nodes, wires=ordered)


def apply_loop1(graph: StrategyGraph, nest: bool = False) -> list:
    out = []
    for pat, g in loop1_redexes(graph, nest):
        a = graph.entry_wires(pat.node)[0]
        b = graph.exit_wires(pat.node)[0]
        c = graph.exit_wires(pat.absorbed)[0]
        out.append(_fold(graph, pat.node, pat.absorbed, g, a, b.id, b.label, c))
    return out


def loop2_redexes(graph: StrategyGraph, nest: bool = False) -> list:
    out = []
    for T in graph.nodes:
        fb = graph.feedback_wire(T)
        if fb is None:
            continue
        entry = _single(graph.entry_wires(T))
        exit_w = _single(graph.exit_wires(T))
        if entry is None or exit_w is None:
            continue
        # backward: a plain node feeds the loop
        if entry.src is not None:
            t = entry.src[0]
            a = _single(graph.entry_wires(t))
            if t != T and graph.is_plain(t) and a is not None:
                g = gen_tactic(graph.nodes[t], graph.nodes[T], nest)
                if g is not None and isinstance(fb.label, GoalType) \
                        and isinstance(entry.label, GoalType):
                    fbl = gen_goal_type(fb.label, entry.label)
                    if _loop_ok(fbl, exit_w.label, a.label):
                        out.append((LoopPattern("loop2", t, T, a.label, fbl, exit_w.label), g))
        # forward: the loop feeds a plain node
        if exit_w.dst is not None:
            t = exit_w.dst[0]
            c2 = _single(graph.exit_wires(t))
            if t != T and graph.is_plain(t) and c2 is not None:
                g = gen_tactic(graph.nodes[T], graph.nodes[t], nest)
                if g is not None and isinstance(fb.label, GoalType) \
                        and isinstance(exit_w.label, GoalType):
                    fbl = gen_goal_type(fb.label, exit_w.label)
                    if _loop_ok(fbl, c2.label, entry.label):
                        out.append((LoopPattern("loop2", T, t, entry.label, fbl, c2.label), g))
    return out


def apply_loop2(graph: StrategyGraph, nest: bool = False) -> list:
    out = []
    for pat, g in loop2_redexes(graph, nest):
        keep, drop = pat.node, pat.absorbed
        if graph.is_looped(drop):  # backward: drop is the looped node
            looped, plain = drop, keep
            entry = graph.entry_wires(plain)[0]
            fb = graph.feedback_wire(looped)
            exit_w = graph.exit_wires(looped)[0]
            between = graph.exit_wires(plain)[0]
        else:
            looped, plain = keep, drop
            entry = graph.entry_wires(looped)[0]
            fb = graph.feedback_wire(looped)
            exit_w = graph.exit_wires(plain)[0]
            between = graph.exit_wires(looped)[0]
        out.append(_fold(graph, keep, drop, g, entry, fb.id, pat.feedback, exit_w,
                         remove={between.id}))
    return out


# -- segments, layering, push-out --------------------------------------------

@dataclass(frozen=True)
class SegmentMatch:
    pairs: tuple               # ((node in g1, node in g2), ...)
    wires: tuple = ()          # ((wire in g1, wire in g2), ...)

    def __len__(self):
        return len(self.pairs)

    @property
    def mapping(self) -> dict:
        return dict(self.pairs)


def _skeleton_compatible(n1, n2) -> bool:
    if isinstance(n1, AtomicTactic) and isinstance(n2, AtomicTactic):
        return gen_tactic(n1, n2) is not None
    if isinstance(n1, GraphTactic) and isinstance(n2, GraphTactic):
        return n1 == n2 or base_name(n1.name) == base_name(n2.name)
    return False


def _links(graph: StrategyGraph, a: str, b: str) -> list:
    return sorted((w.src[1], w.dst[1]) for w in graph.wires.values()
                  if w.src and w.dst and w.src[0] == a and w.dst[0] == b)


def _connected(graph: StrategyGraph, ns) -> bool:
    ns = set(ns)
    if not ns:
        return True
    seen, todo = set(), [min(ns)]
    while todo:
        n = todo.pop()
        if n in seen:
            continue
        seen.add(n)
        for w in graph.wires.values():
            if w.src and w.dst:
                for x, y in ((w.src[0], w.dst[0]), (w.dst[0], w.src[0])):
                    if x == n and y in ns and y not in seen:
                        todo.append(y)
    return seen == ns


def largest_common_subgraph(g1: StrategyGraph, g2: StrategyGraph) -> SegmentMatch:
    """Maximum connected node correspondence preserving tactics and wiring."""
    n1, n2 = list(g1.nodes), list(g2.nodes)
    best = [()]

    def consistent(pairs, a, b) -> bool:
        if _links(g1, a, a) != _links(g2, b, b):
            return False
        for x, y in pairs:
            if _links(g1, a, x) != _links(g2, b, y) or _links(g1, x, a) != _links(g2, y, b):
                return False
        return True

    def rec(i, pairs, used):
        if len(pairs) + (len(n1) - i) <= len(best[0]):
            return
        if i == len(n1):
            if _connected(g1, [p[0] for p in pairs]):
                best[0] = tuple(pairs)
            return
        a = n1[i]
        for b in n2:
            if b in used or not _skeleton_compatible(g1.nodes[a], g2.nodes[b]):
                continue
            if consistent(pairs, a, b):
                rec(i + 1, pairs + [(a, b)], used | {b})
        rec(i + 1, pairs, used)

    rec(0, [], frozenset())
    pairs = best[0]
    return SegmentMatch(pairs, _match_wires(g1, g2, dict(pairs)))


def _match_wires(g1, g2, m: dict) -> tuple:
    out = []
    used = set()
    for w1 in g1.wires.values():
        for w2 in g2.wires.values():
            if w2.id in used:
                continue
            ok_src = (w1.src is None and w2.src is None) or (
                w1.src is not None and w2.src is not None
                and m.get(w1.src[0]) == w2.src[0] and w1.src[1] == w2.src[1])
            ok_dst = (w1.dst is None and w2.dst is None) or (
                w1.dst is not None and w2.dst is not None
                and m.get(w1.dst[0]) == w2.dst[0] and w1.dst[1] == w2.dst[1])
            touches = (w1.src is not None and w1.src[0] in m) or (w1.dst is not None and w1.dst[0] in m)
            if ok_src and ok_dst and touches:
                out.append((w1.id, w2.id))
                used.add(w2.id)
                break
    return tuple(out)


def _gen_label(a, b):
    if isinstance(a, GoalType) and isinstance(b, GoalType):
        return gen_goal_type(a, b)
    return a if a == b else LabelVar(getattr(a, "name", "a"))


def _fuse(g1: StrategyGraph, g2: StrategyGraph) -> StrategyGraph:
    match = largest_common_subgraph(g1, g2)
    if not match.pairs:
        raise PushoutError("no common subgraph")
    m = match.mapping
    inv = {b: a for a, b in m.items()}
    wmap = dict(match.wires)
    winv = {b: a for a, b in wmap.items()}
    nodes = {}
    for nid, n in g1.nodes.items():
        if nid in m:
            g = gen_tactic(n, g2.nodes[m[nid]])
            if g is None:
                raise PushoutError(f"{nid} and {m[nid]} do not generalise")
            nodes[nid] = g
        else:
            nodes[nid] = n
    rename = dict(inv)
    for nid, n in g2.nodes.items():
        if nid not in inv:
            new = nid
            while new in nodes:
                new += "'"
            rename[nid] = new
            nodes[new] = n
    wires = {}
    for wid, w in g1.wires.items():
        label = w.label
        if wid in wmap:
            label = _gen_label(label, g2.wires[wmap[wid]].label)
        wires[wid] = Wire(wid, w.src, w.dst, label)
    for wid, w in g2.wires.items():
        if wid in winv:
            continue
        if w.src is None or w.dst is None:
            raise PushoutError(f"boundary wire {wid} is not shared")
        new = wid
        while new in wires:
            new += "'"
        wires[new] = Wire(new, (rename[w.src[0]], w.src[1]), (rename[w.dst[0]], w.dst[1]), w.label)
    inputs = g1.inputs
    outputs = g1.outputs
    if len(g2.inputs) != len(inputs) or len(g2.outputs) != len(outputs):
        raise PushoutError("boundaries differ")
    for a, b in zip(inputs + outputs, g2.inputs + g2.outputs):
        if wmap.get(a) != b:
            raise PushoutError(f"boundary wires {a} and {b} are not glued")
    return StrategyGraph(nodes, wires, inputs, outputs)


def base_name(name: str) -> str:
    """Layered occurrences are named ``<base>a`` and ``<base>b``."""
    return name[:-1] if len(name) > 1 and name[-1] in "ab" else name


def pushout_gen(gt1: GraphTactic, gt2: GraphTactic) -> GraphTactic:
    """Glue two graph tactics along the largest common subgraph of their bodies."""
    if gt1 == gt2:
        return gt1
    n = max(len(gt1.children), len(gt2.children))
    children = []
    for i in range(n):
        if i < len(gt1.children) and i < len(gt2.children):
            children.append(_fuse(gt1.children[i], gt2.children[i]))
        else:
            children.append((gt1.children + gt2.children)[i])
    name = base_name(gt1.name) if base_name(gt1.name) == base_name(gt2.name) else gt1.name
    return GraphTactic(name, tuple(children))


def segment_name(graph: StrategyGraph, nodes) -> str:
    for nid in nodes:
        n = graph.nodes[nid]
        if isinstance(n, AtomicTactic) and n.tactic.kind == "subst":
            return "p" + "".join(sorted(n.tactic.arg.names))
    return "p" + nodes[0]


def _segments_from(graph: StrategyGraph, start: str, limit: int = 12) -> list:
    """Single-entry single-exit node sets rooted at ``start``.

    Each option is ``(nodes, exit wire)``; nodes are in preorder.
    """
    def grow(nid):
        # options for the subtree hanging off nid: list of (nodes, exits)
        if graph.is_looped(nid) or len(graph.in_wires(nid)) != 1:
            return []
        per_wire = []
        for w in graph.out_wires(nid):
            opts = [((), (w.id,))]
            if w.dst is not None:
                for ns, ex in grow(w.dst[0]):
                    opts.append((ns, ex))
            per_wire.append(opts)
        out = [((nid,), ())]
        for wopts in per_wire:
            out = [(a + b, e + f) for a, e in out for b, f in wopts
                   if len(a) + len(b) <= limit and len(e) + len(f) <= 1]
        return out
    return [(ns, ex[0]) for ns, ex in grow(start) if len(ex) == 1]


def _skeleton_equal(graph: StrategyGraph, s1, s2) -> bool:
    if len(s1) != len(s2):
        return False
    m = dict(zip(s1, s2))
    for a, b in m.items():
        if graph.nodes[a] != graph.nodes[b]:
            return False
        if [(w.src[1], m.get(w.dst[0]) if w.dst else None) for w in graph.out_wires(a)
                if w.dst is None or w.dst[0] in m] != \
           [(w.src[1], w.dst[0] if w.dst else None) for w in graph.out_wires(b)
                if w.dst is None or w.dst[0] in m.values()]:
            return False
    return True


def find_repeated_segments(graph: StrategyGraph) -> list:
    """Pairs of adjacent segments with equal tactic skeletons, largest first."""
    found = []
    for start in graph.nodes:
        for s1, exit1 in _segments_from(graph, start):
            if len(s1) < 2:
                continue
            w = graph.wires[exit1]
            if w.dst is None:
                continue
            for s2, exit2 in _segments_from(graph, w.dst[0]):
                if set(s1) & set(s2):
                    continue
                if _skeleton_equal(graph, s1, s2):
                    found.append((s1, s2))
    rank = {n: i for i, n in enumerate(graph.nodes)}
    found.sort(key=lambda p: (-len(p[0]), rank[p[0][0]]))
    return found


def layer(graph: StrategyGraph, segment, name: str) -> StrategyGraph:
    """Wrap the connected node set ``segment`` into one graph tactic node."""
    seg = list(segment)
    inside = set(seg)
    entering = [w for w in graph.wires.values()
                if w.dst and w.dst[0] in inside and not (w.src and w.src[0] in inside)]
    leaving = [w for w in graph.wires.values()
               if w.src and w.src[0] in inside and not (w.dst and w.dst[0] in inside)]
    for group in (entering, leaving):
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                if not (isinstance(a.label, GoalType) and isinstance(b.label, GoalType)
                        and gt_orthogonal(a.label, b.label)):
                    raise LayeringError(f"boundary wires {a.id} and {b.id} are not orthogonal")
    if not _connected(graph, inside):
        raise LayeringError("segment is not connected")
    body_wires = {}
    for wid, w in graph.wires.items():
        if w in entering:
            body_wires[wid] = Wire(wid, None, w.dst, w.label)
        elif w in leaving:
            body_wires[wid] = Wire(wid, w.src, None, w.label)
        elif w.src and w.dst and w.src[0] in inside and w.dst[0] in inside:
            body_wires[wid] = w
    body = StrategyGraph({n: graph.nodes[n] for n in seg}, body_wires,
                         tuple(w.id for w in entering), tuple(w.id for w in leaving))
    head = seg[0]
    nodes = {}
    for nid, n in graph.nodes.items():
        if nid == head:
            nodes[nid] = GraphTactic(name, (body,))
        elif nid not in inside:
            nodes[nid] = n
    wires = {}
    for wid, w in graph.wires.items():
        if w in entering:
            wires[wid] = Wire(wid, w.src, (head, entering.index(w)), w.label)
        elif w in leaving:
            wires[wid] = Wire(wid, (head, leaving.index(w)), w.dst, w.label)
        elif not ((w.src and w.src[0] in inside) or (w.dst and w.dst[0] in inside)):
            wires[wid] = w
    return graph.replace(nodes=nodes, wires=wires)


# -- pipeline -----------------------------------------------------------------

@dataclass(frozen=True)
class PipelineStep:
    kind: str
    detail: str
    graph: StrategyGraph


@dataclass
class PipelineResult:
    graph: StrategyGraph
    steps: list = field(default_factory=list)


def _loop_fixpoint(graph, steps, nest, max_steps):
    while len(steps) < max_steps:
        red1 = loop1_redexes(graph, nest)
        if red1:
            pat = red1[0][0]
            graph = apply_loop1(graph, nest)[0]
            steps.append(PipelineStep("loop1", f"{pat.node},{pat.absorbed}", graph))
            continue
        red2 = loop2_redexes(graph, nest)
        if red2:
            pat = red2[0][0]
            graph = apply_loop2(graph, nest)[0]
            steps.append(PipelineStep("loop2", f"{pat.node},{pat.absorbed}", graph))
            continue
        break
    return graph


def generalise_pipeline(trace_or_graph, nest: bool = False, max_steps: int = 200) -> PipelineResult:
    graph = trace_or_graph
    if isinstance(trace_or_graph, ProofTrace):
        graph = trace_to_graph(trace_or_graph)
    steps = [PipelineStep("trace", "", graph)]
    while True:
        before = len(steps)
        graph = _loop_fixpoint(graph, steps, nest, max_steps)
        mark = len(steps)
        for s1, s2 in find_repeated_segments(graph):
            name = segment_name(graph, s1)
            try:
                g = layer(graph, s1, name + "a")
                steps.append(PipelineStep("layer", f"{name}a:{','.join(s1)}", g))
                g = layer(g, s2, name + "b")
                steps.append(PipelineStep("layer", f"{name}b:{','.join(s2)}", g))
                fused = pushout_gen(g.nodes[s1[0]], g.nodes[s2[0]])
            except (LayeringError, PushoutError):
                del steps[mark:]
                continue
            nodes = dict(g.nodes)
            nodes[s1[0]] = fused
            nodes[s2[0]] = fused
            graph = g.replace(nodes=nodes)
            steps.append(PipelineStep("pushout", fused.name, graph))
            break
        if len(steps) == before or len(steps) >= max_steps:
            return PipelineResult(graph, steps)
