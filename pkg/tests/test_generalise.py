from __future__ import annotations

import pytest

from proofstrat.evaluate import evaluate
from proofstrat.generalise import (LayeringError, PushoutError, apply_loop1,
                                   base_name, derive_class, derive_goal_type,
                                   find_repeated_segments, first_common_position,
                                   gen_tactic, generalise_pipeline,
                                   generalise_tactic_args, largest_common_subgraph,
                                   layer, loop1_redexes, loop2_redexes,
                                   pushout_gen)
from proofstrat.goaltypes import CONCL, gt_orthogonal, gt_subtype
from proofstrat.graph import (AtomicTactic, GraphTactic, LabelVar, StrategyGraph,
                              Wire)
from proofstrat.kernel import ProofState, rule, rule_class, subst
from proofstrat.lattice import HAS_SYMBOL, IS_MATCH, SYMB_AT_POS, TOP_SYMBOL
from proofstrat.terms import parse_term
from proofstrat.textio import parse_data

P = parse_term
D = parse_data


# -- derivation ---------------------------------------------------------------

def test_derived_type_of_first_conjecture(theory):
    gt = derive_goal_type(theory.conjectures["conj1"].state)
    assert gt.fact_labels == ("H", "P")
    h, p = gt.fact("H"), gt.fact("P")
    assert dict(h.features) == {TOP_SYMBOL: D("[[*]]"), HAS_SYMBOL: D("[[*,/\\]]")}
    assert dict(p.features) == {TOP_SYMBOL: D("[[pure]]"), HAS_SYMBOL: D("[[pure]]")}
    assert gt.link[(SYMB_AT_POS, CONCL, "H")] == D("[[bot]]")
    assert gt.link[(IS_MATCH, CONCL, "H")] == D("[[false]]")


def test_derived_link_after_reassociation(theory, trace1):
    g5 = trace1.nodes()[4].state
    assert g5.concl == P("c * ((f /\\ e) * (d /\\ e) * b) * a")
    assert derive_goal_type(g5).link[(SYMB_AT_POS, CONCL, "H")] == D("[[1]]")


def test_atom_has_no_operators():
    c = derive_class("C", P("a"))
    assert c[HAS_SYMBOL] == D("[[bot]]") and c[TOP_SYMBOL] == D("[[a]]")


def test_first_common_position_is_preorder_first():
    assert first_common_position(P("a * b"), P("a * b")) == (1,)
    assert first_common_position(P("a * b"), P("b * a")) is None
    assert first_common_position(P("(c * a) * b"), P("(d * a) * b")) == (1, 2)


def test_rule_arguments_become_classes(theory):
    ps = theory.conjectures["conj2"].state
    assert generalise_tactic_args(rule("p'"), ps) == rule_class("P")
    assert generalise_tactic_args(subst("ax1"), ps) == subst("ax1")


def test_trace_graph_shape(graph1, trace1):
    assert list(graph1.nodes) == [f"t{i}" for i in range(1, 10)]
    assert graph1.inputs == ("w1",) and graph1.outputs == ()
    assert len(graph1.wires) == len(trace1)
    # conditional rewrites have two outputs, discharges none
    assert len(graph1.out_wires("t5")) == 2 and graph1.out_wires("t9") == []
    graph1.validate()


# -- tactic generalisation ----------------------------------------------------

def test_gen_tactic():
    a, b = AtomicTactic(subst("ax1")), AtomicTactic(subst("ax2"))
    assert gen_tactic(a, a) == a
    assert gen_tactic(a, b) == AtomicTactic(subst("ax1", "ax2"))
    assert gen_tactic(AtomicTactic(rule_class("H")), AtomicTactic(rule_class("P"))) is None
    assert gen_tactic(a, AtomicTactic(rule_class("P"))) is None
    nested = gen_tactic(a, AtomicTactic(rule_class("P")), nest=True)
    assert isinstance(nested, GraphTactic) and len(nested.children) == 2


# -- loops ---------------------------------------------------------------------

def test_first_loop_redex(graph1):
    red = loop1_redexes(graph1)
    assert [(p.node, p.absorbed) for p, _ in red] == [("t3", "t4")]
    pat = red[0][0]
    assert gt_orthogonal(pat.feedback, pat.exit) and gt_subtype(pat.feedback, pat.entry)


def test_loop1_folds_two_nodes(graph1):
    [g] = apply_loop1(graph1)
    assert "t4" not in g.nodes and g.is_looped("t3")
    fb = g.feedback_wire("t3")
    assert fb.src == fb.dst == ("t3", 0)
    g.validate()


def test_loop2_absorbs_neighbours(pipeline1):
    kinds = [s.kind for s in pipeline1.steps]
    first_loop2 = pipeline1.steps[kinds.index("loop2")]
    assert first_loop2.detail == "t2,t3"
    assert loop2_redexes(pipeline1.steps[1].graph)


def _plain_chain(labels, tactic=subst("ax1")):
    """n1 -> n2 with the given (entry, middle, exit) labels."""
    a, b, c = labels
    nodes = {"n1": AtomicTactic(tactic), "n2": AtomicTactic(tactic)}
    wires = [Wire("a", None, ("n1", 0), a), Wire("b", ("n1", 0), ("n2", 0), b),
             Wire("c", ("n2", 0), None, c)]
    return StrategyGraph(nodes, wires, ("a",), ("c",))


def test_loop1_needs_typed_guards():
    g = _plain_chain([LabelVar("x")] * 3)
    assert loop1_redexes(g) == []


def test_loop1_on_synthetic_chain():
    from proofstrat.goaltypes import gen_goal_type
    typed = lambda concl: derive_goal_type(ProofState({"h": P("a * b")}, P(concl)))
    mid = typed("b * a")                           # differs from h
    entry = gen_goal_type(mid, typed("(b * a) * c"))
    done = typed("a * b")                          # matches h
    assert gt_orthogonal(mid, done) and gt_subtype(mid, entry)
    [g] = apply_loop1(_plain_chain([entry, mid, done]))
    assert list(g.nodes) == ["n1"] and g.feedback_wire("n1").label == mid
    assert g.exit_wires("n1")[0].label == done
    # without an orthogonal exit there is no loop to fold
    assert loop1_redexes(_plain_chain([entry, mid, mid])) == []


# -- layering and push-out --------------------------------------------------------

def test_layer_rejects_overlapping_boundaries():
    g = StrategyGraph(
        {"n1": AtomicTactic(subst("ax2")), "n2": AtomicTactic(rule_class("P")),
         "n3": AtomicTactic(subst("ax1"))},
        [Wire("i", None, ("n1", 0), LabelVar("a")),
         Wire("x", ("n1", 0), ("n2", 0), LabelVar("a")),
         Wire("y", ("n1", 0), ("n3", 0), LabelVar("a")),
         Wire("o", ("n3", 0), None, LabelVar("a"))],
        ("i",), ("o",))
    with pytest.raises(LayeringError):
        layer(g, ["n1"], "p")  # two outgoing wires without orthogonal types
    with pytest.raises(LayeringError):
        layer(g, ["n2", "n3"], "p")  # not connected


def test_layer_wraps_a_segment(pipeline1):
    step = next(s for s in pipeline1.steps if s.kind == "layer")
    node = step.graph.nodes["t5"]
    assert isinstance(node, GraphTactic) and node.name == "pax2a"
    assert [str(n) for n in node.children[0].nodes.values()] == ["subst {ax2}", "rule class P"]
    step.graph.validate()


def test_repeated_segments_in_trace_graph(pipeline1):
    before = pipeline1.steps[[s.kind for s in pipeline1.steps].index("layer") - 1].graph
    s1, s2 = find_repeated_segments(before)[0]
    assert (s1, s2) == (("t5", "t6"), ("t7", "t8"))


def test_largest_common_subgraph_of_a_graph_with_itself(pipeline1):
    body = pipeline1.graph.nodes["t5"].children[0]
    m = largest_common_subgraph(body, body)
    assert len(m) == len(body.nodes)
    assert m.mapping == {n: n for n in body.nodes}


def test_pushout_of_equal_tactics_is_identity(pipeline1):
    gt = pipeline1.graph.nodes["t5"]
    assert pushout_gen(gt, gt) is gt


def test_pushout_needs_a_common_part():
    def single(t, name):
        body = StrategyGraph({"n": AtomicTactic(t)},
                             [Wire("i", None, ("n", 0), LabelVar("a"))], ("i",), ())
        return GraphTactic(name, (body,))
    with pytest.raises(PushoutError):
        pushout_gen(single(rule_class("H"), "xa"), single(rule_class("P"), "xb"))


def test_base_name():
    assert base_name("pax2a") == base_name("pax2b") == "pax2"
    assert base_name("a") == "a"


# -- the whole pipeline ---------------------------------------------------------

def test_pipeline_steps(pipeline1):
    assert [(s.kind, s.detail) for s in pipeline1.steps] == [
        ("trace", ""), ("loop1", "t3,t4"), ("loop2", "t2,t3"), ("loop2", "t1,t2"),
        ("layer", "pax2a:t5,t6"), ("layer", "pax2b:t7,t8"), ("pushout", "pax2"),
        ("loop1", "t5,t7")]


def test_pipeline_is_idempotent(pipeline1):
    again = generalise_pipeline(pipeline1.graph)
    assert again.graph == pipeline1.graph
    assert [s.kind for s in again.steps] == ["trace"]


def test_short_proof_has_nothing_to_fold(trace2):
    res = generalise_pipeline(trace2)
    assert [s.kind for s in res.steps] == ["trace"]
    assert len(res.graph.nodes) == 4


def test_every_snapshot_is_a_valid_graph(pipeline1):
    for s in pipeline1.steps:
        s.graph.validate()


def test_trivial_proof(theory):
    from proofstrat.kernel import replay_script
    conj, script = theory.scripts["one"]
    res = generalise_pipeline(replay_script(theory, conj, script))
    assert len(res.graph.nodes) == 1
    assert evaluate(res.graph, theory.conjectures["trivial"].state, theory).proved
