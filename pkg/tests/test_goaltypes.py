from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from proofstrat.generalise import derive_class, derive_goal_type
from proofstrat.goaltypes import (CONCL, Goal, GoalClass, GoalType, Link,
                                  PairingError, class_join, class_meet,
                                  class_orthogonal, class_subtype, gen_goal_type,
                                  gen_map, goal_has_type, gt_meet,
                                  gt_orthogonal, gt_subtype, link_join,
                                  link_meet, link_orthogonal, link_subtype,
                                  match_class, match_link_feature)
from proofstrat.graph import LabelVar
from proofstrat.kernel import ProofState
from proofstrat.lattice import (BOTTOM, HAS_SYMBOL, IS_MATCH, SYMB_AT_POS,
                                TOP, TOP_SYMBOL)
from proofstrat.terms import parse_term
from proofstrat.textio import parse_data, parse_goal_type

from strategies import ground_terms

P = parse_term
D = parse_data

C1 = GoalClass("C", {TOP_SYMBOL: D("[[*]]"), HAS_SYMBOL: D("[[*,/\\],[\\/,*]]")})
C2 = GoalClass("C", {TOP_SYMBOL: D("[[/\\]]"), HAS_SYMBOL: D("[[*,/\\],[\\/,*]]")})
C3 = GoalClass("C", {TOP_SYMBOL: D("[[*]]"), HAS_SYMBOL: D("[[*,/\\,\\/]]")})


def test_c2_and_c3_are_orthogonal():
    assert class_orthogonal(C2, C3)
    assert class_meet(C2, C3)[TOP_SYMBOL] == BOTTOM


def test_join_of_c2_c3():
    j = class_join(C2, C3)
    assert j[TOP_SYMBOL] == D("[[/\\],[*]]")
    assert j[HAS_SYMBOL] == D("[[*,/\\],[\\/,*]]")
    assert dict(j.features) == {TOP_SYMBOL: D("[[/\\],[*]]"), HAS_SYMBOL: D("[[*,/\\],[\\/,*]]")}


def test_c3_is_a_subtype_of_c1():
    assert class_subtype(C3, C1)
    assert not class_subtype(C1, C3)
    assert class_subtype(C1, C1)


def test_top_class_is_meet_identity():
    top = GoalClass("C")
    assert class_meet(C1, top).features == C1.features
    assert top[TOP_SYMBOL] is TOP


def test_link_examples():
    k = (SYMB_AT_POS, CONCL, "H")
    l1, l2 = Link({k: D("[[bot]]")}), Link({k: D("[[1]]")})
    assert link_meet(l1, l2)[k] == BOTTOM
    assert link_orthogonal(l1, l2)
    assert link_join(l1, l2)[k] == D("[[bot],[1]]")
    assert link_subtype(l1, l1) and link_subtype(l1, link_join(l1, l2))


def test_orthogonal_concls_make_orthogonal_types():
    h = GoalClass("H", {TOP_SYMBOL: D("[[*]]")})
    g2, g3 = GoalType(C2, [h]), GoalType(C3, [h])
    assert gt_orthogonal(g2, g3)


def test_goal_type_requires_distinct_labels():
    with pytest.raises(PairingError):
        GoalType(C1, [GoalClass("H"), GoalClass("H")])


def test_subtype_needs_a_fact_pair():
    assert not gt_subtype(GoalType(C1), GoalType(C1))
    h = GoalClass("H", {TOP_SYMBOL: D("[[*]]")})
    assert gt_subtype(GoalType(C3, [h]), GoalType(C1, [h]))


def test_gen_map_keeps_orphans_and_drops_dominated():
    h = GoalClass("H", {TOP_SYMBOL: D("[[*]]")})
    p = GoalClass("P", {TOP_SYMBOL: D("[[pure]]")})
    q = GoalClass("Q", {TOP_SYMBOL: D("[[*]]"), HAS_SYMBOL: D("[[*,/\\]]")})
    out = gen_map([h], [p])
    assert [c.label for c in out] == ["H", "P"]
    # Q sits below H and overlaps it, so only H survives
    assert [c.label for c in gen_map([h], [q])] == ["H"]


def test_goal_type_text_roundtrip_shape():
    gt = parse_goal_type("gt { concl: {top_symbol: [[*]]}, facts: {H: {top_symbol: [[*]]}},"
                         " link: {symb_at_pos(concl,H): [[bot]]} }")
    assert gt.fact_labels == ("H",)
    assert gt.link[(SYMB_AT_POS, CONCL, "H")] == D("[[bot]]")


def test_link_matchers():
    assert match_link_feature(IS_MATCH, D("[[true]]"), P("a * b"), P("a * b"))
    assert match_link_feature(IS_MATCH, D("[[false]]"), P("a * b"), P("b * a"))
    assert match_link_feature(SYMB_AT_POS, D("[[1]]"), P("a * b"), P("a * c"))
    assert match_link_feature(SYMB_AT_POS, D("[[bot]]"), P("a * b"), P("c * a"))
    assert not match_link_feature(SYMB_AT_POS, D("[[bot]]"), P("a * b"), P("a * c"))


def test_goal_has_type(theory):
    ps = theory.conjectures["conj1"].state
    gt = derive_goal_type(ps)
    g = Goal({"H": [ps.hyps["h"]], "P": [ps.hyps["p"]]}, ps)
    assert goal_has_type(g, gt)
    assert goal_has_type(g, LabelVar("a"))
    swapped = Goal({"H": [ps.hyps["p"]], "P": [ps.hyps["h"]]}, ps)
    assert not goal_has_type(swapped, gt)
    assert not goal_has_type(Goal({"H": [ps.hyps["h"]]}, ps), gt)


def test_goal_equality_ignores_parent(theory):
    ps = theory.conjectures["conj1"].state
    g = Goal({}, ps)
    assert Goal({}, ps, parent=g) == g


# -- coherence of matching with the lattice operations -------------------------

def classes():
    return st.one_of(
        ground_terms(6).map(lambda t: derive_class("C", t)),
        st.tuples(ground_terms(6), ground_terms(6)).map(
            lambda p: class_join(derive_class("C", p[0]), derive_class("C", p[1]))),
    )


@settings(max_examples=200)
@given(ground_terms())
def test_derived_class_matches_its_term(t):
    assert match_class(derive_class("C", t), t)


@settings(max_examples=200)
@given(classes(), classes(), ground_terms(8))
def test_matching_respects_meet_and_join(c1, c2, t):
    m1, m2 = match_class(c1, t), match_class(c2, t)
    assert match_class(class_meet(c1, c2), t) == (m1 and m2)
    if m1 or m2:
        assert match_class(class_join(c1, c2), t)
    if class_orthogonal(c1, c2):
        assert not (m1 and m2)
    if class_subtype(c1, c2) and m1:
        assert m2


@settings(max_examples=100)
@given(ground_terms(8), ground_terms(8), ground_terms(8))
def test_derived_goal_types_type_their_goals(c, h1, h2):
    a = ProofState({"h": h1}, c)
    b = ProofState({"h": h2}, c)
    ga, gb = derive_goal_type(a), derive_goal_type(b)
    goal = Goal({"H": [h1]}, a)
    assert goal_has_type(goal, ga)
    assert goal_has_type(goal, gen_goal_type(ga, gb))
    if gt_orthogonal(ga, gb):
        assert not goal_has_type(goal, gb)
    assert goal_has_type(goal, gt_meet(ga, ga))
