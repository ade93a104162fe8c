from __future__ import annotations

import pytest
from hypothesis import given, settings

from proofstrat.generalise import derive_goal_type
from proofstrat.kernel import ProofState, rule_class, subst
from proofstrat.textio import (ParseError, format_class, format_goal_type,
                               format_strategy, parse_class, parse_goal_type,
                               parse_strategy, parse_tactic, parse_theory)

from strategies import ground_terms


def test_tactic_syntax():
    assert parse_tactic("subst {ax1, ax2}") == subst("ax1", "ax2")
    assert parse_tactic("subst ax1") == subst("ax1")
    assert parse_tactic("rule class P") == rule_class("P")
    for bad in ["apply ax1", "subst class P", "subst {ax1", "rule {}"]:
        with pytest.raises(ParseError):
            parse_tactic(bad)


@pytest.mark.parametrize("text, line", [
    ("atoms a\naxiom ax1 (A * B) <-> B", 2),
    ("atoms a\naxiom x: A * B -> B * A", 2),
    ("atoms a b\nconjecture c: shows a * z", 2),
    ("atoms a\nconjecture c: assumes h: a shows a\nscript s for d: rule h", 3),
    ("atoms a\nconjecture c: assumes h: a shows a\nscript s for c: subst {ax9}", 3),
    ("atoms a\nbanana", 2),
    ("atoms a\nconjecture c: assumes h: a and h: a shows a", 2),
])
def test_theory_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as ei:
        parse_theory(text)
    assert ei.value.line == line


def test_theory_continuation_and_comments():
    th = parse_theory("atoms a b  # two atoms\nconjecture c: assumes h: a * b\n   shows a * b\n"
                      "script s for c: rule h")
    assert th.conjectures["c"].hyps[0][0] == "h"
    assert th.scripts["s"] == ("c", [parse_tactic("rule h")])


@pytest.mark.parametrize("key", ["long", "short", "one"])
def test_bundled_scripts_parse(theory, key):
    conj, script = theory.scripts[key]
    assert conj in theory.conjectures and script


def test_class_roundtrip():
    text = "{top_symbol: [[*]], has_symbol: [[/\\,*]]}"
    c = parse_class(text)
    assert parse_class(format_class(c)) == c


@settings(max_examples=60)
@given(ground_terms(8), ground_terms(8), ground_terms(6))
def test_goal_type_roundtrip(c, h, p):
    gt = derive_goal_type(ProofState({"h": h, "p": p}, c))
    assert parse_goal_type(format_goal_type(gt)) == gt


def test_strategy_roundtrip(pipeline1):
    for step in pipeline1.steps:
        text = format_strategy(step.graph)
        assert parse_strategy(text) == step.graph
        assert format_strategy(parse_strategy(text)) == text


@pytest.mark.parametrize("text", [
    "",
    "strategy\n  node t1 kind=subst args={ax1}\n",
    "strategy\n  node t1 kind=magic\nend\n",
    "strategy\n  wire w1 in -> t9.0 label=var a\n  input w1\nend\n",
])
def test_bad_strategy_files(text):
    with pytest.raises(ParseError):
        parse_strategy(text)
