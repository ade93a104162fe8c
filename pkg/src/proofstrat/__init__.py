"""Proof-strategy generalisation over goal-type lattices."""

from __future__ import annotations

from .estimator import StrategyGeneraliser
from .evaluate import EvalResult, evaluate, initial_goal, lift_one, lift_tactic
from .generalise import (derive_goal_type, generalise_pipeline, gen_tactic,
                         trace_to_graph)
from .goaltypes import Goal, GoalClass, GoalType, Link
from .kernel import (Equation, ProofState, ProofTrace, TacticApp, Theory,
                     replay_script)
from .terms import parse_term, print_term
from .textio import (format_strategy, load_strategy, load_theory,
                     parse_strategy, parse_theory)

__all__ = [
    "StrategyGeneraliser", "EvalResult", "evaluate", "initial_goal", "lift_one",
    "lift_tactic", "derive_goal_type", "generalise_pipeline", "gen_tactic",
    "trace_to_graph", "Goal", "GoalClass", "GoalType", "Link", "Equation",
    "ProofState", "ProofTrace", "TacticApp", "Theory", "replay_script",
    "parse_term", "print_term", "format_strategy", "load_strategy",
    "load_theory", "parse_strategy", "parse_theory",
]
