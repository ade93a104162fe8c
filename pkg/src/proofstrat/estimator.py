"""Estimator-style wrapper: fit a strategy on proof traces, predict proof status."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .evaluate import DEFAULT_BUDGET, BudgetExhausted, LiftError, evaluate
from .generalise import generalise_pipeline, trace_to_graph
from .goaltypes import GoalType, gen_goal_type
from .graph import GraphTactic, StrategyGraph, Wire
from .kernel import Conjecture, ProofState, ProofTrace, Theory, replay_script


def _as_list(X, what: str) -> list:
    if isinstance(X, (str, ProofTrace, ProofState, Conjecture)):
        raise TypeError(f"expected a sequence of {what}, got a single {type(X).__name__}")
    items = list(X)
    if not items:
        raise ValueError(f"empty sequence of {what}")
    return items


class StrategyGeneraliser(BaseEstimator):
    """Learns a strategy graph from proof traces.

    ``fit`` takes traces, or ``(conjecture, script)`` name pairs replayed
    against ``theory``.  ``predict`` returns ``"proved"``, ``"open"``,
    ``"stuck"``, ``"untyped"`` or ``"budget"`` per state.
    """

    def __init__(self, theory: Theory = None, generalise: bool = True,
                 nest: bool = False, budget: int = DEFAULT_BUDGET):
        self.theory = theory
        self.generalise = generalise
        self.nest = nest
        self.budget = budget

    def _traces(self, X) -> list:
        out = []
        for item in _as_list(X, "traces"):
            if isinstance(item, ProofTrace):
                out.append(item)
            elif isinstance(item, tuple) and len(item) == 2:
                if self.theory is None:
                    raise ValueError("a theory is needed to replay scripts")
                conj, script = item
                if isinstance(script, str):
                    script = self.theory.scripts[script][1]
                out.append(replay_script(self.theory, conj, script))
            else:
                raise TypeError(f"cannot learn from {type(item).__name__}")
        return out

    def fit(self, X, y=None):
        traces = self._traces(X)
        graphs, self.steps_ = [], []
        for tr in traces:
            if self.generalise:
                res = generalise_pipeline(tr, nest=self.nest)
                graphs.append(res.graph)
                self.steps_.append(res.steps)
            else:
                graphs.append(trace_to_graph(tr))
                self.steps_.append([])
        self.strategy_ = graphs[0] if len(graphs) == 1 else _alternatives(graphs)
        self.n_traces_ = len(traces)
        return self

    def _states(self, X) -> list:
        out = []
        for item in _as_list(X, "proof states"):
            if isinstance(item, ProofState):
                out.append(item)
            elif isinstance(item, Conjecture):
                out.append(item.state)
            elif isinstance(item, str) and self.theory is not None:
                out.append(self.theory.conjectures[item].state)
            else:
                raise TypeError(f"cannot evaluate {type(item).__name__}")
        return out

    def evaluate_one(self, state: ProofState):
        check_is_fitted(self, "strategy_")
        return evaluate(self.strategy_, state, self.theory or Theory(), self.budget)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "strategy_")
        out = []
        for ps in self._states(X):
            try:
                out.append(self.evaluate_one(ps).status)
            except LiftError:
                out.append("untyped")
            except BudgetExhausted:
                out.append("budget")
        return np.array(out, dtype=object)

    def score(self, X, y=None) -> float:
        return float(np.mean(self.predict(X) == "proved"))


def _alternatives(graphs) -> StrategyGraph:
    """One graph tactic whose children are the given strategies."""
    labels = [g.wires[g.inputs[0]].label for g in graphs]
    label = labels[0]
    for other in labels[1:]:
        if isinstance(label, GoalType) and isinstance(other, GoalType):
            label = gen_goal_type(label, other)
    node = GraphTactic("learned", tuple(graphs))
    return StrategyGraph({"s": node}, {"w0": Wire("w0", None, ("s", 0), label)}, ("w0",), ())
