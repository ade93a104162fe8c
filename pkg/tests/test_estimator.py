from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from proofstrat.estimator import StrategyGeneraliser
from proofstrat.graph import GraphTactic


def test_params_roundtrip(theory):
    est = StrategyGeneraliser(theory=theory, budget=50)
    assert est.get_params() == {"theory": theory, "generalise": True, "nest": False, "budget": 50}
    twin = clone(est).set_params(nest=True)
    assert twin.nest and twin.budget == 50 and not hasattr(twin, "strategy_")


def test_predict_before_fit(theory):
    with pytest.raises(NotFittedError):
        StrategyGeneraliser(theory=theory).predict(["conj1"])


def test_fit_predict_score(theory):
    est = StrategyGeneraliser(theory=theory).fit([("conj1", "long")])
    assert est.n_traces_ == 1 and len(est.strategy_.nodes) == 3
    pred = est.predict(["conj1", "conj2", "nopure"])
    assert isinstance(pred, np.ndarray)
    assert list(pred) == ["proved", "proved", "untyped"]
    assert est.score(["conj1", "conj2", "nopure"]) == pytest.approx(2 / 3)


def test_without_generalisation_the_long_proof_does_not_transfer(theory, trace1):
    est = StrategyGeneraliser(theory=theory, generalise=False).fit([trace1])
    assert est.steps_ == [[]]
    assert list(est.predict(["conj1", "conj2"])) != ["proved", "proved"]
    assert est.predict(["conj1"])[0] == "proved"


def test_several_traces_become_alternatives(theory, trace1, trace2):
    est = StrategyGeneraliser(theory=theory).fit([trace1, trace2])
    node = next(iter(est.strategy_.nodes.values()))
    assert isinstance(node, GraphTactic) and len(node.children) == 2
    assert est.predict(["conj2"])[0] == "proved"


def test_budget_status(theory):
    est = StrategyGeneraliser(theory=theory, budget=2).fit([("conj1", "long")])
    assert est.predict(["conj1"])[0] == "budget"


@pytest.mark.parametrize("X", ["conj1", [], [42]])
def test_input_validation(theory, X):
    with pytest.raises((TypeError, ValueError)):
        StrategyGeneraliser(theory=theory).fit(X)


def test_scripts_need_a_theory():
    with pytest.raises(ValueError):
        StrategyGeneraliser().fit([("conj1", "long")])
