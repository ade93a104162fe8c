from __future__ import annotations

import pytest

from proofstrat.generalise import generalise_pipeline, trace_to_graph
from proofstrat.kernel import replay_script
from proofstrat.textio import bundled_theory_path, load_theory

THEORY_PATH = bundled_theory_path()


@pytest.fixture(scope="session")
def theory():
    return load_theory(THEORY_PATH)


@pytest.fixture(scope="session")
def trace1(theory):
    conj, script = theory.scripts["long"]
    return replay_script(theory, conj, script)


@pytest.fixture(scope="session")
def trace2(theory):
    conj, script = theory.scripts["short"]
    return replay_script(theory, conj, script)


@pytest.fixture(scope="session")
def graph1(trace1):
    return trace_to_graph(trace1)


@pytest.fixture(scope="session")
def pipeline1(trace1):
    return generalise_pipeline(trace1)


@pytest.fixture(scope="session")
def mutation(pipeline1):
    return pipeline1.graph


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines.items()):
        terminalreporter.write_line(line)
