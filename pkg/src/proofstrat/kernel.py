"""Proof states, equations, the ``subst``/``rule`` tactics and script replay."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .terms import (Term, instantiate, is_ground, match_term, positions_postorder,
                    print_term, replace_at, subterm_at, variables)
from .util import FrozenDict


class KernelError(ValueError):
    pass


class ReplayError(KernelError):
    """No branch of the replay search consumed the whole script.

    ``step`` is the 0-based index of the deepest script entry that could
    not be applied (``len(script)`` when goals were left over).
    """

    def __init__(self, message: str, step: int, goal: Optional["ProofState"] = None):
        super().__init__(message)
        self.step = step
        self.goal = goal


@dataclass(frozen=True)
class Equation:
    name: str
    lhs: Term
    rhs: Term
    condition: Optional[Term] = None

    def __post_init__(self):
        lv = variables(self.lhs)
        if not variables(self.rhs) <= lv:
            raise KernelError(f"{self.name}: right-hand side introduces variables")
        if self.condition is not None and not variables(self.condition) <= lv:
            raise KernelError(f"{self.name}: condition introduces variables")

    @property
    def conditional(self) -> bool:
        return self.condition is not None

    def __str__(self) -> str:
        cond = f"{print_term(self.condition)} ==> " if self.condition is not None else ""
        return f"{self.name}: {cond}{print_term(self.lhs)} <-> {print_term(self.rhs)}"


@dataclass(frozen=True)
class ProofState:
    hyps: FrozenDict
    concl: Term

    def __init__(self, hyps, concl: Term):
        object.__setattr__(self, "hyps", FrozenDict(hyps))
        object.__setattr__(self, "concl", concl)

    def with_concl(self, concl: Term) -> "ProofState":
        return ProofState(self.hyps, concl)

    def __str__(self) -> str:
        hyps = ", ".join(f"{n}: {print_term(t)}" for n, t in sorted(self.hyps.items()))
        return f"{hyps} |- {print_term(self.concl)}"


@dataclass(frozen=True)
class RuleRefs:
    names: frozenset

    def __init__(self, names):
        if isinstance(names, str):
            names = [names]
        object.__setattr__(self, "names", frozenset(names))

    def __str__(self) -> str:
        return ", ".join(sorted(self.names))


@dataclass(frozen=True)
class ClassRef:
    label: str

    def __str__(self) -> str:
        return f"class {self.label}"


@dataclass(frozen=True)
class TacticApp:
    kind: str  # "subst" or "rule"
    arg: Union[RuleRefs, ClassRef]

    def __post_init__(self):
        if self.kind not in ("subst", "rule"):
            raise KernelError(f"unknown tactic kind {self.kind!r}")
        if self.kind == "subst" and not isinstance(self.arg, RuleRefs):
            raise KernelError("subst takes equation names")

    def __str__(self) -> str:
        if self.kind == "subst":
            return "subst {" + ", ".join(sorted(self.arg.names)) + "}"
        return f"rule {self.arg}"


def subst(*names: str) -> TacticApp:
    return TacticApp("subst", RuleRefs(names))


def rule(*names: str) -> TacticApp:
    return TacticApp("rule", RuleRefs(names))


def rule_class(label: str) -> TacticApp:
    return TacticApp("rule", ClassRef(label))


def hypothesis_label(name: str) -> str:
    """Provenance label of a hypothesis: its base name, upper-cased.

    Trailing primes are dropped so analogous assumptions (``p``, ``p'``)
    share a label.
    """
    base = name.rstrip("'")
    return (base or name).upper()


# -- atomic tactics ----------------------------------------------------------

def apply_subst(eqs: Sequence[Equation], ps: ProofState) -> list:
    """One rewrite step, left to right, at every matching position.

    Returns a list of alternatives with duplicates removed.  Order is
    deterministic: equations by name, then innermost-leftmost positions
    first, so replay prefers local reassociation over rewriting at the root.  A conditional
    equation yields ``[condition goal, rewritten goal]``.
    """
    out = []
    seen = set()
    for eq in sorted(eqs, key=lambda e: e.name):
        for p in positions_postorder(ps.concl):
            sigma = match_term(eq.lhs, subterm_at(ps.concl, p))
            if sigma is None:
                continue
            rewritten = ps.with_concl(replace_at(ps.concl, p, instantiate(eq.rhs, sigma)))
            if eq.condition is not None:
                alt = (ps.with_concl(instantiate(eq.condition, sigma)), rewritten)
            else:
                alt = (rewritten,)
            if alt not in seen:
                seen.add(alt)
                out.append(list(alt))
    return out


def apply_rule(candidates, ps: ProofState) -> list:
    """Discharge ``ps`` when its conclusion is one of ``candidates``."""
    return [[]] if any(c == ps.concl for c in candidates) else []


# -- theory ------------------------------------------------------------------

@dataclass(frozen=True)
class Conjecture:
    name: str
    hyps: tuple  # ((name, term), ...) in declaration order
    concl: Term

    @property
    def state(self) -> ProofState:
        return ProofState(dict(self.hyps), self.concl)


@dataclass
class Theory:
    alphabet: frozenset = frozenset()
    axioms: dict = field(default_factory=dict)
    conjectures: dict = field(default_factory=dict)
    scripts: dict = field(default_factory=dict)  # name -> (conjecture, [TacticApp])

    def equations(self, names) -> list:
        return [self.axioms[n] for n in sorted(names) if n in self.axioms]


def run_tactic(theory: Theory, tac: TacticApp, ps: ProofState, fmap=None) -> list:
    """Apply ``tac`` to ``ps``; class arguments resolve through ``fmap``.

    Without an ``fmap`` a class argument resolves to the hypotheses whose
    provenance label equals the class label.
    """
    if tac.kind == "subst":
        return apply_subst(theory.equations(tac.arg.names), ps)
    if isinstance(tac.arg, ClassRef):
        if fmap is not None:
            candidates = fmap.get(tac.arg.label, ())
        else:
            candidates = [t for n, t in ps.hyps.items() if hypothesis_label(n) == tac.arg.label]
    else:
        candidates = [ps.hyps[n] for n in tac.arg.names if n in ps.hyps]
        # rule may also close a goal with an unconditional ground axiom
        candidates += [e.lhs for n, e in theory.axioms.items()
                       if n in tac.arg.names and is_ground(e.lhs) and e.condition is None]
    return apply_rule(candidates, ps)


# -- replay ------------------------------------------------------------------

@dataclass(frozen=True)
class TraceNode:
    state: ProofState
    tactic: TacticApp
    children: tuple = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def preorder(self):
        yield self
        for c in self.children:
            yield from c.preorder()


@dataclass(frozen=True)
class ProofTrace:
    root: TraceNode
    conjecture: str = ""

    def __len__(self) -> int:
        return self.root.size()

    def nodes(self) -> list:
        return list(self.root.preorder())

    @property
    def initial_state(self) -> ProofState:
        return self.root.state


def replay_script(theory: Theory, conjecture: str, script: Sequence[TacticApp]) -> ProofTrace:
    """Depth-first replay of ``script`` on ``conjecture``.

    Script entries are applied in order to the leftmost open goal; every
    alternative a tactic returns is a backtrack point.  The search depth is
    bounded by the script length.
    """
    try:
        conj = theory.conjectures[conjecture]
    except KeyError:
        raise KernelError(f"unknown conjecture {conjecture!r}") from None
    script = list(script)
    deepest = [0, conj.state, "no tactic applicable"]

    def go(frontier: tuple, i: int):
        # returns (trace nodes for frontier, next index) or None
        if not frontier:
            return ((), i)
        if i >= len(script):
            if i >= deepest[0]:
                deepest[:] = [i, frontier[0], "script exhausted with open goals"]
            return None
        goal, rest = frontier[0], frontier[1:]
        tac = script[i]
        alternatives = run_tactic(theory, tac, goal)
        if not alternatives and i >= deepest[0]:
            deepest[:] = [i, goal, f"{tac} failed"]
        for children in alternatives:
            k = len(children)
            res = go(tuple(children) + rest, i + 1)
            if res is None:
                continue
            nodes, j = res
            node = TraceNode(goal, tac, tuple(nodes[:k]))
            return ((node,) + nodes[k:], j)
        return None

    res = go((conj.state,), 0)
    if res is None or res[1] != len(script):
        step, goal, why = deepest
        raise ReplayError(f"replay failed at step {step + 1}: {why}", step, goal)
    return ProofTrace(res[0][0], conjecture)


def check_trace(theory: Theory, trace: ProofTrace) -> bool:
    """Re-run every node's tactic and confirm its children are a result."""
    for node in trace.nodes():
        kids = [c.state for c in node.children]
        if kids not in run_tactic(theory, node.tactic, node.state):
            return False
    return True
