"""Goal classes, links, goal types and goals, with their lattice operations."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .kernel import ProofState
from .lattice import (CLASS_FEATURES, HAS_SYMBOL, IS_MATCH, SYMB_AT_POS,
                      TOP, TOP_SYMBOL, Bool, FeatureData, Pos, Sym,
                      canon, holds, is_bottom, join_f, meet_f)
from .terms import Term, leaf_positions, operator_symbols, top_symbol_of
from .util import FrozenDict

CONCL = "concl"


class PairingError(ValueError):
    """Two classes in one fact set share a provenance label."""


def _clean(entries: dict, features=None) -> FrozenDict:
    out = {}
    for k in sorted(entries, key=str):
        feat = k if isinstance(k, str) else k[0]
        v = canon(entries[k], feat)
        if v is not TOP:
            out[k] = v
    return FrozenDict(out)


# -- classes -----------------------------------------------------------------

@dataclass(frozen=True)
class GoalClass:
    label: str
    features: FrozenDict = field(default_factory=FrozenDict)

    def __init__(self, label: str, features=None):
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "features", _clean(dict(features or {})))

    def __getitem__(self, f: str) -> FeatureData:
        return self.features.get(f, TOP)

    def relabel(self, label: str) -> "GoalClass":
        return GoalClass(label, self.features)


def bottom_class(label: str = CONCL) -> GoalClass:
    return GoalClass(label, {f: frozenset() for f in CLASS_FEATURES})


def _merge_label(a: str, b: str) -> str:
    return a if a == b else "+".join(sorted({a, b}))


def class_meet(c1: GoalClass, c2: GoalClass) -> GoalClass:
    return GoalClass(_merge_label(c1.label, c2.label),
                     {f: meet_f(c1[f], c2[f], f) for f in CLASS_FEATURES})


def class_join(c1: GoalClass, c2: GoalClass) -> GoalClass:
    return GoalClass(_merge_label(c1.label, c2.label),
                     {f: join_f(c1[f], c2[f], f) for f in CLASS_FEATURES})


def class_orthogonal(c1: GoalClass, c2: GoalClass) -> bool:
    return any(is_bottom(meet_f(c1[f], c2[f], f)) for f in CLASS_FEATURES)


def class_subtype(c1: GoalClass, c2: GoalClass) -> bool:
    return all(meet_f(c1[f], c2[f], f) == c1[f] for f in CLASS_FEATURES)


gen_class = class_join


def class_world(feature: str, e: Term) -> frozenset:
    if feature == TOP_SYMBOL:
        return frozenset({Sym(top_symbol_of(e))})
    if feature == HAS_SYMBOL:
        return frozenset(Sym(s) for s in operator_symbols(e))
    return frozenset()


def match_class(c: GoalClass, e: Term) -> bool:
    return all(holds(c[f], class_world(f, e)) for f in CLASS_FEATURES)


# -- links -------------------------------------------------------------------

@dataclass(frozen=True)
class Link:
    """Entries keyed ``(feature, ref1, ref2)``; refs are ``concl`` or a fact label."""

    entries: FrozenDict = field(default_factory=FrozenDict)

    def __init__(self, entries=None):
        object.__setattr__(self, "entries", _clean(dict(entries or {})))

    def __getitem__(self, key) -> FeatureData:
        return self.entries.get(key, TOP)

    def keys(self):
        return self.entries.keys()

    def refs(self) -> frozenset:
        return frozenset(r for k in self.entries for r in k[1:])


def _link_keys(l1: Link, l2: Link):
    return sorted(set(l1.keys()) | set(l2.keys()), key=str)


def link_meet(l1: Link, l2: Link) -> Link:
    return Link({k: meet_f(l1[k], l2[k], k[0]) for k in _link_keys(l1, l2)})


def link_join(l1: Link, l2: Link) -> Link:
    return Link({k: join_f(l1[k], l2[k], k[0]) for k in _link_keys(l1, l2)})


def link_orthogonal(l1: Link, l2: Link) -> bool:
    return any(is_bottom(meet_f(l1[k], l2[k], k[0])) for k in _link_keys(l1, l2))


def link_subtype(l1: Link, l2: Link) -> bool:
    return all(meet_f(l1[k], l2[k], k[0]) == l1[k] for k in _link_keys(l1, l2))


gen_link = link_join


def link_world(feature: str, e1: Term, e2: Term) -> frozenset:
    if feature == IS_MATCH:
        return frozenset({Bool(e1 == e2)})
    if feature == SYMB_AT_POS:
        common = leaf_positions(e1) & leaf_positions(e2)
        return frozenset(Pos(p) for p, _ in common)
    return frozenset()


def match_link_feature(name: str, d: FeatureData, e1: Term, e2: Term) -> bool:
    return holds(canon(d, name), link_world(name, e1, e2))


# -- goal types --------------------------------------------------------------

@dataclass(frozen=True)
class GoalType:
    concl: GoalClass
    facts: tuple = ()
    link: Link = field(default_factory=Link)

    def __init__(self, concl: GoalClass, facts=(), link: Optional[Link] = None):
        facts = tuple(sorted(facts, key=lambda c: c.label))
        labels = [c.label for c in facts]
        if len(set(labels)) != len(labels):
            raise PairingError(f"duplicate fact class label in {labels}")
        if concl.label != CONCL:
            concl = concl.relabel(CONCL)
        object.__setattr__(self, "concl", concl)
        object.__setattr__(self, "facts", facts)
        object.__setattr__(self, "link", link if link is not None else Link())

    def fact(self, label: str) -> Optional[GoalClass]:
        for c in self.facts:
            if c.label == label:
                return c
        return None

    @property
    def fact_labels(self) -> tuple:
        return tuple(c.label for c in self.facts)


def gt_meet(g1: GoalType, g2: GoalType) -> GoalType:
    return GoalType(class_meet(g1.concl, g2.concl),
                    _pair_map(g1.facts, g2.facts, class_meet),
                    link_meet(g1.link, g2.link))


def gt_orthogonal(g1: GoalType, g2: GoalType) -> bool:
    return (class_orthogonal(g1.concl, g2.concl)
            or link_orthogonal(g1.link, g2.link)
            or all(class_orthogonal(f1, f2) for f1 in g1.facts for f2 in g2.facts))


def gt_subtype(g1: GoalType, g2: GoalType) -> bool:
    return (class_subtype(g1.concl, g2.concl)
            and link_subtype(g1.link, g2.link)
            and any(class_subtype(f1, f2) for f1 in g1.facts for f2 in g2.facts))


def _pair_map(f1, f2, op) -> list:
    by1, by2 = {}, {}
    for src, by in ((f1, by1), (f2, by2)):
        for c in src:
            if c.label in by:
                raise PairingError(f"ambiguous class label {c.label!r}")
            by[c.label] = c
    out = []
    for label in sorted(set(by1) | set(by2)):
        if label in by1 and label in by2:
            out.append(op(by1[label], by2[label]))
        else:
            out.append(by1.get(label) or by2[label])
    return out


def gen_map(f1, f2) -> list:
    """Pair classes by label, join the pairs, keep orphans, then drop any
    class that sits below another one it overlaps with."""
    joined = _pair_map(f1, f2, class_join)
    keep = []
    for i, h1 in enumerate(joined):
        dominated = any(
            j != i and class_subtype(h1, h2) and not class_orthogonal(h1, h2)
            and not (class_subtype(h2, h1) and j > i)
            for j, h2 in enumerate(joined))
        if not dominated:
            keep.append(h1)
    return keep


def gen_goal_type(g1: GoalType, g2: GoalType) -> GoalType:
    return GoalType(gen_class(g1.concl, g2.concl),
                    gen_map(g1.facts, g2.facts),
                    gen_link(g1.link, g2.link))


gt_join = gen_goal_type


# -- goals -------------------------------------------------------------------

@dataclass(frozen=True)
class Goal:
    fmap: FrozenDict
    ps: ProofState
    parent: tuple = field(default=(), compare=False, hash=False)

    def __init__(self, fmap, ps: ProofState, parent=()):
        fm = FrozenDict({k: frozenset(v) for k, v in sorted(dict(fmap).items())})
        object.__setattr__(self, "fmap", fm)
        object.__setattr__(self, "ps", ps)
        if isinstance(parent, Goal):
            parent = (parent,)
        object.__setattr__(self, "parent", tuple(parent))

    @property
    def concl(self) -> Term:
        return self.ps.concl

    def facts(self) -> frozenset:
        """Every fact in the range of ``fmap``."""
        return frozenset().union(*self.fmap.values()) if self.fmap else frozenset()


def resolve(g: Goal, ref: str):
    if ref == CONCL:
        return frozenset({g.concl})
    return g.fmap.get(ref)


def link_entry_holds(g: Goal, key, d: FeatureData) -> bool:
    name, r1, r2 = key
    s1, s2 = resolve(g, r1), resolve(g, r2)
    if not s1 or not s2:
        return False
    if not any(match_link_feature(name, d, a, b) for a, b in product(s1, s2)):
        return False
    return (all(any(match_link_feature(name, d, a, b) for b in s2) for a in s1)
            and all(any(match_link_feature(name, d, a, b) for a in s1) for b in s2))


def goal_has_type(g: Goal, G) -> bool:
    if not isinstance(G, GoalType):  # a label variable admits every goal
        return True
    if not match_class(G.concl, g.concl):
        return False
    for c in G.facts:
        members = g.fmap.get(c.label)
        if not members or not all(match_class(c, e) for e in members):
            return False
    return all(link_entry_holds(g, k, d) for k, d in G.link.entries.items())
