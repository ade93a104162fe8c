"""Feature data: disjunctions of conjunctions of atoms, kept canonical.

A value is either ``TOP`` or a frozenset of conjuncts (frozensets of
``Datum``).  The empty disjunction is the feature bottom.  Canonical form
drops unsatisfiable conjuncts and absorbed supersets, so two values are
semantically equal exactly when they are ``==``.

Reading of an atom depends on the feature.  An element induces a *world*,
the set of atoms true of it; a conjunct holds when all its atoms are in the
world, and ``BOT`` holds when the world is empty.  For ``top_symbol`` and
``is_match`` every world has exactly one atom, which makes conjuncts of two
distinct atoms (or of ``BOT``) unsatisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Union

TOP_SYMBOL = "top_symbol"
HAS_SYMBOL = "has_symbol"
IS_MATCH = "is_match"
SYMB_AT_POS = "symb_at_pos"

CLASS_FEATURES = (TOP_SYMBOL, HAS_SYMBOL)
LINK_FEATURES = (IS_MATCH, SYMB_AT_POS)

# features whose worlds hold exactly one atom
EXCLUSIVE = frozenset({TOP_SYMBOL, IS_MATCH})
# features whose atom universe is finite: name -> all atoms
FINITE = {}


class DataSyntaxError(ValueError):
    pass


# -- data atoms ---------------------------------------------------------------

_SYM_RANK = {"/\\": 0, "*": 1, "\\/": 2, "pure": 3}


@total_ordering
@dataclass(frozen=True)
class Datum:
    kind: str  # bot | sym | pos | bool | int | term
    value: object = None

    def _key(self):
        rank = ("bot", "bool", "pos", "sym", "int", "term").index(self.kind)
        if self.kind == "sym":
            return (rank, _SYM_RANK.get(self.value, len(_SYM_RANK)), self.value)
        if self.kind == "term":
            from .terms import print_term
            return (rank, 0, print_term(self.value))
        return (rank, 0, self.value)

    def __lt__(self, other):
        return self._key() < other._key()

    def __str__(self) -> str:
        if self.kind == "bot":
            return "bot"
        if self.kind == "bool":
            return "true" if self.value else "false"
        if self.kind == "pos":
            return ".".join(map(str, self.value)) if self.value else "eps"
        if self.kind == "int":
            return f"#{self.value}"
        if self.kind == "term":
            from .terms import print_term
            return f"`{print_term(self.value)}`"
        return str(self.value)


BOT = Datum("bot")
TRUE = Datum("bool", True)
FALSE = Datum("bool", False)
FINITE[IS_MATCH] = frozenset({TRUE, FALSE})


def Sym(name: str) -> Datum:
    return Datum("sym", name)


def Pos(*path: int) -> Datum:
    if len(path) == 1 and isinstance(path[0], (tuple, list)):
        path = tuple(path[0])
    return Datum("pos", tuple(path))


def Bool(b: bool) -> Datum:
    return TRUE if b else FALSE


def Int(n: int) -> Datum:
    return Datum("int", int(n))


def TermDatum(t) -> Datum:
    return Datum("term", t)


# -- feature data -------------------------------------------------------------

class _Top:
    __slots__ = ()

    def __repr__(self):
        return "TOP"

    def __str__(self):
        return "top"

    def __reduce__(self):
        return "TOP"


TOP = _Top()
BOTTOM = frozenset()  # the feature bottom: no conjunct is satisfiable

FeatureData = Union[_Top, frozenset]


def _satisfiable(conj: frozenset, feature) -> bool:
    if BOT in conj and len(conj) > 1:
        return False
    if feature in EXCLUSIVE:
        if len(conj) > 1 or BOT in conj:
            return False
    universe = FINITE.get(feature)
    if universe is not None and not conj <= universe:
        return False
    return True


def canon(dnf, feature=None) -> FeatureData:
    """Canonical form of ``dnf`` (TOP or an iterable of atom iterables)."""
    if dnf is TOP:
        return TOP
    conjs = {frozenset(c) for c in dnf}
    conjs = {c for c in conjs if _satisfiable(c, feature)}
    if frozenset() in conjs:
        return TOP
    keep = frozenset(c for c in conjs if not any(o < c for o in conjs))
    universe = FINITE.get(feature)
    if universe is not None and feature in EXCLUSIVE:
        if {frozenset({a}) for a in universe} <= keep:
            return TOP
    return keep


def data(rows: Iterable[Iterable[Datum]], feature=None) -> FeatureData:
    return canon(rows, feature)


def sem(d: FeatureData):
    """Set-of-conjuncts semantics; ``TOP`` is returned as itself."""
    return TOP if d is TOP else frozenset(d)


def meet_f(x: FeatureData, y: FeatureData, feature=None) -> FeatureData:
    if x is TOP:
        return canon(y, feature)
    if y is TOP:
        return canon(x, feature)
    return canon((a | b for a in x for b in y), feature)


def join_f(x: FeatureData, y: FeatureData, feature=None) -> FeatureData:
    if x is TOP or y is TOP:
        return TOP
    return canon(set(x) | set(y), feature)


def leq_f(x: FeatureData, y: FeatureData, feature=None) -> bool:
    return meet_f(x, y, feature) == canon(x, feature)


def is_bottom(d: FeatureData) -> bool:
    return d is not TOP and not d


# -- worlds and matching ------------------------------------------------------

def holds(d: FeatureData, world: frozenset) -> bool:
    """Does some conjunct of ``d`` hold in ``world``?"""
    if d is TOP:
        return True
    for conj in d:
        if BOT in conj:
            if not world:
                return True
        elif conj <= world:
            return True
    return False


# -- printing ----------------------------------------------------------------

def sorted_conjuncts(d: frozenset) -> list:
    rows = [sorted(c) for c in d]
    rows.sort(key=lambda r: (len(r), [a._key() for a in r]))
    return rows


def format_data(d: FeatureData) -> str:
    if d is TOP:
        return "top"
    if not d:
        return "bot"
    return "[" + ",".join("[" + ",".join(str(a) for a in row) + "]"
                          for row in sorted_conjuncts(d)) + "]"
