"""Brute-force membership semantics for feature data, independent of the package."""

from __future__ import annotations

from itertools import chain, combinations

OTHER = "other"


def subsets(xs):
    xs = list(xs)
    return [frozenset(c) for c in chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))]


def worlds(feature, universe):
    """Every possible observation of one term (or pair of terms) for ``feature``.

    ``universe`` holds atom reprs; ``OTHER`` stands for any atom outside it.
    """
    atoms = list(universe) + [OTHER]
    if feature in ("top_symbol", "is_match"):
        ws = [frozenset({x}) for x in atoms]
        if feature == "is_match":
            ws = [w for w in ws if OTHER not in w]
        return ws
    return subsets(atoms)


def member(raw, world, key):
    """Does raw DNF ``raw`` (list of lists, or "top") hold in ``world``?"""
    if raw == "top":
        return True
    for conj in raw:
        names = {key(x) for x in conj}
        if "bot" in names:
            if names == {"bot"} and not world:
                return True
            continue
        if names <= world:
            return True
    return False


def extension(raw, feature, universe, key):
    return frozenset(w for w in worlds(feature, universe) if member(raw, w, key))
