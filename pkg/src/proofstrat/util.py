from __future__ import annotations

from collections.abc import Mapping


class FrozenDict(Mapping):
    """Hashable read-only mapping.  Iteration keeps insertion order."""

    __slots__ = ("_d", "_h")

    def __init__(self, *args, **kwargs):
        self._d = dict(*args, **kwargs)
        self._h = None

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._d.items()))
        return self._h

    def __eq__(self, other):
        if isinstance(other, FrozenDict):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == dict(other)
        return NotImplemented

    def __repr__(self):
        return f"FrozenDict({self._d!r})"

    def set(self, key, value) -> "FrozenDict":
        d = dict(self._d)
        d[key] = value
        return FrozenDict(d)

    def without(self, *keys) -> "FrozenDict":
        return FrozenDict({k: v for k, v in self._d.items() if k not in keys})
