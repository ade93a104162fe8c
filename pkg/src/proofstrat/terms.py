"""Object-logic terms, positions, matching and rewriting primitives.

Terms are immutable trees built from atoms, pattern variables and three
operators: binary ``*`` (separating conjunction), binary ``/\\`` and the
unary predicate ``pure``.  Positions are 1-based child paths, the root
being the empty tuple.

Surface grammar (``*`` binds tighter than ``/\\``, both right-associative)::

    term  := wterm
    wterm := sterm ("/\\" wterm)?
    sterm := aterm ("*" sterm)?
    aterm := IDENT | "pure" "(" term ")" | "(" term ")"

Lower-case identifiers are atoms, upper-case identifiers are pattern
variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

STAR = "*"
WEDGE = "/\\"
PURE = "pure"

ARITY = {STAR: 2, WEDGE: 2, PURE: 1}

Position = tuple


class TermError(ValueError):
    """Raised for malformed terms, bad positions or parse failures."""


class TermSyntaxError(TermError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True, order=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Var:
    """Pattern metavariable; only appears in equation patterns."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in ARITY:
            raise TermError(f"unknown operator {self.op!r}")
        if len(self.args) != ARITY[self.op]:
            raise TermError(
                f"{self.op} expects {ARITY[self.op]} arguments, got {len(self.args)}")

    def __str__(self) -> str:
        return print_term(self)


Term = Union[Atom, Var, App]
Substitution = Mapping[str, Term]


def star(left: Term, right: Term) -> App:
    return App(STAR, (left, right))


def wedge(left: Term, right: Term) -> App:
    return App(WEDGE, (left, right))


def pure(arg: Term) -> App:
    return App(PURE, (arg,))


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<wedge>/\\)|(?P<punct>[*()])|(?P<ident>[A-Za-z][A-Za-z0-9_]*'*))")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise TermSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        start = m.start(m.lastgroup)
        tokens.append((m.group(m.lastgroup), start))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = alphabet

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def offset(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def expect(self, tok: str):
        if self.peek() != tok:
            found = self.peek() or "end of input"
            raise TermSyntaxError(f"expected {tok!r}, found {found!r}", self.offset())
        self.i += 1

    def term(self) -> Term:
        left = self.sterm()
        if self.peek() == WEDGE:
            self.i += 1
            return wedge(left, self.term())
        return left

    def sterm(self) -> Term:
        left = self.aterm()
        if self.peek() == STAR:
            self.i += 1
            return star(left, self.sterm())
        return left

    def aterm(self) -> Term:
        tok = self.peek()
        at = self.offset()
        if tok is None:
            raise TermSyntaxError("unexpected end of input", at)
        if tok == "(":
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if tok == PURE:
            self.i += 1
            self.expect("(")
            inner = self.term()
            self.expect(")")
            return pure(inner)
        if tok in (STAR, WEDGE, ")"):
            raise TermSyntaxError(f"unexpected {tok!r}", at)
        self.i += 1
        if tok[0].isupper():
            return Var(tok)
        if self.alphabet is not None and tok not in self.alphabet:
            raise TermSyntaxError(f"unknown symbol {tok!r}", at)
        return Atom(tok)


def parse_term(text: str, alphabet=None) -> Term:
    """Parse ``text``; atoms must belong to ``alphabet`` when one is given."""
    p = _Parser(text, None if alphabet is None else frozenset(alphabet))
    t = p.term()
    if p.peek() is not None:
        raise TermSyntaxError(f"trailing input {p.peek()!r}", p.offset())
    return t


def print_term(t: Term) -> str:
    """Print with the fewest parentheses that parse back to ``t``."""
    if isinstance(t, (Atom, Var)):
        return t.name
    if t.op == PURE:
        return f"pure({print_term(t.args[0])})"
    left, right = t.args
    ls, rs = print_term(left), print_term(right)
    if t.op == STAR:
        if isinstance(left, App) and left.op in (STAR, WEDGE):
            ls = f"({ls})"
        if isinstance(right, App) and right.op == WEDGE:
            rs = f"({rs})"
        return f"{ls} * {rs}"
    if isinstance(left, App) and left.op == WEDGE:
        ls = f"({ls})"
    return f"{ls} /\\ {rs}"


# -- positions ---------------------------------------------------------------

def _children(t: Term) -> tuple:
    return t.args if isinstance(t, App) else ()


def subterm_at(t: Term, p: Position) -> Term:
    for depth, i in enumerate(p):
        kids = _children(t)
        if not 1 <= i <= len(kids):
            raise TermError(f"invalid position {tuple(p)} (index {i} at depth {depth})")
        t = kids[i - 1]
    return t


def replace_at(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    kids = _children(t)
    i = p[0]
    if not 1 <= i <= len(kids):
        raise TermError(f"invalid position {tuple(p)}")
    new = list(kids)
    new[i - 1] = replace_at(kids[i - 1], p[1:], s)
    return App(t.op, tuple(new))


def positions(t: Term, prefix: Position = ()) -> Iterator[Position]:
    """All positions of ``t`` in preorder."""
    yield prefix
    for i, c in enumerate(_children(t), 1):
        yield from positions(c, prefix + (i,))


def positions_postorder(t: Term, prefix: Position = ()) -> Iterator[Position]:
    """All positions of ``t``, children before parents, left to right."""
    for i, c in enumerate(_children(t), 1):
        yield from positions_postorder(c, prefix + (i,))
    yield prefix


def leaf_positions(t: Term) -> frozenset:
    """Pairs ``(position, atom name)`` for every atom occurrence."""
    out = set()
    for p in positions(t):
        s = subterm_at(t, p)
        if isinstance(s, Atom):
            out.add((p, s.name))
    return frozenset(out)


def operator_symbols(t: Term) -> frozenset:
    if isinstance(t, App):
        return frozenset({t.op}).union(*(operator_symbols(a) for a in t.args))
    return frozenset()


def top_symbol_of(t: Term) -> str:
    return t.op if isinstance(t, App) else t.name


def variables(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset({t.name})
    if isinstance(t, App):
        return frozenset().union(*(variables(a) for a in t.args))
    return frozenset()


def is_ground(t: Term) -> bool:
    return not variables(t)


def atoms_of(t: Term) -> frozenset:
    return frozenset(name for _, name in leaf_positions(t))


# -- matching ----------------------------------------------------------------

def match_term(pattern: Term, t: Term, subst: Optional[dict] = None) -> Optional[dict]:
    """First-order matching of ``pattern`` against ground ``t``.

    Returns the unique substitution or ``None``.
    """
    subst = {} if subst is None else dict(subst)
    stack = [(pattern, t)]
    while stack:
        pat, term = stack.pop()
        if isinstance(pat, Var):
            bound = subst.get(pat.name)
            if bound is None:
                subst[pat.name] = term
            elif bound != term:
                return None
        elif isinstance(pat, Atom):
            if pat != term:
                return None
        else:
            if not isinstance(term, App) or term.op != pat.op:
                return None
            stack.extend(zip(pat.args, term.args))
    return subst


def instantiate(pattern: Term, subst: Substitution) -> Term:
    if isinstance(pattern, Var):
        return subst.get(pattern.name, pattern)
    if isinstance(pattern, App):
        return App(pattern.op, tuple(instantiate(a, subst) for a in pattern.args))
    return pattern
