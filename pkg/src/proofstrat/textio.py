"""Theory files, goal-type expressions and strategy files."""

from __future__ import annotations

import re
from typing import Optional

from .goaltypes import CONCL, GoalClass, GoalType, Link
from .graph import (AtomicTactic, GraphTactic, LabelVar, StrategyGraph, Wire)
from .kernel import (ClassRef, Conjecture, Equation, KernelError, RuleRefs,
                     TacticApp, Theory)
from .lattice import (BOT, FALSE, TRUE, TOP, Datum, Int, Pos, Sym, TermDatum,
                      canon, format_data)
from .terms import TermError, parse_term, print_term


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


# -- theory files -------------------------------------------------------------

_NAME = r"[A-Za-z][A-Za-z0-9_]*'*"


def _statements(text: str):
    """Join continuation lines (leading whitespace) onto their statement."""
    stmts = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if raw[:1].isspace() and stmts:
            stmts[-1][1] += " " + line.strip()
        else:
            stmts.append([no, line.strip()])
    return stmts


def parse_tactic(text: str) -> TacticApp:
    text = text.strip()
    m = re.fullmatch(r"(subst|rule)\s+(.*)", text)
    if not m:
        raise ParseError(f"bad tactic {text!r}")
    kind, arg = m.groups()
    arg = arg.strip()
    cm = re.fullmatch(rf"class\s+({_NAME})", arg)
    if cm:
        if kind != "rule":
            raise ParseError("only rule takes a class argument")
        return TacticApp("rule", ClassRef(cm.group(1)))
    if arg.startswith("{"):
        if not arg.endswith("}"):
            raise ParseError(f"unclosed rule set in {text!r}")
        names = [n.strip() for n in arg[1:-1].split(",") if n.strip()]
    else:
        names = [arg]
    for n in names:
        if not re.fullmatch(_NAME, n):
            raise ParseError(f"bad name {n!r}")
    if not names:
        raise ParseError("empty rule set")
    return TacticApp(kind, RuleRefs(names))


def parse_theory(text: str) -> Theory:
    th = Theory()
    alphabet = None
    for no, st in _statements(text):
        try:
            head = st.split(None, 1)[0]
            if head == "atoms":
                names = st.split()[1:]
                alphabet = frozenset(names) | (alphabet or frozenset())
                th.alphabet = alphabet
            elif head == "axiom":
                m = re.fullmatch(rf"axiom\s+({_NAME})\s*:\s*(.*)", st)
                if not m:
                    raise ParseError("expected 'axiom NAME: ...'", no)
                name, body = m.groups()
                cond = None
                if "==>" in body:
                    c, body = body.split("==>", 1)
                    cond = parse_term(c, alphabet)
                if "<->" not in body:
                    raise ParseError("axiom needs '<->'", no)
                lhs, rhs = body.split("<->", 1)
                if name in th.axioms:
                    raise ParseError(f"duplicate axiom {name}", no)
                th.axioms[name] = Equation(name, parse_term(lhs, alphabet),
                                           parse_term(rhs, alphabet), cond)
            elif head == "conjecture":
                m = re.fullmatch(rf"conjecture\s+({_NAME})\s*:\s*(.*)", st)
                if not m:
                    raise ParseError("expected 'conjecture NAME: ...'", no)
                name, body = m.groups()
                parts = re.split(r"\bshows\b", body)
                if len(parts) != 2:
                    raise ParseError("conjecture needs exactly one 'shows'", no)
                assumes, shows = parts
                hyps = []
                assumes = assumes.strip()
                if assumes:
                    if not assumes.startswith("assumes"):
                        raise ParseError("expected 'assumes'", no)
                    for item in re.split(r"\band\b", assumes[len("assumes"):]):
                        hm = re.fullmatch(rf"\s*({_NAME})\s*:\s*(.+?)\s*", item)
                        if not hm:
                            raise ParseError(f"bad assumption {item.strip()!r}", no)
                        hyps.append((hm.group(1), parse_term(hm.group(2), alphabet)))
                names = [h for h, _ in hyps]
                if len(set(names)) != len(names):
                    raise ParseError("duplicate hypothesis name", no)
                if name in th.conjectures:
                    raise ParseError(f"duplicate conjecture {name}", no)
                th.conjectures[name] = Conjecture(name, tuple(hyps), parse_term(shows, alphabet))
            elif head == "script":
                m = re.fullmatch(rf"script\s+({_NAME})\s+for\s+({_NAME})\s*:\s*(.*)", st)
                if not m:
                    raise ParseError("expected 'script NAME for CONJ: ...'", no)
                name, conj, body = m.groups()
                if conj not in th.conjectures:
                    raise ParseError(f"unknown conjecture {conj}", no)
                tacs = [parse_tactic(t) for t in body.split(";") if t.strip()]
                for t in tacs:
                    if t.kind == "subst":
                        missing = t.arg.names - set(th.axioms)
                        if missing:
                            raise ParseError(f"unknown axiom {sorted(missing)[0]}", no)
                if name in th.scripts:
                    raise ParseError(f"duplicate script {name}", no)
                th.scripts[name] = (conj, tacs)
            else:
                raise ParseError(f"unknown statement {head!r}", no)
        except (TermError, KernelError) as e:
            raise ParseError(str(e), no) from e
        except ParseError as e:
            if e.line is None:
                raise ParseError(str(e), no) from e
            raise
    return th


def load_theory(path) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())


# -- goal-type expressions ----------------------------------------------------

_TOK = re.compile(r"""\s*(?:
    (?P<term>`[^`]*`)
  | (?P<wedge>/\\) | (?P<vee>\\/)
  | (?P<int>\#-?\d+)
  | (?P<pos>\d+(?:\.\d+)*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<punct>->|[{}\[\]():,*=.])
)""", re.X)


class _Tokens:
    def __init__(self, text: str):
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOK.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}")
            self.toks.append((m.lastgroup, m.group(m.lastgroup)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def next(self):
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of expression")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, v):
        kind, got = self.next()
        if got != v:
            raise ParseError(f"expected {v!r}, found {got!r}")

    def done(self):
        if self.i != len(self.toks):
            raise ParseError(f"trailing input {self.peek()!r}")


def _datum(tk: _Tokens) -> Datum:
    kind, v = tk.next()
    if kind == "term":
        return TermDatum(parse_term(v[1:-1]))
    if kind == "int":
        return Int(int(v[1:]))
    if kind == "pos":
        return Pos(tuple(int(x) for x in v.split(".")))
    if kind in ("wedge", "vee"):
        return Sym(v)
    if v == "*":
        return Sym("*")
    if kind == "name":
        return {"bot": BOT, "true": TRUE, "false": FALSE, "eps": Pos(())}.get(v) or Sym(v)
    raise ParseError(f"unexpected {v!r} in data")


def _data(tk: _Tokens, feature=None):
    v = tk.peek()
    if v in ("top", "bot"):
        tk.next()
        return TOP if v == "top" else frozenset()
    tk.expect("[")
    rows = []
    while tk.peek() != "]":
        tk.expect("[")
        row = []
        while tk.peek() != "]":
            row.append(_datum(tk))
            if tk.peek() == ",":
                tk.next()
        tk.expect("]")
        rows.append(row)
        if tk.peek() == ",":
            tk.next()
    tk.expect("]")
    return canon(rows, feature)


def _class(tk: _Tokens, label: str) -> GoalClass:
    tk.expect("{")
    feats = {}
    while tk.peek() != "}":
        _, f = tk.next()
        tk.expect(":")
        feats[f] = _data(tk, f)
        if tk.peek() == ",":
            tk.next()
    tk.expect("}")
    return GoalClass(label, feats)


def _gt(tk: _Tokens) -> GoalType:
    tk.expect("gt")
    tk.expect("{")
    concl, facts, link = GoalClass(CONCL), [], {}
    while tk.peek() != "}":
        _, key = tk.next()
        tk.expect(":")
        if key == "concl":
            concl = _class(tk, CONCL)
        elif key == "facts":
            tk.expect("{")
            while tk.peek() != "}":
                _, label = tk.next()
                tk.expect(":")
                facts.append(_class(tk, label))
                if tk.peek() == ",":
                    tk.next()
            tk.expect("}")
        elif key == "link":
            tk.expect("{")
            while tk.peek() != "}":
                _, name = tk.next()
                tk.expect("(")
                _, r1 = tk.next()
                tk.expect(",")
                _, r2 = tk.next()
                tk.expect(")")
                tk.expect(":")
                link[(name, r1, r2)] = _data(tk, name)
                if tk.peek() == ",":
                    tk.next()
            tk.expect("}")
        else:
            raise ParseError(f"unknown goal-type field {key!r}")
        if tk.peek() == ",":
            tk.next()
    tk.expect("}")
    return GoalType(concl, facts, Link(link))


def parse_data(text: str, feature=None):
    tk = _Tokens(text)
    d = _data(tk, feature)
    tk.done()
    return d


def parse_class(text: str, label: str = "C") -> GoalClass:
    tk = _Tokens(text)
    c = _class(tk, label)
    tk.done()
    return c


def parse_goal_type(text: str) -> GoalType:
    tk = _Tokens(text)
    g = _gt(tk)
    tk.done()
    return g


def parse_label(text: str):
    text = text.strip()
    m = re.fullmatch(r"var\s+([A-Za-z_][A-Za-z0-9_]*)", text)
    if m:
        return LabelVar(m.group(1))
    return parse_goal_type(text)


def format_class(c: GoalClass) -> str:
    inner = ", ".join(f"{f}: {format_data(d)}" for f, d in sorted(c.features.items()))
    return "{" + inner + "}"


def format_goal_type(g: GoalType) -> str:
    facts = ", ".join(f"{c.label}: {format_class(c)}" for c in g.facts)
    link = ", ".join(f"{n}({a},{b}): {format_data(d)}"
                     for (n, a, b), d in sorted(g.link.entries.items()))
    return f"gt {{ concl: {format_class(g.concl)}, facts: {{{facts}}}, link: {{{link}}} }}"


def format_label(label) -> str:
    return str(label) if isinstance(label, LabelVar) else format_goal_type(label)


# -- strategy files -----------------------------------------------------------

def _format_node(nid: str, node, ind: str, out: list):
    if isinstance(node, AtomicTactic):
        t = node.tactic
        if isinstance(t.arg, ClassRef):
            out.append(f"{ind}node {nid} kind={t.kind} class={t.arg.label}")
        else:
            out.append(f"{ind}node {nid} kind={t.kind} args={{{','.join(sorted(t.arg.names))}}}")
        return
    out.append(f"{ind}node {nid} kind=graph name={node.name} {{")
    for child in node.children:
        out.append(f"{ind}  child {{")
        _format_graph(child, ind + "    ", out)
        out.append(f"{ind}  }}")
    out.append(f"{ind}}}")


def _end(e, boundary: str) -> str:
    return boundary if e is None else f"{e[0]}.{e[1]}"


def _format_graph(g: StrategyGraph, ind: str, out: list):
    for nid, node in g.nodes.items():
        _format_node(nid, node, ind, out)
    for w in g.wires.values():
        out.append(f"{ind}wire {w.id} {_end(w.src, 'in')} -> {_end(w.dst, 'out')} "
                   f"label={format_label(w.label)}")
    out.append(f"{ind}input {' '.join(g.inputs)}".rstrip())
    out.append(f"{ind}output {' '.join(g.outputs)}".rstrip())


def format_strategy(g: StrategyGraph) -> str:
    out = ["strategy"]
    _format_graph(g, "  ", out)
    out.append("end")
    return "\n".join(out) + "\n"


def _parse_end(s: str, boundary: str):
    if s == boundary:
        return None
    m = re.fullmatch(r"(\S+)\.(\d+)", s)
    if not m:
        raise ParseError(f"bad wire end {s!r}")
    return (m.group(1), int(m.group(2)))


def parse_strategy(text: str) -> StrategyGraph:
    lines = [(no, l.strip()) for no, l in enumerate(text.splitlines(), 1)
             if l.strip() and not l.strip().startswith("#")]
    if not lines or lines[0][1] != "strategy":
        raise ParseError("strategy file must start with 'strategy'", 1)
    pos = [1]

    def graph(closer: str) -> StrategyGraph:
        nodes, wires, inputs, outputs = {}, {}, (), ()
        while True:
            if pos[0] >= len(lines):
                raise ParseError(f"missing '{closer}'")
            no, line = lines[pos[0]]
            pos[0] += 1
            if line == closer:
                break
            try:
                word = line.split(None, 1)[0]
                if word == "node":
                    m = re.fullmatch(r"node\s+(\S+)\s+kind=(\w+)\s*(.*)", line)
                    if not m:
                        raise ParseError("bad node line", no)
                    nid, kind, rest = m.groups()
                    if nid in nodes:
                        raise ParseError(f"duplicate node {nid}", no)
                    if kind == "graph":
                        gm = re.fullmatch(r"name=(\S+)\s*\{", rest)
                        if not gm:
                            raise ParseError("bad graph node", no)
                        children = []
                        while lines[pos[0]][1] == "child {":
                            pos[0] += 1
                            children.append(graph("}"))
                        if lines[pos[0]][1] != "}":
                            raise ParseError("expected '}' after children", lines[pos[0]][0])
                        pos[0] += 1
                        nodes[nid] = GraphTactic(gm.group(1), tuple(children))
                    elif kind in ("subst", "rule"):
                        cm = re.fullmatch(r"class=(\S+)", rest)
                        am = re.fullmatch(r"args=\{([^}]*)\}", rest)
                        if cm and kind == "rule":
                            tac = TacticApp("rule", ClassRef(cm.group(1)))
                        elif am:
                            names = [n for n in am.group(1).split(",") if n]
                            tac = TacticApp(kind, RuleRefs(names))
                        else:
                            raise ParseError("bad tactic argument", no)
                        nodes[nid] = AtomicTactic(tac)
                    else:
                        raise ParseError(f"unknown node kind {kind}", no)
                elif word == "wire":
                    m = re.fullmatch(r"wire\s+(\S+)\s+(\S+)\s*->\s*(\S+)\s+label=(.*)", line)
                    if not m:
                        raise ParseError("bad wire line", no)
                    wid, src, dst, label = m.groups()
                    wires[wid] = Wire(wid, _parse_end(src, "in"), _parse_end(dst, "out"),
                                      parse_label(label))
                elif word == "input":
                    inputs = tuple(line.split()[1:])
                elif word == "output":
                    outputs = tuple(line.split()[1:])
                else:
                    raise ParseError(f"unknown line {word!r}", no)
            except ParseError as e:
                if e.line is None:
                    raise ParseError(str(e), no) from e
                raise
            except (TermError, ValueError) as e:
                raise ParseError(str(e), no) from e
        try:
            return StrategyGraph(nodes, wires, inputs, outputs).validate()
        except ValueError as e:
            raise ParseError(str(e)) from e

    g = graph("end")
    if pos[0] != len(lines):
        raise ParseError("trailing content after 'end'", lines[pos[0]][0])
    return g


def load_strategy(path) -> StrategyGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_strategy(fh.read())


def format_state(ps) -> str:
    hyps = ", ".join(f"{n}: {print_term(t)}" for n, t in ps.hyps.items())
    return f"{hyps} |- {print_term(ps.concl)}" if hyps else f"|- {print_term(ps.concl)}"


def bundled_theory_path(name: str = "sep.thy") -> str:
    """Path of a theory file shipped with the package."""
    from importlib.resources import files
    return str(files("proofstrat") / "data" / name)
