"""Text front-ends: model files, temporal formulas, expressions, points.

The model format is a minimal line-oriented language (``#`` comments,
whitespace-insensitive)::

    param p in [0.01, 0.09];
    states s0 init, s1, s2;
    label "goal" = s2;
    trans s0 -> s1 : q, s2 : 1 - q;
    reward "steps" { edge s0 -> s1 : 1; }

Formulas follow ``P=? [ F "goal" ]`` / ``P<0.8 [ "a" U<=5 "b" ]`` /
``E{"steps"}<4 [ F "goal" ]``.  Parsers are pure functions.
"""

from __future__ import annotations

import re
from fractions import Fraction

from . import prctl
from .errors import BoundError, ParseError
from .expr import Add, Const, Div, Expr, Mul, Neg, Param, Sub
from .model import PDtmc, PDtmrm
from .space import ParamSpace

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<number>\d+(\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>->|<=|>=|=\?|[;,:=\[\]{}()+\-*/|&!<>?])
""", re.VERBOSE)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def _tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(line, col, "a valid token", text[pos])
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(lexeme)
        else:
            tokens.append(Token(kind, lexeme, line, col))
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, expected: str, tok: Token | None = None):
        tok = tok or self.peek()
        found = tok.text if tok.kind != "eof" else "end of input"
        raise ParseError(tok.line, tok.col, expected, found)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            self.error(text or kind)
        return self.advance()

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.advance()
        return None

    def accept_keyword(self, word: str) -> Token | None:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == word:
            return self.advance()
        return None


# -- expressions --------------------------------------------------------------

def _parse_expr(cur: _Cursor, space: ParamSpace) -> Expr:
    e = _parse_term(cur, space)
    while True:
        if cur.accept("op", "+"):
            e = Add(e, _parse_term(cur, space))
        elif cur.accept("op", "-"):
            e = Sub(e, _parse_term(cur, space))
        else:
            return e


def _parse_term(cur: _Cursor, space: ParamSpace) -> Expr:
    e = _parse_factor(cur, space)
    while True:
        if cur.accept("op", "*"):
            e = Mul(e, _parse_factor(cur, space))
        elif cur.accept("op", "/"):
            e = Div(e, _parse_factor(cur, space))
        else:
            return e


def _parse_factor(cur: _Cursor, space: ParamSpace) -> Expr:
    tok = cur.peek()
    if cur.accept("op", "-"):
        return Neg(_parse_factor(cur, space))
    if cur.accept("op", "("):
        e = _parse_expr(cur, space)
        cur.expect("op", ")")
        return e
    if tok.kind == "number":
        cur.advance()
        return Const(Fraction(tok.text))
    if tok.kind == "ident":
        cur.advance()
        try:
            index = space.index(tok.text)
        except Exception:
            raise ParseError(tok.line, tok.col, "a declared parameter", tok.text) from None
        return Param(index, tok.text)
    cur.error("a number, parameter, or '('")


def parse_expr(text: str, space: ParamSpace) -> Expr:
    """Standalone arithmetic expression over the space's parameters."""
    cur = _Cursor(_tokenize(text))
    e = _parse_expr(cur, space)
    if cur.peek().kind != "eof":
        cur.error("end of input")
    return e


# -- model files ---------------------------------------------------------------

def _parse_signed_number(cur: _Cursor) -> float:
    sign = -1.0 if cur.accept("op", "-") else 1.0
    tok = cur.expect("number")
    return sign * float(tok.text)


def parse_model(text: str) -> PDtmrm:
    """Parse and fully validate a model file."""
    cur = _Cursor(_tokenize(text))
    params: list[tuple[str, float, float]] = []
    while cur.accept_keyword("param"):
        name_tok = cur.expect("ident")
        if name_tok.text in (p[0] for p in params):
            raise ParseError(name_tok.line, name_tok.col, "a fresh parameter name", name_tok.text)
        cur.expect("ident", "in")
        cur.expect("op", "[")
        lo = _parse_signed_number(cur)
        cur.expect("op", ",")
        hi_tok = cur.peek()
        hi = _parse_signed_number(cur)
        cur.expect("op", "]")
        cur.expect("op", ";")
        if not lo < hi:
            raise ParseError(hi_tok.line, hi_tok.col,
                             f"an upper bound greater than {lo}", str(hi))
        params.append((name_tok.text, lo, hi))
    space = ParamSpace(params) if params else ParamSpace([])

    cur.expect("ident", "states")
    names: list[str] = []
    init: int | None = None
    while True:
        tok = cur.expect("ident")
        if tok.text in names:
            raise ParseError(tok.line, tok.col, "a fresh state name", tok.text)
        names.append(tok.text)
        if cur.accept_keyword("init"):
            if init is not None:
                raise ParseError(tok.line, tok.col, "a single init state", tok.text)
            init = len(names) - 1
        if not cur.accept("op", ","):
            break
    cur.expect("op", ";")
    if init is None:
        tok = cur.peek()
        raise ParseError(tok.line, tok.col, "one state marked init", "none")
    index = {name: i for i, name in enumerate(names)}

    def state_ref() -> int:
        tok = cur.expect("ident")
        if tok.text not in index:
            raise ParseError(tok.line, tok.col, "a declared state", tok.text)
        return index[tok.text]

    labels: dict[str, frozenset[int]] = {}
    while cur.accept_keyword("label"):
        name_tok = cur.expect("string")
        label = name_tok.text[1:-1]
        if label in labels:
            raise ParseError(name_tok.line, name_tok.col, "a fresh label name", label)
        cur.expect("op", "=")
        members = {state_ref()}
        while cur.accept("op", ","):
            members.add(state_ref())
        cur.expect("op", ";")
        labels[label] = frozenset(members)

    trans: dict[tuple[int, int], Expr] = {}
    while cur.accept_keyword("trans"):
        src = state_ref()
        cur.expect("op", "->")
        while True:
            dst_tok = cur.peek()
            dst = state_ref()
            cur.expect("op", ":")
            if (src, dst) in trans:
                raise ParseError(dst_tok.line, dst_tok.col, "a fresh target state", dst_tok.text)
            trans[(src, dst)] = _parse_expr(cur, space)
            if not cur.accept("op", ","):
                break
        cur.expect("op", ";")

    rewards: dict[str, tuple[dict[int, float], dict[tuple[int, int], float]]] = {}
    while cur.accept_keyword("reward"):
        name_tok = cur.expect("string")
        rname = name_tok.text[1:-1]
        if rname in rewards:
            raise ParseError(name_tok.line, name_tok.col, "a fresh reward name", rname)
        cur.expect("op", "{")
        state_rw: dict[int, float] = {}
        edge_rw: dict[tuple[int, int], float] = {}
        while not cur.accept("op", "}"):
            if cur.accept_keyword("state"):
                s = state_ref()
                cur.expect("op", ":")
                val_tok = cur.expect("number")
                state_rw[s] = float(val_tok.text)
            elif cur.accept_keyword("edge"):
                u = state_ref()
                cur.expect("op", "->")
                v_tok = cur.peek()
                v = state_ref()
                if (u, v) not in trans:
                    raise ParseError(v_tok.line, v_tok.col, "an existing edge target", v_tok.text)
                cur.expect("op", ":")
                val_tok = cur.expect("number")
                edge_rw[(u, v)] = float(val_tok.text)
            else:
                cur.error("'state', 'edge', or '}'")
            cur.expect("op", ";")
        rewards[rname] = (state_rw, edge_rw)

    cur.expect("eof")
    chain = PDtmc(names, init, trans, labels, space)
    return PDtmrm(chain, rewards)


def model_to_text(model: PDtmrm | PDtmc) -> str:
    """Regenerate a model file; ``parse_model`` of the output is identical."""
    chain = model.chain if isinstance(model, PDtmrm) else model
    rewards = model.rewards if isinstance(model, PDtmrm) else {}
    lines = []
    for name, lo, hi in chain.space.params:
        lines.append(f"param {name} in [{_fmt(lo)}, {_fmt(hi)}];")
    states = ", ".join(f"{s} init" if i == chain.init else s
                       for i, s in enumerate(chain.states))
    lines.append(f"states {states};")
    for label in sorted(chain.labels):
        members = ", ".join(chain.states[i] for i in sorted(chain.labels[label]))
        lines.append(f'label "{label}" = {members};')
    for src in range(chain.n_states):
        targets = sorted(dst for (u, dst) in chain.trans if u == src)
        if targets:
            body = ", ".join(f"{chain.states[dst]} : {chain.trans[(src, dst)]}" for dst in targets)
            lines.append(f"trans {chain.states[src]} -> {body};")
    for rname in sorted(rewards):
        state_rw, edge_rw = rewards[rname]
        lines.append(f'reward "{rname}" {{')
        for s in sorted(state_rw):
            lines.append(f"  state {chain.states[s]} : {_fmt(state_rw[s])};")
        for (u, v) in sorted(edge_rw):
            lines.append(f"  edge {chain.states[u]} -> {chain.states[v]} : {_fmt(edge_rw[(u, v)])};")
        lines.append("}")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


# -- formulas -------------------------------------------------------------------

def _parse_state_formula(cur: _Cursor) -> prctl.StateFormula:
    lhs = _parse_conjunction(cur)
    while cur.accept("op", "|"):
        rhs = _parse_conjunction(cur)
        lhs = prctl.Not(prctl.And(prctl.Not(lhs), prctl.Not(rhs)))
    return lhs


def _parse_conjunction(cur: _Cursor) -> prctl.StateFormula:
    lhs = _parse_unary(cur)
    while cur.accept("op", "&"):
        lhs = prctl.And(lhs, _parse_unary(cur))
    return lhs


def _parse_unary(cur: _Cursor) -> prctl.StateFormula:
    if cur.accept("op", "!"):
        return prctl.Not(_parse_unary(cur))
    tok = cur.peek()
    if tok.kind == "string":
        cur.advance()
        return prctl.Ap(tok.text[1:-1])
    if cur.accept_keyword("true"):
        return prctl.TrueF()
    if cur.accept("op", "("):
        sf = _parse_state_formula(cur)
        cur.expect("op", ")")
        return sf
    cur.error("a label, 'true', '!', or '('")


def _parse_path_formula(cur: _Cursor) -> prctl.PathFormula:
    if cur.accept_keyword("X"):
        return prctl.Next(_parse_unary(cur))
    if cur.accept_keyword("F"):
        return prctl.Until(prctl.TrueF(), _parse_unary(cur))
    lhs = _parse_state_formula(cur)
    cur.expect("ident", "U")
    if cur.accept("op", "<="):
        k_tok = cur.expect("number")
        if "." in k_tok.text:
            raise ParseError(k_tok.line, k_tok.col, "an integer step bound", k_tok.text)
        return prctl.BoundedUntil(lhs, _parse_unary(cur), int(k_tok.text))
    return prctl.Until(lhs, _parse_unary(cur))


def _parse_comparison(cur: _Cursor) -> tuple[str, float]:
    for op in ("<=", ">=", "<", ">"):
        if cur.accept("op", op):
            tok = cur.peek()
            value = _parse_signed_number(cur)
            return op, (value, tok)
    cur.error("'=?' or a comparison bound")


def parse_formula(text: str) -> prctl.StateFormula:
    """Parse a property; derived forms (or, eventually) desugar here."""
    cur = _Cursor(_tokenize(text))
    formula = _parse_top_formula(cur)
    if cur.peek().kind != "eof":
        cur.error("end of input")
    return formula


def _parse_top_formula(cur: _Cursor) -> prctl.StateFormula:
    if cur.accept_keyword("P"):
        if cur.accept("op", "=?"):
            cur.expect("op", "[")
            path = _parse_path_formula(cur)
            cur.expect("op", "]")
            return prctl.ProbQuery(path)
        op, (bound, tok) = _parse_comparison(cur)
        if not 0.0 <= bound <= 1.0:
            raise BoundError(f"{tok.line}:{tok.col}: probability bound {bound} outside [0, 1]")
        cur.expect("op", "[")
        path = _parse_path_formula(cur)
        cur.expect("op", "]")
        return prctl.ProbBound(op, bound, path)
    if cur.accept_keyword("E"):
        reward = None
        if cur.accept("op", "{"):
            tok = cur.expect("string")
            reward = tok.text[1:-1]
            cur.expect("op", "}")
        if cur.accept("op", "=?"):
            cur.expect("op", "[")
            cur.expect("ident", "F")
            target = _parse_unary(cur)
            cur.expect("op", "]")
            return prctl.RewardQuery(target, reward)
        op, (bound, tok) = _parse_comparison(cur)
        if bound < 0.0:
            raise BoundError(f"{tok.line}:{tok.col}: reward bound {bound} is negative")
        cur.expect("op", "[")
        cur.expect("ident", "F")
        target = _parse_unary(cur)
        cur.expect("op", "]")
        return prctl.RewardBound(op, bound, target, reward)
    cur.error("'P' or 'E'")


# -- points -----------------------------------------------------------------------

def parse_point(assignments, space: ParamSpace):
    """Ordered in-box vector from ``name=value`` strings."""
    values: dict[str, float] = {}
    for item in assignments:
        name, sep, raw = str(item).partition("=")
        if not sep or not name or not raw:
            raise ValueError(f"malformed point assignment {item!r}; expected name=value")
        values[name.strip()] = float(raw)
    return space.point_from_assignments(values)
