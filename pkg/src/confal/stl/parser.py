"""Recursive-descent parser for the textual formula syntax.

Grammar (whitespace-insensitive)::

    formula := disj
    disj    := conj ("||" conj)*
    conj    := impl ("&&" impl)*
    impl    := unary ("->" unary)?
    unary   := "!" unary | "G" intv unary | "F" intv unary
             | "(" formula ("U" intv formula)? ")" | atom | "true" | "false"
    intv    := "[" number "," (number | "inf") "]"
    atom    := expr rel expr | "|" expr "|" rel expr
    rel     := "<" | "<=" | ">" | ">=" | "=="
    expr    := ["-"] term (("+" | "-") term)*
    term    := number | number "*" ref | ref
    ref     := ident | "delta" "[" number "]" "(" ident ")"
             | "shift" "[" number "]" "(" ident ")"

``|e| < c`` desugars to ``e < c && -e < c``; ``|e| > c`` to
``e > c || -e > c``.  ``shift[d](x)`` denotes the d-shifted signal ``x^d``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

from ..errors import ConfalError, FormulaSyntaxError
from .syntax import (
    FALSE,
    TRUE,
    Affine,
    And,
    Atom,
    Formula,
    Interval,
    Not,
    Or,
    Ref,
    Until,
    always,
    eventually,
    implies,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|\||&&|->|<=|>=|==|[<>!()\[\],+\-*|=])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"G", "F", "U", "true", "false", "delta", "shift", "inf"}
_RELS = {"<", "<=", ">", ">=", "==", "="}


@dataclass
class Token:
    kind: str  # number | ident | kw | op | eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, text)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and chunk in _KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return FormulaSyntaxError(msg, tok.line, tok.col, self.text)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.formula()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after formula")
        return f

    def formula(self) -> Formula:
        f = self.conj()
        while self.accept("||"):
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.impl()
        while self.accept("&&"):
            f = And(f, self.impl())
        return f

    def impl(self) -> Formula:
        f = self.unary()
        if self.accept("->"):
            f = implies(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.tok
        if self.accept("!"):
            return Not(self.unary())
        if self.accept("G"):
            iv = self.interval()
            return always(iv, self.unary())
        if self.accept("F"):
            iv = self.interval()
            return eventually(iv, self.unary())
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.accept("("):
            f = self.formula()
            if self.accept("U"):
                iv = self.interval()
                f = Until(iv, f, self.formula())
            self.expect(")")
            return f
        if tok.kind in ("number", "ident") or self.at("-") or self.at("|") or self.at("delta") or self.at("shift"):
            return self.atom()
        raise self.error(f"expected a formula, found {tok.text or 'end of input'!r}")

    def interval(self) -> Interval:
        start = self.expect("[")
        lo = self.number()
        self.expect(",")
        if self.accept("inf"):
            hi = float("inf")
        else:
            hi = self.number()
        self.expect("]")
        try:
            return Interval(lo, hi)
        except ConfalError as e:
            raise self.error(str(e), start) from None

    def number(self) -> float:
        tok = self.tok
        if tok.kind != "number":
            raise self.error(f"expected a number, found {tok.text or 'end of input'!r}")
        self.i += 1
        return float(tok.text)

    def relation(self) -> str:
        tok = self.tok
        if tok.kind == "op" and tok.text in _RELS:
            self.i += 1
            return "==" if tok.text == "=" else tok.text
        raise self.error(f"expected a comparison operator, found {tok.text or 'end of input'!r}")

    def atom(self) -> Formula:
        if self.accept("|"):
            inner = self.expr()
            self.expect("|")
            rel = self.relation()
            rhs = self.expr()
            return _abs_atom(inner, rel, rhs)
        lhs = self.expr()
        rel = self.relation()
        rhs = self.expr()
        return make_atom(lhs, rel, rhs)

    def expr(self) -> Affine:
        sign = -1.0 if self.accept("-") else 1.0
        e = self.term().scale(sign)
        while True:
            if self.accept("+"):
                e = e + self.term()
            elif self.accept("-"):
                e = e - self.term()
            else:
                return e

    def term(self) -> Affine:
        tok = self.tok
        if tok.kind == "number":
            k = self.number()
            if self.accept("*"):
                return Affine(((self.ref(), 1.0),)).scale(k)
            return Affine((), k)
        return Affine(((self.ref(), 1.0),))

    def ref(self) -> Ref:
        tok = self.tok
        for kind in ("delta", "shift"):
            if self.accept(kind):
                self.expect("[")
                d = self.number()
                self.expect("]")
                self.expect("(")
                name = self.ident()
                self.expect(")")
                if d < 0:
                    raise self.error(f"{kind} delay must be non-negative", tok)
                return Ref(name, d, kind)
        return Ref(self.ident())

    def ident(self) -> str:
        tok = self.tok
        if tok.kind != "ident":
            raise self.error(f"expected a channel name, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text


def make_atom(lhs: Affine, rel: str, rhs: Affine) -> Formula:
    """Normalise ``lhs rel rhs`` to the core atom forms.

    ``>``/``>=`` keep ``lhs - rhs`` as the margin; ``<``/``<=`` are the
    negation of the complementary atom, and ``==`` becomes an equality atom.
    """
    diff = lhs - rhs
    if rel == ">":
        return Atom(diff, ">")
    if rel == ">=":
        return Atom(diff, ">=")
    if rel == "<":
        return Not(Atom(diff, ">="))
    if rel == "<=":
        return Not(Atom(diff, ">"))
    return Atom(diff, "==")


def _abs_atom(inner: Affine, rel: str, rhs: Affine) -> Formula:
    pos = make_atom(inner, rel, rhs)
    neg = make_atom(-inner, rel, rhs)
    if rel in ("<", "<="):
        return And(pos, neg)
    if rel in (">", ">="):
        return Or(pos, neg)
    # |e| == c  <=>  (e == c || -e == c)
    return Or(pos, neg)


def parse(text: str) -> Formula:
    """Parse ``text`` into a desugared core formula."""
    return _Parser(text).parse()


def parse_file(path) -> Formula:
    with open(path) as fh:
        return parse(fh.read())
