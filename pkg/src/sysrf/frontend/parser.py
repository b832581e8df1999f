"""Lexer and recursive-descent parser for `.rf` source text.

Precedence, loosest first: lambda / type lambda / let, `<=>`, `||`, `&&`,
prefix `not`, comparisons (non-associative), application and `e [T]`.
The binary connectives associate to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import ParseError, Span
from ..syntax import PRIM_TAGS, Kind, Name
from .surface import (
    Definition, Program, SAnn, SApp, SBin, SBool, SExpr, SFree, SInt, SLam,
    SLet, SNot, SPrim, STBase, STExists, STFunc, STLam, STPoly, STRefn, SType,
    STyApp, SVar,
)

KEYWORDS = {"let", "in", "forall", "exists", "not", "true", "false", "def", "main"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<prim>%[a-z_]+(?:\(-?\d+\))?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:\$\d+)?)
  | (?P<int>\d+)
  | (?P<sym><=>|/\\|->|&&|\|\||<=|>=|==|!=|\\|<|>|\(|\)|\[|\]|\{|\}|:|\.|=|\*|-)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, prim, sym, kw, eof
    text: str
    span: Span


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", Span(line, col, line, col + 1))
        chunk = m.group()
        kind = m.lastgroup
        end_line, end_col = line, col
        for ch in chunk:
            if ch == "\n":
                end_line, end_col = end_line + 1, 1
            else:
                end_col += 1
        if kind != "ws":
            if kind == "ident" and chunk in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, chunk, Span(line, col, end_line, end_col)))
        pos, line, col = m.end(), end_line, end_col
    out.append(Token("eof", "", Span(line, col, line, col)))
    return out


def _join(a: Span, b: Span) -> Span:
    return Span(a.line, a.col, b.end_line, b.end_col)


_CMP_OPS = ("<=", "==", "<", "!=", ">=", ">")


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # ------------------------------------------------------------ token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def _is(self, text: str, kind: str | None = None) -> bool:
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind != "eof"

    def _advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def _expect(self, text: str) -> Token:
        if not self._is(text):
            raise ParseError(f"expected {text!r}, found {self._describe()}", self.tok.span)
        return self._advance()

    def _ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident" or "$" in self.tok.text:
            raise ParseError(f"expected {what}, found {self._describe()}", self.tok.span)
        return self._advance()

    def _describe(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def _last_span(self) -> Span:
        return self.toks[self.i - 1].span

    def _done(self):
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self._describe()}", self.tok.span)

    # ------------------------------------------------------------ programs

    def program(self, file: str = "<input>") -> Program:
        defs, seen, main = [], set(), None
        while self._is("def", "kw"):
            start = self._advance().span
            name = self._ident("definition name")
            if name.text in seen:
                raise ParseError(f"duplicate definition {name.text!r}", name.span)
            seen.add(name.text)
            self._expect(":")
            sig = self.type()
            self._expect("=")
            body = self.expr()
            defs.append(Definition(name.text, sig, body, _join(start, self._last_span())))
        if self._is("main", "kw"):
            self._advance()
            self._expect("=")
            main = self.expr()
        self._done()
        return Program(tuple(defs), main, file)

    # ------------------------------------------------------------ types

    def kind(self) -> Kind:
        if self._is("*"):
            self._advance()
            return Kind.STAR
        if self._is("B", "ident"):
            self._advance()
            return Kind.BASE
        raise ParseError(f"expected a kind (B or *), found {self._describe()}", self.tok.span)

    def type(self) -> SType:
        start = self.tok.span
        if self._is("forall", "kw"):
            self._advance()
            a = self._ident("type variable").text
            self._expect(":")
            k = self.kind()
            self._expect(".")
            body = self.type()
            return STPoly(a, k, body, _join(start, self._last_span()))
        if self._is("exists", "kw"):
            self._advance()
            x = self._ident().text
            self._expect(":")
            bound = self.btype()
            self._expect(".")
            body = self.type()
            return STExists(x, bound, body, _join(start, self._last_span()))
        if self.tok.kind == "ident" and self._peek().text == ":":
            x = self._ident().text
            self._expect(":")
            arg = self.btype()
            self._expect("->")
            res = self.type()
            return STFunc(x, arg, res, _join(start, self._last_span()))
        t = self.btype()
        if self._is("->"):
            self._advance()
            res = self.type()
            return STFunc(None, t, res, _join(start, self._last_span()))
        return t

    def btype(self) -> SType:
        start = self.tok.span
        if self._is("("):
            self._advance()
            t = self.type()
            self._expect(")")
            return t
        tok = self.tok
        if tok.kind != "ident":
            raise ParseError(f"expected a type, found {self._describe()}", tok.span)
        self._advance()
        base = STBase(tok.text, tok.span)
        if not self._is("{"):
            return base
        self._advance()
        v = self._ident("refinement variable").text
        self._expect(":")
        pred = self.expr()
        self._expect("}")
        return STRefn(base, v, pred, _join(start, self._last_span()))

    # ------------------------------------------------------------ expressions

    def expr(self) -> SExpr:
        start = self.tok.span
        if self._is("\\"):
            self._advance()
            x = self._ident("parameter").text
            self._expect("->")
            body = self.expr()
            return SLam(x, body, _join(start, self._last_span()))
        if self._is("/\\"):
            self._advance()
            a = self._ident("type parameter").text
            self._expect(":")
            k = self.kind()
            self._expect("->")
            body = self.expr()
            return STLam(a, k, body, _join(start, self._last_span()))
        if self._is("let", "kw"):
            self._advance()
            x = self._ident().text
            self._expect("=")
            bound = self.expr()
            self._expect("in")
            body = self.expr()
            return SLet(x, bound, body, _join(start, self._last_span()))
        return self._binary(0)

    _LEVELS = ("<=>", "||", "&&")

    def _binary(self, level: int) -> SExpr:
        if level == len(self._LEVELS):
            return self._not()
        start = self.tok.span
        lhs = self._binary(level + 1)
        op = self._LEVELS[level]
        if self._is(op):
            self._advance()
            rhs = self._binary(level)
            return SBin(op, lhs, rhs, _join(start, self._last_span()))
        return lhs

    def _not(self) -> SExpr:
        if self._is("not", "kw"):
            start = self._advance().span
            arg = self._not()
            return SNot(arg, _join(start, self._last_span()))
        return self._compare()

    def _compare(self) -> SExpr:
        start = self.tok.span
        lhs = self._app()
        if self.tok.kind == "sym" and self.tok.text in _CMP_OPS:
            op = self._advance().text
            rhs = self._app()
            if self.tok.kind == "sym" and self.tok.text in _CMP_OPS:
                raise ParseError("comparisons do not chain; add parentheses", self.tok.span)
            return SBin(op, lhs, rhs, _join(start, self._last_span()))
        return lhs

    def _starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("int", "prim"):
            return True
        if t.kind == "ident":
            return True
        if t.kind == "kw":
            return t.text in ("true", "false")
        if t.text == "-" and t.kind == "sym":
            return self._peek().kind == "int"
        return t.text == "(" and t.kind == "sym"

    def _app(self) -> SExpr:
        start = self.tok.span
        e = self._atom()
        while True:
            if self._is("["):
                self._advance()
                ty = self.type()
                self._expect("]")
                e = STyApp(e, ty, _join(start, self._last_span()))
            elif self._starts_atom():
                arg = self._atom()
                e = SApp(e, arg, _join(start, self._last_span()))
            else:
                return e

    def _atom(self) -> SExpr:
        t = self.tok
        if t.kind == "int":
            self._advance()
            return SInt(int(t.text), t.span)
        if t.kind == "sym" and t.text == "-" and self._peek().kind == "int":
            self._advance()
            n = self._advance()
            return SInt(-int(n.text), _join(t.span, n.span))
        if t.kind == "kw" and t.text in ("true", "false"):
            self._advance()
            return SBool(t.text == "true", t.span)
        if t.kind == "prim":
            self._advance()
            return _prim(t)
        if t.kind == "ident":
            self._advance()
            if "$" in t.text:
                hint, _, ident = t.text.partition("$")
                return SFree(Name(int(ident), hint), t.span)
            return SVar(t.text, t.span)
        if self._is("("):
            start = self._advance().span
            e = self.expr()
            if self._is(":"):
                self._advance()
                ty = self.type()
                self._expect(")")
                return SAnn(e, ty, _join(start, self._last_span()))
            self._expect(")")
            return e
        raise ParseError(f"expected an expression, found {self._describe()}", t.span)


def _prim(t: Token) -> SPrim:
    m = re.fullmatch(r"%([a-z_]+)(?:\((-?\d+)\))?", t.text)
    name, arg = m.group(1), m.group(2)
    if arg is not None:
        tag = {"leq": "leqN", "eq": "eqN"}.get(name)
        if tag is None:
            raise ParseError(f"primitive %{name} takes no integer", t.span)
        return SPrim(tag, int(arg), t.span)
    if name not in PRIM_TAGS or name in ("int", "leqN", "eqN", "true", "false"):
        raise ParseError(f"unknown primitive %{name}", t.span)
    return SPrim(name, None, t.span)


def parse_program(text: str, file: str = "<input>") -> Program:
    return Parser(text).program(file)


def parse_surface_expr(text: str) -> SExpr:
    p = Parser(text)
    e = p.expr()
    p._done()
    return e


def parse_surface_type(text: str) -> SType:
    p = Parser(text)
    t = p.type()
    p._done()
    return t
