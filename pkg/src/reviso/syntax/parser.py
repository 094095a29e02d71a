"""Lexer and recursive-descent parser for the surface language.

Literal sugar (numerals, lists, ``::``, ``tt``/``ff``) is expanded here and
every binder is stamped with a fresh ``Name``. Free iso identifiers are left
as stamp-0 names; the checker links them to declarations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from . import terms as T
from .names import Name, SourceSpan, fresh
from .printer import IsoDecl, Program, TypeDecl
from .types import UNIT, Arrow, Ground, IsoType, Mu, Prod, Sum, TVar, Type, bool_type, list_of, nat

KEYWORDS = frozenset(
    {"type", "iso", "fix", "nfix", "let", "in", "inl", "inr", "fold", "mu", "tt", "ff", "empty"}
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<nat>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym><->|->|::|[(){}\[\],|=;:.\\+*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "nat", "ident", "sym", "eof"
    text: str
    start: int
    end: int


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, expected: frozenset[str] = frozenset()) -> None:
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = expected
        self.kind = "syntax"

    def render(self, text: str = "", file: str | None = None) -> str:
        line, col = self.span.line_col(text)
        return f"{file or self.span.file}:{line}:{col}: syntax: {self.message}"


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    out: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1, file))
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), m.start(), m.end()))  # type: ignore[arg-type]
        pos = m.end()
    out.append(Token("eof", "", n, n))
    return out


def prelude_aliases() -> dict[str, Type]:
    return {"Nat": nat(), "Bool": bool_type()}


_TERM_START = frozenset({"(", "[", "{"})
_CTOR = frozenset({"inl", "inr", "fold"})


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, text: str, file: str = "<input>", aliases: dict[str, Type] | None = None) -> None:
        self.text = text
        self.file = file
        self.toks = tokenize(text, file)
        self.pos = 0
        self.aliases = prelude_aliases() if aliases is None else dict(aliases)
        self.tscope: list[dict[str, Name]] = []
        self.vscope: list[dict[str, Name]] = []
        self.iscope: list[dict[str, Name]] = []

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text in texts

    def span_from(self, start: int) -> SourceSpan:
        end = self.toks[self.pos - 1].end if self.pos else start
        return SourceSpan(start, max(start, end), self.file)

    def error(self, expected: set[str] | frozenset[str], what: str | None = None) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        exp = ", ".join(sorted(expected))
        msg = what or f"expected {exp}; found {found}"
        return ParseError(msg, SourceSpan(t.start, t.end, self.file), frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text) or (self.tok.kind == "ident" and text not in KEYWORDS):
            raise self.error({repr(text)})
        t = self.tok
        self.pos += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error({what})
        self.pos += 1
        return t

    def is_ident(self, tok: Token | None = None) -> bool:
        t = tok or self.tok
        return t.kind == "ident" and t.text not in KEYWORDS

    def attempt(self, fn: Callable[[], object]) -> object | None:
        """Run ``fn``; on a parse error rewind and return ``None``."""
        save = self.pos
        scopes = ([dict(s) for s in self.vscope], [dict(s) for s in self.iscope])
        try:
            return fn()
        except ParseError:
            self.pos = save
            self.vscope, self.iscope = scopes
            return None

    # -- programs -------------------------------------------------------------

    def program(self) -> Program:
        decls: list[TypeDecl | IsoDecl] = []
        while self.tok.kind != "eof":
            start = self.tok.start
            if self.at("type"):
                self.pos += 1
                name = self.ident("type name")
                if not name.text[0].isupper():
                    raise ParseError(
                        "type names start with an uppercase letter",
                        SourceSpan(name.start, name.end, self.file),
                    )
                self.expect("=")
                ty = self.type_()
                self.expect(";")
                self.aliases[name.text] = ty
                decls.append(TypeDecl(name.text, ty, self.span_from(start)))
            elif self.at("iso"):
                self.pos += 1
                name = self.ident("iso name")
                self.expect(":")
                ity = self.isotype()
                self.expect("=")
                w = self.iso()
                self.expect(";")
                decls.append(IsoDecl(Name(name.text), ity, w, self.span_from(start)))
            else:
                raise self.error({"'type'", "'iso'"})
        return Program(decls, self.text, self.file)

    # -- types --------------------------------------------------------------

    def type_(self) -> Type:
        start = self.tok.start
        left = self.type_prod()
        if self.at("+"):
            self.pos += 1
            return Sum(left, self.type_(), self.span_from(start))
        return left

    def type_prod(self) -> Type:
        start = self.tok.start
        left = self.type_atom()
        if self.at("*"):
            self.pos += 1
            return Prod(left, self.type_prod(), self.span_from(start))
        return left

    def type_atom(self) -> Type:
        t = self.tok
        start = t.start
        if t.kind == "nat" and t.text == "1":
            self.pos += 1
            return UNIT
        if self.at("mu"):
            self.pos += 1
            v = self.ident("type variable")
            name = fresh(v.text)
            self.expect(".")
            self.tscope.append({v.text: name})
            try:
                body = self.type_()
            finally:
                self.tscope.pop()
            return Mu(name, body, self.span_from(start))
        if self.at("("):
            self.pos += 1
            ty = self.type_()
            self.expect(")")
            return ty
        if self.at("["):
            self.pos += 1
            ty = self.type_()
            self.expect("]")
            return list_of(ty)
        if self.is_ident():
            self.pos += 1
            for scope in reversed(self.tscope):
                if t.text in scope:
                    return TVar(scope[t.text], self.span_from(start))
            if t.text in self.aliases:
                return self.aliases[t.text]
            return TVar(Name(t.text), self.span_from(start))
        raise self.error({"'1'", "'mu'", "'('", "'['", "type name"})

    def isotype(self) -> IsoType:
        start = self.tok.start
        left = self.isotype_atom()
        if self.at("->"):
            self.pos += 1
            return Arrow(left, self.isotype(), self.span_from(start))
        return left

    def isotype_atom(self) -> IsoType:
        start = self.tok.start
        if self.at("("):

            def paren() -> IsoType:
                self.pos += 1
                inner = self.isotype()
                self.expect(")")
                if not (self.at("->", ")", ";", "=") or self.tok.kind == "eof"):
                    raise self.error({"'->'"})
                return inner

            got = self.attempt(paren)
            if got is not None:
                return got  # type: ignore[return-value]
        dom = self.type_()
        self.expect("<->")
        cod = self.type_()
        return Ground(dom, cod, self.span_from(start))

    # -- isos ---------------------------------------------------------------

    def iso(self) -> T.Iso:
        start = self.tok.start
        if self.at("fix", "\\"):
            is_fix = self.tok.text == "fix"
            self.pos += 1
            v = self.ident("iso variable")
            self.expect(".")
            name = fresh(v.text)
            self.iscope.append({v.text: name})
            try:
                body = self.iso()
            finally:
                self.iscope.pop()
            node = T.Fix if is_fix else T.Lam
            return node(name, body, None, self.span_from(start))
        if self.at("nfix"):
            self.pos += 1
            if self.tok.kind != "nat":
                raise self.error({"unfold budget"})
            n = int(self.tok.text)
            self.pos += 1
            v = self.ident("iso variable")
            self.expect(".")
            name = fresh(v.text)
            self.iscope.append({v.text: name})
            try:
                body = self.iso()
            finally:
                self.iscope.pop()
            return T.NFix(n, name, body, None, self.span_from(start))
        return self.isoapp()

    def _iso_atom_start(self) -> bool:
        return self.is_ident() or self.at("{", "(", "empty")

    def isoapp(self) -> T.Iso:
        start = self.tok.start
        w = self.iso_atom()
        while self._iso_atom_start():
            w = T.IsoApp(w, self.iso_atom(), self.span_from(start))
        return w

    def iso_atom(self) -> T.Iso:
        t = self.tok
        start = t.start
        if self.is_ident():
            self.pos += 1
            return T.IsoVar(self._lookup(self.iscope, t.text), self.span_from(start))
        if self.at("empty"):
            self.pos += 1
            return T.EmptyIso(None, self.span_from(start))
        if self.at("{"):
            return self.clauses()
        if self.at("("):
            self.pos += 1
            w = self.iso()
            if self.at(":"):
                self.pos += 1
                ty = self.isotype()
                w = self._ascribe(w, ty, start)
            self.expect(")")
            return w
        raise self.error({"iso", "'{'", "'('"})

    def _ascribe(self, w: T.Iso, ty: IsoType, start: int) -> T.Iso:
        span = self.span_from(start)
        if isinstance(w, T.Clauses):
            return T.Clauses(w.clauses, ty, w.span)  # type: ignore[arg-type]
        if isinstance(w, T.Fix):
            return T.Fix(w.var, w.body, ty, w.span)
        if isinstance(w, T.Lam):
            return T.Lam(w.var, w.body, ty, w.span)
        if isinstance(w, T.NFix):
            return T.NFix(w.n, w.var, w.body, ty, w.span)
        if isinstance(w, T.EmptyIso):
            return T.EmptyIso(ty, w.span)
        raise ParseError("only clause sets, fixpoints, lambdas and empty take an ascription", span)

    def clauses(self) -> T.Clauses:
        start = self.tok.start
        self.expect("{")
        out: list[T.Clause] = []
        if not self.at("}"):
            out.append(self.clause())
            while self.at("|"):
                self.pos += 1
                out.append(self.clause())
        self.expect("}")
        return T.Clauses(out, None, self.span_from(start))

    def clause(self) -> T.Clause:
        start = self.tok.start
        self.vscope.append({})
        try:
            lhs = self.value(bind=True)
            self.expect("<->")
            rhs = self.expr()
        finally:
            self.vscope.pop()
        return T.Clause(lhs, rhs, self.span_from(start))

    def expr(self) -> T.Term:
        start = self.tok.start
        if self.at("let"):
            self.pos += 1
            pat_start = self.pos
            pat = self.pattern(bind=False, probe=True)
            self.expect("=")
            w, arg = self.let_application()
            self.expect("in")
            # bind the pattern only now, so the argument sees outer names
            after = self.pos
            self.pos = pat_start
            self.vscope.append({})
            try:
                pat = self.pattern(bind=True)
                self.pos = after
                body = self.expr()
            finally:
                self.vscope.pop()
            return T.Let(pat, T.App(w, arg, arg.span), body, self.span_from(start))
        return self.value(bind=False)

    def let_application(self) -> tuple[T.Iso, T.Term]:
        start = self.tok.start
        atoms: list[T.Iso] = []
        while True:
            if self.is_ident() or self.at("("):
                save = self.pos

                def pat_then_in() -> T.Term:
                    p = self.pattern(bind=False)
                    if not self.at("in"):
                        raise self.error({"'in'"})
                    return p

                got = self.attempt(pat_then_in)
                if got is not None and atoms:
                    w = atoms[0]
                    for a in atoms[1:]:
                        w = T.IsoApp(w, a, SourceSpan(start, a.span.end if a.span else start, self.file))
                    return w, got  # type: ignore[return-value]
                self.pos = save
            if not self._iso_atom_start():
                raise self.error({"iso", "pattern"})
            atoms.append(self.iso_atom())

    # -- values, patterns, terms ------------------------------------------------

    def _lookup(self, scopes: list[dict[str, Name]], text: str) -> Name:
        for scope in reversed(scopes):
            if text in scope:
                return scope[text]
        return Name(text)

    def _var(self, text: str, bind: bool) -> Name:
        if bind:
            scope = self.vscope[-1]
            if text not in scope:
                scope[text] = fresh(text)
            return scope[text]
        return self._lookup(self.vscope, text)

    def pattern(self, bind: bool, probe: bool = False) -> T.Term:
        start = self.tok.start
        if self.at("("):
            self.pos += 1
            parts = [self.pattern(bind, probe)]
            while self.at(","):
                self.pos += 1
                parts.append(self.pattern(bind, probe))
            self.expect(")")
            if len(parts) == 1:
                return parts[0]
            return _tuple(parts, self.span_from(start))
        t = self.ident("pattern variable")
        if probe:
            return T.Var(Name(t.text), self.span_from(start))
        return T.Var(self._var(t.text, bind), self.span_from(start))

    def value(self, bind: bool) -> T.Term:
        start = self.tok.start
        head = self.value_prefix(bind)
        if self.at("::"):
            self.pos += 1
            tail = self.value(bind)
            span = self.span_from(start)
            return T.Fold(T.Inr(T.Pair(head, tail, span), span), span)
        return head

    def value_prefix(self, bind: bool) -> T.Term:
        start = self.tok.start
        if self.at(*_CTOR):
            kw = self.tok.text
            self.pos += 1
            body = self.value_prefix(bind)
            return _ctor(kw, body, self.span_from(start))
        return self.value_atom(bind)

    def value_atom(self, bind: bool) -> T.Term:
        t = self.tok
        start = t.start
        if t.kind == "nat":
            self.pos += 1
            return _numeral(int(t.text), self.span_from(start))
        if self.at("tt", "ff"):
            self.pos += 1
            span = self.span_from(start)
            u = T.Unit(span)
            return T.Inl(u, span) if t.text == "tt" else T.Inr(u, span)
        if self.at("["):
            self.pos += 1
            items: list[T.Term] = []
            if not self.at("]"):
                items.append(self.value(bind))
                while self.at(","):
                    self.pos += 1
                    items.append(self.value(bind))
            self.expect("]")
            return _list(items, self.span_from(start))
        if self.at("("):
            self.pos += 1
            if self.at(")"):
                self.pos += 1
                return T.Unit(self.span_from(start))
            parts = [self.value(bind)]
            while self.at(","):
                self.pos += 1
                parts.append(self.value(bind))
            self.expect(")")
            if len(parts) == 1:
                return parts[0]
            return _tuple(parts, self.span_from(start))
        if self.is_ident():
            self.pos += 1
            return T.Var(self._var(t.text, bind), self.span_from(start))
        raise self.error({"value"})

    # general terms: values, iso applications and lets -----------------------

    def term(self) -> T.Term:
        start = self.tok.start
        if self.at("let"):
            self.pos += 1
            pat_start = self.pos
            self.pattern(bind=False, probe=True)
            self.expect("=")
            bound = self.term()
            self.expect("in")
            after = self.pos
            self.pos = pat_start
            self.vscope.append({})
            try:
                pat = self.pattern(bind=True)
                self.pos = after
                body = self.term()
            finally:
                self.vscope.pop()
            return T.Let(pat, bound, body, self.span_from(start))
        head = self.term_prefix()
        if self.at("::"):
            self.pos += 1
            tail = self.term()
            span = self.span_from(start)
            return T.Fold(T.Inr(T.Pair(head, tail, span), span), span)
        return head

    def _term_start(self) -> bool:
        t = self.tok
        if t.kind == "nat":
            return True
        if self.is_ident():
            return True
        return self.at("(", "[", "{", "tt", "ff", *_CTOR)

    def term_prefix(self) -> T.Term:
        start = self.tok.start
        if self.at(*_CTOR):
            kw = self.tok.text
            self.pos += 1
            return _ctor(kw, self.term_prefix(), self.span_from(start))
        atoms: list[T.Iso] = []
        while True:
            if self.at("{"):
                atoms.append(self.iso_atom())
                continue
            if self.is_ident() or self.at("("):
                save = self.pos
                got = self.attempt(self.term_atom)
                if got is not None and not self._term_start():
                    return self._apply(atoms, got, start)  # type: ignore[arg-type]
                self.pos = save
                atoms.append(self.iso_atom())
                continue
            if atoms and self.at(*_CTOR):
                return self._apply(atoms, self.term_prefix(), start)
            return self._apply(atoms, self.term_atom(), start)

    def _apply(self, atoms: list[T.Iso], arg: T.Term, start: int) -> T.Term:
        if not atoms:
            return arg
        w = atoms[0]
        for a in atoms[1:]:
            w = T.IsoApp(w, a, self.span_from(start))
        return T.App(w, arg, self.span_from(start))

    def term_atom(self) -> T.Term:
        start = self.tok.start
        if self.at("(") and not self.peek().text == ")":
            self.pos += 1
            parts = [self.term()]
            while self.at(","):
                self.pos += 1
                parts.append(self.term())
            self.expect(")")
            if len(parts) == 1:
                return parts[0]
            return _tuple(parts, self.span_from(start))
        if self.at("["):
            self.pos += 1
            items: list[T.Term] = []
            if not self.at("]"):
                items.append(self.term())
                while self.at(","):
                    self.pos += 1
                    items.append(self.term())
            self.expect("]")
            return _list(items, self.span_from(start))
        return self.value_atom(bind=False)

    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise self.error({"end of input"})


def _ctor(kw: str, body: T.Term, span: SourceSpan) -> T.Term:
    if kw == "inl":
        return T.Inl(body, span)
    if kw == "inr":
        return T.Inr(body, span)
    return T.Fold(body, span)


def _tuple(parts: list[T.Term], span: SourceSpan) -> T.Term:
    v = parts[-1]
    for p in reversed(parts[:-1]):
        v = T.Pair(p, v, span)
    return v


def _numeral(n: int, span: SourceSpan) -> T.Term:
    v: T.Term = T.Fold(T.Inl(T.Unit(span), span), span)
    for _ in range(n):
        v = T.Fold(T.Inr(v, span), span)
    return v


def _list(items: list[T.Term], span: SourceSpan) -> T.Term:
    v: T.Term = T.Fold(T.Inl(T.Unit(span), span), span)
    for x in reversed(items):
        v = T.Fold(T.Inr(T.Pair(x, v, span), span), span)
    return v


# -- entry points -------------------------------------------------------------


def parse_program(text: str, file: str = "<input>") -> Program:
    return Parser(text, file).program()


def _parse(text: str, rule: str, aliases: dict[str, Type] | None, file: str) -> object:
    p = Parser(text, file, aliases)
    node = getattr(p, rule)()
    p.finish()
    return node


def parse_type(text: str, aliases: dict[str, Type] | None = None, file: str = "<input>") -> Type:
    return _parse(text, "type_", aliases, file)  # type: ignore[return-value]


def parse_isotype(text: str, aliases: dict[str, Type] | None = None, file: str = "<input>") -> IsoType:
    return _parse(text, "isotype", aliases, file)  # type: ignore[return-value]


def parse_iso(text: str, aliases: dict[str, Type] | None = None, file: str = "<input>") -> T.Iso:
    return _parse(text, "iso", aliases, file)  # type: ignore[return-value]


def parse_value(text: str, file: str = "<input>") -> T.Term:
    p = Parser(text, file)
    p.vscope.append({})
    v = p.value(bind=False)
    p.finish()
    return v


def parse_term(text: str, aliases: dict[str, Type] | None = None, file: str = "<input>") -> T.Term:
    return _parse(text, "term", aliases, file)  # type: ignore[return-value]


def aliases_of(program: Program) -> dict[str, Type]:
    out = prelude_aliases()
    for d in program.decls:
        if isinstance(d, TypeDecl):
            out[d.name] = d.type
    return out
