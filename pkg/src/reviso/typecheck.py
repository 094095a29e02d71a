"""Bidirectional checker for terms and isos.

Checking returns a rebuilt tree in which every clause set, fixpoint, lambda
and empty iso carries its iso type and every ``let`` records the type of the
term it binds. Annotated trees can be re-checked without any inference,
which is what the evaluator's reducts need.

Linear contexts are split by free variables rather than by searching
partitions: a variable free on both sides of a pair or a ``let`` is a
linearity error, a context entry that is never used is one too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .syntax import terms as T
from .syntax.names import Name, SourceSpan
from .syntax.printer import IsoDecl, Program, TypeDecl, show_isotype, show_type
from .syntax.subst import subst_iso
from .syntax.types import (
    UNIT,
    Arrow,
    Ground,
    IsoType,
    Mu,
    Prod,
    Sum,
    Type,
    Unit,
    free_tvars,
    isotype_closed,
)

KINDS = ("unbound", "linearity", "mismatch", "overlap", "non-closed", "arity", "annotation", "form")


class TypeCheckError(Exception):
    def __init__(self, kind: str, span: SourceSpan | None, message: str) -> None:
        super().__init__(f"{kind}: {message}")
        assert kind in KINDS, kind
        self.kind = kind
        self.span = span
        self.message = message

    def render(self, text: str = "", file: str | None = None) -> str:
        where = file or (self.span.file if self.span else "<input>")
        line, col = self.span.line_col(text) if self.span else (1, 1)
        return f"{where}:{line}:{col}: {self.kind}: {self.message}"


TermContext = Mapping[Name, Type]
IsoContext = Mapping[Name, IsoType]


def _span(node: object, fallback: SourceSpan | None) -> SourceSpan | None:
    s = getattr(node, "span", None)
    return s if s is not None else fallback


def _require_closed(t: Type, span: SourceSpan | None) -> None:
    free = free_tvars(t)
    if free:
        names = ", ".join(sorted(n.text for n in free))
        raise TypeCheckError("non-closed", span, f"type {show_type(t)} has free type variables {names}")


def _require_closed_iso(t: IsoType, span: SourceSpan | None) -> None:
    if not isotype_closed(t):
        raise TypeCheckError("non-closed", span, f"iso type {show_isotype(t)} is not closed")


# -- orthogonality ------------------------------------------------------------


def orthogonal(t1: T.Term, t2: T.Term) -> bool:
    """Whether ``t1`` and ``t2`` can never produce the same value.

    Constructors are compared position by position; a ``let`` on either
    side is looked through to the term it returns, since the shape of that
    term alone decides which values it can denote.
    """
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        while isinstance(a, T.Let):
            a = a.body
        while isinstance(b, T.Let):
            b = b.body
        ta, tb = type(a), type(b)
        if (ta is T.Inl and tb is T.Inr) or (ta is T.Inr and tb is T.Inl):
            return True
        if ta is tb and ta in (T.Inl, T.Inr, T.Fold):
            stack.append((a.body, b.body))  # type: ignore[attr-defined]
        elif ta is T.Pair and tb is T.Pair:
            # either component being orthogonal suffices
            if orthogonal(a.left, b.left) or orthogonal(a.right, b.right):  # type: ignore[attr-defined]
                return True
            return False
    return False


# -- patterns -------------------------------------------------------------------


def pattern_context(v: T.Term, a: Type, span: SourceSpan | None = None) -> dict[Name, Type]:
    """Context typing exactly the variables of the value ``v`` at type ``a``."""
    out: dict[Name, Type] = {}
    stack: list[tuple[T.Term, Type]] = [(v, a)]
    while stack:
        t, ty = stack.pop()
        sp = _span(t, span)
        if isinstance(t, T.Var):
            if t.name in out:
                raise TypeCheckError("linearity", sp, f"variable {t.name.text} occurs twice in a pattern")
            out[t.name] = ty
        elif isinstance(t, T.Unit):
            if not isinstance(ty, Unit):
                raise TypeCheckError("mismatch", sp, f"() does not have type {show_type(ty)}")
        elif isinstance(t, (T.Inl, T.Inr)):
            if not isinstance(ty, Sum):
                raise TypeCheckError("mismatch", sp, f"injection does not have type {show_type(ty)}")
            stack.append((t.body, ty.left if isinstance(t, T.Inl) else ty.right))
        elif isinstance(t, T.Fold):
            if not isinstance(ty, Mu):
                raise TypeCheckError("mismatch", sp, f"fold does not have type {show_type(ty)}")
            stack.append((t.body, ty.unfold()))
        elif isinstance(t, T.Pair):
            if not isinstance(ty, Prod):
                raise TypeCheckError("mismatch", sp, f"pair does not have type {show_type(ty)}")
            stack.append((t.right, ty.right))
            stack.append((t.left, ty.left))
        else:
            raise TypeCheckError("form", sp, "expected a value")
    return out


def _tuple_pattern_context(p: T.Term, a: Type, span: SourceSpan | None) -> dict[Name, Type]:
    if not T.is_pattern(p):
        raise TypeCheckError("form", _span(p, span), "let binds a variable or a tuple of variables")
    try:
        return pattern_context(p, a, span)
    except TypeCheckError as e:
        if e.kind == "mismatch":
            raise TypeCheckError(
                "arity", _span(p, span), f"pattern does not destructure a value of type {show_type(a)}"
            ) from None
        raise


def invert_ctx(psi: IsoContext) -> dict[Name, IsoType]:
    return {k: v.inverse() for k, v in psi.items()}


# -- the checker -----------------------------------------------------------------


class Checker:
    """Holds the iso context and a cache for already-elaborated closed isos."""

    def __init__(self, cache: dict | None = None) -> None:
        self.cache = cache

    # terms

    def check_term(self, psi: IsoContext, delta: TermContext, t: T.Term, a: Type) -> T.Term:
        _require_closed(a, t.span)
        self._exact(delta, t)
        return self._check(psi, dict(delta), t, a, t.span)

    def infer_term(self, psi: IsoContext, delta: TermContext, t: T.Term) -> tuple[T.Term, Type]:
        self._exact(delta, t)
        return self._infer(psi, dict(delta), t, t.span)

    def _exact(self, delta: TermContext, t: T.Term) -> None:
        fv = T.free_vars(t)
        for x in fv:
            if x not in delta:
                raise TypeCheckError("unbound", _find_var(t, x), f"unbound variable {x.text}")
        for x in delta:
            if x not in fv:
                raise TypeCheckError("linearity", t.span, f"variable {x.text} is never used")

    def _split(self, delta: dict, left: T.Term, right_fv: Iterable[Name], span) -> tuple[dict, dict]:
        lf = T.free_vars(left)
        rf = set(right_fv)
        both = lf & rf
        if both:
            x = next(iter(both))
            raise TypeCheckError("linearity", span, f"variable {x.text} is used more than once")
        return {x: delta[x] for x in lf}, {x: delta[x] for x in rf}

    def _check(self, psi: IsoContext, delta: dict, t: T.Term, a: Type, span) -> T.Term:
        sp = _span(t, span)
        if t.is_value:
            ctx = pattern_context(t, a, sp)
            for x, ty in ctx.items():
                if delta.get(x) != ty:
                    raise TypeCheckError(
                        "mismatch",
                        _find_var(t, x) or sp,
                        f"variable {x.text} has type {show_type(delta[x])}, expected {show_type(ty)}",
                    )
            return t
        if isinstance(t, (T.Inl, T.Inr)):
            if not isinstance(a, Sum):
                raise TypeCheckError("mismatch", sp, f"injection cannot have type {show_type(a)}")
            part = a.left if isinstance(t, T.Inl) else a.right
            return type(t)(self._check(psi, delta, t.body, part, sp), t.span)
        if isinstance(t, T.Fold):
            if not isinstance(a, Mu):
                raise TypeCheckError("mismatch", sp, f"fold cannot have type {show_type(a)}")
            return T.Fold(self._check(psi, delta, t.body, a.unfold(), sp), t.span)
        if isinstance(t, T.Pair):
            if not isinstance(a, Prod):
                raise TypeCheckError("mismatch", sp, f"pair cannot have type {show_type(a)}")
            d1, d2 = self._split(delta, t.left, T.free_vars(t.right), sp)
            return T.Pair(
                self._check(psi, d1, t.left, a.left, sp), self._check(psi, d2, t.right, a.right, sp), t.span
            )
        if isinstance(t, T.App):
            w, ty = self._iso_synth(psi, t.iso, sp)
            if not isinstance(ty, Ground):
                raise TypeCheckError("arity", sp, f"iso of type {show_isotype(ty)} applied to a term")
            if ty.cod != a:
                raise TypeCheckError(
                    "mismatch", sp, f"iso returns {show_type(ty.cod)}, expected {show_type(a)}"
                )
            return T.App(w, self._check(psi, delta, t.arg, ty.dom, sp), t.span)
        if isinstance(t, T.Let):
            return self._let(psi, delta, t, a, sp)[0]
        raise TypeCheckError("form", sp, "not a term")

    def _infer(self, psi: IsoContext, delta: dict, t: T.Term, span) -> tuple[T.Term, Type]:
        sp = _span(t, span)
        if isinstance(t, T.Var):
            return t, delta[t.name]
        if isinstance(t, T.Unit):
            return t, UNIT
        if isinstance(t, T.Pair):
            d1, d2 = self._split(delta, t.left, T.free_vars(t.right), sp)
            l, la = self._infer(psi, d1, t.left, sp)
            r, ra = self._infer(psi, d2, t.right, sp)
            return T.Pair(l, r, t.span), Prod(la, ra)
        if isinstance(t, T.App):
            w, ty = self._iso_synth(psi, t.iso, sp)
            if not isinstance(ty, Ground):
                raise TypeCheckError("arity", sp, f"iso of type {show_isotype(ty)} applied to a term")
            return T.App(w, self._check(psi, delta, t.arg, ty.dom, sp), t.span), ty.cod
        if isinstance(t, T.Let):
            return self._let(psi, delta, t, None, sp)
        raise TypeCheckError("annotation", sp, "cannot infer the type of this term; it needs an expected type")

    def _let(self, psi, delta: dict, t: T.Let, a: Type | None, sp) -> tuple[T.Term, Type]:
        bound_vars = T.pattern_vars_set(t.pat) if T.is_pattern(t.pat) else frozenset()
        body_fv = T.free_vars(t.body)
        unused = [x for x in bound_vars if x not in body_fv]
        if unused:
            raise TypeCheckError("linearity", _span(t.pat, sp), f"variable {unused[0].text} is never used")
        d1, d2 = self._split(delta, t.bound, body_fv - bound_vars, sp)
        if t.ty is not None:
            bound = self._check(psi, d1, t.bound, t.ty, sp)  # type: ignore[arg-type]
            bty: Type = t.ty  # type: ignore[assignment]
        else:
            bound, bty = self._infer(psi, d1, t.bound, sp)
        ctx = _tuple_pattern_context(t.pat, bty, sp)
        for x in ctx:
            if x in d2:
                raise TypeCheckError("linearity", _span(t.pat, sp), f"let rebinds variable {x.text}")
        d2.update(ctx)
        if a is None:
            body, a = self._infer(psi, d2, t.body, sp)
        else:
            body = self._check(psi, d2, t.body, a, sp)
        return T.Let(t.pat, bound, body, t.span, bty), a

    # isos

    def check_iso(self, psi: IsoContext, w: T.Iso, expected: IsoType | None = None) -> tuple[T.Iso, IsoType]:
        if expected is None:
            return self._iso_synth(psi, w, w.span)
        _require_closed_iso(expected, w.span)
        return self._iso_check(psi, w, expected, w.span), expected

    def _cached(self, w: T.Iso) -> tuple[T.Iso, IsoType] | None:
        if self.cache is None:
            return None
        hit = self.cache.get(id(w))
        if hit is not None and hit[0] is w:
            return hit[1], hit[2]
        return None

    def _remember(self, w: T.Iso, out: T.Iso, ty: IsoType) -> None:
        if self.cache is not None and not T.free_iso_vars(w):
            self.cache[id(w)] = (w, out, ty)
            self.cache[id(out)] = (out, out, ty)

    def _iso_synth(self, psi: IsoContext, w: T.Iso, span) -> tuple[T.Iso, IsoType]:
        hit = self._cached(w)
        if hit is not None:
            return hit
        sp = _span(w, span)
        if isinstance(w, T.IsoVar):
            if w.name not in psi:
                raise TypeCheckError("unbound", sp, f"unbound iso {w.name.text}")
            return w, psi[w.name]
        if isinstance(w, T.IsoApp):
            fn = w.fn
            if isinstance(fn, T.Lam) and fn.ty is None:
                arg, aty = self._iso_synth(psi, w.arg, sp)
                inner = dict(psi)
                inner[fn.var] = aty
                body, rty = self._iso_synth(inner, fn.body, sp)
                lam_ty = Arrow(aty, rty)
                out: T.Iso = T.IsoApp(T.Lam(fn.var, body, lam_ty, fn.span), arg, w.span)
                self._remember(w, out, rty)
                return out, rty
            f, fty = self._iso_synth(psi, fn, sp)
            if not isinstance(fty, Arrow):
                raise TypeCheckError("arity", sp, f"iso of type {show_isotype(fty)} takes no iso argument")
            arg = self._iso_check(psi, w.arg, fty.arg, sp)
            out = T.IsoApp(f, arg, w.span)
            self._remember(w, out, fty.res)
            return out, fty.res
        ty = getattr(w, "ty", None)
        if ty is None:
            raise TypeCheckError("annotation", sp, "cannot infer the type of this iso; add an ascription")
        _require_closed_iso(ty, sp)
        out = self._iso_check(psi, w, ty, sp)
        return out, ty

    def _iso_check(self, psi: IsoContext, w: T.Iso, expected: IsoType, span) -> T.Iso:
        hit = self._cached(w)
        if hit is not None:
            if hit[1] != expected:
                raise TypeCheckError(
                    "mismatch",
                    _span(w, span),
                    f"iso has type {show_isotype(hit[1])}, expected {show_isotype(expected)}",
                )
            return hit[0]
        sp = _span(w, span)
        ty = getattr(w, "ty", None)
        if ty is not None and ty != expected:
            raise TypeCheckError(
                "mismatch", sp, f"iso is ascribed {show_isotype(ty)}, expected {show_isotype(expected)}"
            )
        if isinstance(w, T.Clauses):
            out: T.Iso = self._clauses(psi, w, expected, sp)
        elif isinstance(w, (T.Fix, T.NFix)):
            inner = dict(psi)
            inner[w.var] = expected
            body = self._iso_check(inner, w.body, expected, sp)
            if isinstance(w, T.Fix):
                out = T.Fix(w.var, body, expected, w.span)
            else:
                out = T.NFix(w.n, w.var, body, expected, w.span)
        elif isinstance(w, T.Lam):
            if not isinstance(expected, Arrow):
                raise TypeCheckError("arity", sp, f"lambda cannot have type {show_isotype(expected)}")
            inner = dict(psi)
            inner[w.var] = expected.arg
            body = self._iso_check(inner, w.body, expected.res, sp)
            out = T.Lam(w.var, body, expected, w.span)
        elif isinstance(w, T.EmptyIso):
            out = T.EmptyIso(expected, w.span)
        elif isinstance(w, T.IsoApp) and isinstance(w.fn, T.Lam) and w.fn.ty is None:
            arg, aty = self._iso_synth(psi, w.arg, sp)
            inner = dict(psi)
            inner[w.fn.var] = aty
            body = self._iso_check(inner, w.fn.body, expected, sp)
            out = T.IsoApp(T.Lam(w.fn.var, body, Arrow(aty, expected), w.fn.span), arg, w.span)
        else:
            out, got = self._iso_synth(psi, w, sp)
            if got != expected:
                raise TypeCheckError(
                    "mismatch", sp, f"iso has type {show_isotype(got)}, expected {show_isotype(expected)}"
                )
            return out
        self._remember(w, out, expected)
        return out

    def _clauses(self, psi: IsoContext, w: T.Clauses, expected: IsoType, sp) -> T.Clauses:
        if not isinstance(expected, Ground):
            raise TypeCheckError("arity", sp, f"clause set cannot have type {show_isotype(expected)}")
        _require_closed(expected.dom, sp)
        _require_closed(expected.cod, sp)
        out: list[T.Clause] = []
        for c in w.clauses:
            csp = _span(c, sp)
            if not c.lhs.is_value:
                raise TypeCheckError("form", _span(c.lhs, csp), "the left side of a clause must be a value")
            if not T.is_expression(c.rhs):
                raise TypeCheckError(
                    "form",
                    _span(c.rhs, csp),
                    "the right side of a clause must be lets of iso applications to patterns, ending in a value",
                )
            ctx = pattern_context(c.lhs, expected.dom, csp)
            self._exact(ctx, c.rhs)
            rhs = self._check(psi, dict(ctx), c.rhs, expected.cod, csp)
            out.append(T.Clause(c.lhs, rhs, c.span))
        cls = w.clauses
        for side, label in (("lhs", "left"), ("rhs", "right")):
            for i in range(len(cls)):
                for j in range(i + 1, len(cls)):
                    if not orthogonal(getattr(cls[i], side), getattr(cls[j], side)):
                        raise TypeCheckError(
                            "overlap",
                            _span(cls[j], sp),
                            f"clauses {i + 1} and {j + 1} overlap on their {label} sides",
                        )
        return T.Clauses(out, expected, w.span)


def _find_var(t: T.Term, x: Name) -> SourceSpan | None:
    stack: list = [t]
    while stack:
        n = stack.pop()
        if isinstance(n, T.Var) and n.name == x:
            return n.span
        if isinstance(n, T.Node):
            for f in type(n)._fields:
                v = getattr(n, f)
                if isinstance(v, T.Term):
                    stack.append(v)
    return None


# -- module-level entry points -------------------------------------------------


def check_term(psi: IsoContext, delta: TermContext, t: T.Term, a: Type) -> T.Term:
    return Checker().check_term(psi, delta, t, a)


def infer_term(psi: IsoContext, delta: TermContext, t: T.Term) -> tuple[T.Term, Type]:
    return Checker().infer_term(psi, delta, t)


def check_iso(psi: IsoContext, w: T.Iso, expected: IsoType | None = None) -> IsoType:
    return Checker().check_iso(psi, w, expected)[1]


def elaborate_iso(psi: IsoContext, w: T.Iso, expected: IsoType | None = None) -> tuple[T.Iso, IsoType]:
    return Checker().check_iso(psi, w, expected)


# -- programs --------------------------------------------------------------------


@dataclass
class CheckedProgram:
    program: Program
    types: dict[str, IsoType] = field(default_factory=dict)
    elaborated: dict[str, T.Iso] = field(default_factory=dict)
    errors: list[TypeCheckError] = field(default_factory=list)
    _linked: dict[str, T.Iso] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def linked(self, name: str) -> T.Iso:
        """The declaration with every reference to an earlier one inlined."""
        if name in self._linked:
            return self._linked[name]
        if name not in self.elaborated:
            raise KeyError(name)
        w = self.elaborated[name]
        for ref in list(T.free_iso_vars(w)):
            w = subst_iso(w, ref, self.linked(ref.text))  # type: ignore[assignment]
        self._linked[name] = w
        return w


def check_program(program: Program, checker: Checker | None = None) -> CheckedProgram:
    """Check each declaration against the ones before it.

    A declaration only sees earlier names, so references cannot form
    cycles; recursion goes through ``fix``. A declaration that fails still
    contributes its declared type so later ones are checked normally.
    """
    checker = checker or Checker()
    out = CheckedProgram(program)
    psi: dict[Name, IsoType] = {}
    seen: set[str] = set()
    for d in program.decls:
        if isinstance(d, TypeDecl):
            continue
        assert isinstance(d, IsoDecl)
        if d.name.text in seen:
            out.errors.append(TypeCheckError("form", d.span, f"iso {d.name.text} is declared twice"))
            continue
        seen.add(d.name.text)
        try:
            _require_closed_iso(d.type, d.span)
            w, _ = checker.check_iso(psi, d.iso, d.type)
            out.elaborated[d.name.text] = w  # type: ignore[assignment]
        except TypeCheckError as e:
            out.errors.append(e)
        out.types[d.name.text] = d.type
        psi[Name(d.name.text)] = d.type
    return out
