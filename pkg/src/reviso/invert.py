"""Syntactic inversion of isos.

A clause ``v <-> let p1 = w1 q1 in ... let pn = wn qn in v'`` becomes
``v' <-> let qn = wn^-1 pn in ... let q1 = w1^-1 p1 in v``; every other
iso former inverts its components and keeps its binder.
"""

from __future__ import annotations

from .syntax import terms as T
from .syntax.types import Ground, IsoType


def _inv_ty(ty: IsoType | None) -> IsoType | None:
    return None if ty is None else ty.inverse()


def invert_iso(w: T.Iso) -> T.Iso:
    if isinstance(w, T.IsoVar):
        return w
    if isinstance(w, T.Clauses):
        return T.Clauses([invert_clause(c) for c in w.clauses], _inv_ty(w.ty), w.span)  # type: ignore[arg-type]
    if isinstance(w, T.Fix):
        return T.Fix(w.var, invert_iso(w.body), _inv_ty(w.ty), w.span)
    if isinstance(w, T.Lam):
        return T.Lam(w.var, invert_iso(w.body), _inv_ty(w.ty), w.span)
    if isinstance(w, T.NFix):
        return T.NFix(w.n, w.var, invert_iso(w.body), _inv_ty(w.ty), w.span)
    if isinstance(w, T.IsoApp):
        return T.IsoApp(invert_iso(w.fn), invert_iso(w.arg), w.span)
    if isinstance(w, T.EmptyIso):
        return T.EmptyIso(_inv_ty(w.ty), w.span)
    raise TypeError(f"not an iso: {w!r}")


def _result_type(w: T.Iso) -> object:
    ty = getattr(w, "ty", None)
    return ty.cod if isinstance(ty, Ground) else None


def invert_clause(c: T.Clause) -> T.Clause:
    steps: list[tuple[T.Term, T.App, T.Let]] = []
    e = c.rhs
    while isinstance(e, T.Let):
        if not isinstance(e.bound, T.App):
            raise ValueError("clause body is not an expression")
        steps.append((e.pat, e.bound, e))
        e = e.body
    out: T.Term = c.lhs
    # the first let of the original ends up innermost
    for pat, app, let in steps:
        inv = invert_iso(app.iso)
        out = T.Let(app.arg, T.App(inv, pat, app.span), out, let.span, _result_type(inv))
    return T.Clause(e, out, c.span)
