"""Term-variable and iso-variable substitution.

Both walk only the syntax that can contain the variable: a term
substitution stops at the values it inserts, and an iso substitution
skips any subtree whose free iso variables do not include the target.
Replacements are closed at run time, so no renaming is ever needed.
"""

from __future__ import annotations

from typing import Mapping

from . import terms as T
from .names import Name


def apply_subst(sigma: Mapping[Name, T.Term], t: T.Term) -> T.Term:
    if isinstance(t, T.Var):
        return sigma.get(t.name, t)
    if isinstance(t, T.Unit):
        return t
    if isinstance(t, T.Inl):
        return T.Inl(apply_subst(sigma, t.body), t.span)
    if isinstance(t, T.Inr):
        return T.Inr(apply_subst(sigma, t.body), t.span)
    if isinstance(t, T.Fold):
        return T.Fold(apply_subst(sigma, t.body), t.span)
    if isinstance(t, T.Pair):
        return T.Pair(apply_subst(sigma, t.left), apply_subst(sigma, t.right), t.span)
    if isinstance(t, T.App):
        return T.App(t.iso, apply_subst(sigma, t.arg), t.span)
    if isinstance(t, T.Let):
        return T.Let(t.pat, apply_subst(sigma, t.bound), apply_subst(sigma, t.body), t.span, t.ty)
    raise TypeError(f"not a term: {t!r}")


def subst_iso(n: T.Node, var: Name, repl: T.Iso) -> T.Node:
    """``n[repl/var]`` for an iso, clause or term ``n``."""
    if var not in T.free_iso_vars(n):
        return n
    if isinstance(n, T.IsoVar):
        return repl
    if isinstance(n, T.Clauses):
        return T.Clauses([subst_iso(c, var, repl) for c in n.clauses], n.ty, n.span)  # type: ignore[misc]
    if isinstance(n, T.Clause):
        return T.Clause(n.lhs, subst_iso(n.rhs, var, repl), n.span)  # type: ignore[arg-type]
    if isinstance(n, T.Fix):
        return T.Fix(n.var, subst_iso(n.body, var, repl), n.ty, n.span)  # type: ignore[arg-type]
    if isinstance(n, T.Lam):
        return T.Lam(n.var, subst_iso(n.body, var, repl), n.ty, n.span)  # type: ignore[arg-type]
    if isinstance(n, T.NFix):
        return T.NFix(n.n, n.var, subst_iso(n.body, var, repl), n.ty, n.span)  # type: ignore[arg-type]
    if isinstance(n, T.IsoApp):
        return T.IsoApp(subst_iso(n.fn, var, repl), subst_iso(n.arg, var, repl), n.span)  # type: ignore[arg-type]
    if isinstance(n, T.App):
        return T.App(subst_iso(n.iso, var, repl), subst_iso(n.arg, var, repl), n.span)  # type: ignore[arg-type]
    if isinstance(n, T.Let):
        return T.Let(
            n.pat,
            subst_iso(n.bound, var, repl),  # type: ignore[arg-type]
            subst_iso(n.body, var, repl),  # type: ignore[arg-type]
            n.span,
            n.ty,
        )
    if isinstance(n, (T.Inl, T.Inr, T.Fold)):
        return type(n)(subst_iso(n.body, var, repl), n.span)  # type: ignore[arg-type]
    if isinstance(n, T.Pair):
        return T.Pair(subst_iso(n.left, var, repl), subst_iso(n.right, var, repl), n.span)  # type: ignore[arg-type]
    raise TypeError(f"cannot substitute into {n!r}")
