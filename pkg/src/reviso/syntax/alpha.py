"""Equality up to consistent renaming of bound term, iso and type variables.

Type annotations carried by elaborated nodes are ignored: two isos that
differ only in where the checker recorded a type are the same program.
Types themselves already compare up to renaming of ``mu`` binders.
"""

from __future__ import annotations

from . import terms as T
from .names import Name
from .types import IsoType, Type


def _ordered_vars(v: T.Term) -> list[Name]:
    out: list[Name] = []
    stack = [v]
    while stack:
        t = stack.pop()
        if isinstance(t, T.Var):
            out.append(t.name)
        elif isinstance(t, (T.Inl, T.Inr, T.Fold)):
            stack.append(t.body)
        elif isinstance(t, T.Pair):
            stack.append(t.right)
            stack.append(t.left)
    return out


def _bind(env: tuple[dict, dict], left: list[Name], right: list[Name]) -> tuple[dict, dict] | None:
    if len(left) != len(right):
        return None
    fwd, back = dict(env[0]), dict(env[1])
    seen_l: dict[Name, Name] = {}
    seen_r: dict[Name, Name] = {}
    for a, b in zip(left, right):
        if seen_l.setdefault(a, b) != b or seen_r.setdefault(b, a) != a:
            return None
        fwd[a] = b
        back[b] = a
    return fwd, back


def _same_var(a: Name, b: Name, env: tuple[dict, dict]) -> bool:
    fwd, back = env
    if a in fwd:
        return fwd[a] == b
    if b in back:
        return False
    return a == b


def alpha_equiv(a: object, b: object) -> bool:
    if isinstance(a, Type) or isinstance(a, IsoType):
        return a == b
    empty: tuple[dict, dict] = ({}, {})
    # each frame: (left, right, term env, iso env)
    stack = [(a, b, empty, empty)]
    while stack:
        x, y, tenv, ienv = stack.pop()
        if type(x) is not type(y):
            return False
        if isinstance(x, T.Var):
            if not _same_var(x.name, y.name, tenv):
                return False
        elif isinstance(x, T.Unit) or isinstance(x, T.EmptyIso):
            pass
        elif isinstance(x, (T.Inl, T.Inr, T.Fold)):
            stack.append((x.body, y.body, tenv, ienv))
        elif isinstance(x, T.Pair):
            stack.append((x.left, y.left, tenv, ienv))
            stack.append((x.right, y.right, tenv, ienv))
        elif isinstance(x, T.App):
            stack.append((x.iso, y.iso, tenv, ienv))
            stack.append((x.arg, y.arg, tenv, ienv))
        elif isinstance(x, T.Let):
            inner = _bind(tenv, _ordered_vars(x.pat), _ordered_vars(y.pat))
            if inner is None:
                return False
            stack.append((x.pat, y.pat, inner, ienv))
            stack.append((x.bound, y.bound, tenv, ienv))
            stack.append((x.body, y.body, inner, ienv))
        elif isinstance(x, T.Clauses):
            if len(x.clauses) != len(y.clauses):
                return False
            for c, d in zip(x.clauses, y.clauses):
                stack.append((c, d, empty, ienv))
        elif isinstance(x, T.Clause):
            inner = _bind(tenv, _ordered_vars(x.lhs), _ordered_vars(y.lhs))
            if inner is None:
                return False
            stack.append((x.lhs, y.lhs, inner, ienv))
            stack.append((x.rhs, y.rhs, inner, ienv))
        elif isinstance(x, (T.Fix, T.Lam, T.NFix)):
            if isinstance(x, T.NFix) and x.n != y.n:
                return False
            inner = _bind(ienv, [x.var], [y.var])
            stack.append((x.body, y.body, tenv, inner))  # type: ignore[arg-type]
        elif isinstance(x, T.IsoVar):
            if not _same_var(x.name, y.name, ienv):
                return False
        elif isinstance(x, T.IsoApp):
            stack.append((x.fn, y.fn, tenv, ienv))
            stack.append((x.arg, y.arg, tenv, ienv))
        else:
            from .printer import IsoDecl, Program, TypeDecl

            if isinstance(x, Program):
                if len(x.decls) != len(y.decls):
                    return False
                for c, d in zip(x.decls, y.decls):
                    stack.append((c, d, empty, empty))
            elif isinstance(x, TypeDecl):
                if x.name != y.name or x.type != y.type:
                    return False
            elif isinstance(x, IsoDecl):
                if x.name.text != y.name.text or x.type != y.type:
                    return False
                stack.append((x.iso, y.iso, empty, empty))
            elif x != y:
                return False
    return True
