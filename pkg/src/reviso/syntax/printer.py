"""Surface-syntax printer.

Output re-parses to an alpha-equivalent tree. Binders whose display text
would collide with another binder in scope, or with a free identifier, get a
numeric suffix. Term printing runs on an explicit work stack so very deep
values (long lists, large numerals) print without recursion.
"""

from __future__ import annotations

from typing import Iterable

from . import terms as T
from .names import Name
from .types import Arrow, Ground, IsoType, Mu, Prod, Sum, TVar, Type, Unit, is_bool, is_nat, list_element

# -- types ------------------------------------------------------------------


def show_type(t: Type) -> str:
    out: list[str] = []
    _type(t, 0, True, {}, out)
    return "".join(out)


def _type(t: Type, level: int, tail: bool, env: dict[Name, str], out: list[str]) -> None:
    # level 0: sum operand on the right, 1: product position, 2: atom
    if is_nat(t):
        out.append("Nat")
        return
    elem = list_element(t)
    if elem is not None:
        out.append("[")
        _type(elem, 0, True, env, out)
        out.append("]")
        return
    if isinstance(t, Unit):
        out.append("1")
    elif isinstance(t, TVar):
        out.append(env.get(t.name, t.name.text))
    elif isinstance(t, Sum):
        paren = level > 0
        if paren:
            out.append("(")
        _type(t.left, 1, False, env, out)
        out.append(" + ")
        _type(t.right, 0, tail or paren, env, out)
        if paren:
            out.append(")")
    elif isinstance(t, Prod):
        paren = level > 1
        if paren:
            out.append("(")
        _type(t.left, 2, False, env, out)
        out.append(" * ")
        _type(t.right, 1, tail or paren, env, out)
        if paren:
            out.append(")")
    elif isinstance(t, Mu):
        paren = not tail
        if paren:
            out.append("(")
        shown = set(env.values())
        disp = t.var.text
        k = 1
        while disp in shown:
            disp = f"{t.var.text}{k}"
            k += 1
        inner = dict(env)
        inner[t.var] = disp
        out.append(f"mu {disp}. ")
        _type(t.body, 0, True, inner, out)
        if paren:
            out.append(")")
    else:
        raise TypeError(f"not a type: {t!r}")


def show_isotype(t: IsoType) -> str:
    if isinstance(t, Ground):
        return f"{show_type(t.dom)} <-> {show_type(t.cod)}"
    if isinstance(t, Arrow):
        res = show_isotype(t.res)
        if isinstance(t.res, Ground):
            res = f"({res})"
        return f"({show_isotype(t.arg)}) -> {res}"
    raise TypeError(f"not an iso type: {t!r}")


# -- terms and isos -----------------------------------------------------------

class _Printer:
    def __init__(self, root: object) -> None:
        self.names: dict[Name, str] = {}
        self.active: set[str] = set()
        self.reserved: set[str] = _free_texts(root)
        self.out: list[str] = []

    def choose(self, name: Name) -> tuple[Name, str | None, str]:
        base = name.text
        disp = base
        k = 1
        while disp in self.active or disp in self.reserved:
            disp = f"{base}_{k}"
            k += 1
        prev = self.names.get(name)
        self.names[name] = disp
        return (name, prev, disp)

    def show(self, name: Name) -> str:
        return self.names.get(name, name.text)

    def run(self, item: tuple) -> str:
        stack: list = [item]
        out = self.out
        while stack:
            it = stack.pop()
            if isinstance(it, str):
                out.append(it)
                continue
            kind = it[0]
            if kind == "t":
                self.term(it[1], it[2], stack)
            elif kind == "i":
                self.iso(it[1], it[2], stack)
            elif kind == "act":
                for name, _, disp in it[1]:
                    self.names[name] = disp
                    self.active.add(disp)
            else:  # "pop"
                for name, prev, disp in it[1]:
                    self.active.discard(disp)
                    if prev is None:
                        self.names.pop(name, None)
                    else:
                        self.names[name] = prev
        return "".join(out)

    # term contexts: 0 any, 1 prefix operand, 2 atom
    def term(self, t: T.Term, ctx: int, stack: list) -> None:
        push = stack.append
        if isinstance(t, T.Unit):
            push("()")
        elif isinstance(t, T.Var):
            push(self.show(t.name))
        elif isinstance(t, (T.Inl, T.Inr, T.Fold)):
            parts = []
            body: T.Term = t
            while isinstance(body, (T.Inl, T.Inr, T.Fold)):
                parts.append(_KW[type(body)])
                body = body.body
            paren = ctx >= 2
            if paren:
                push(")")
            push(("t", body, 1))
            push("".join(parts))
            if paren:
                push("(")
        elif isinstance(t, T.Pair):
            elems = _tuple_elems(t)
            push(")")
            for i in range(len(elems) - 1, -1, -1):
                push(("t", elems[i], 0))
                if i:
                    push(", ")
            push("(")
        elif isinstance(t, T.App):
            paren = ctx >= 2
            if paren:
                push(")")
            arg_ctx = 2 if isinstance(t.arg, (T.App, T.Let)) else 1
            push(("t", t.arg, arg_ctx))
            push(" ")
            push(("i", t.iso, "head"))
            if paren:
                push("(")
        elif isinstance(t, T.Let):
            paren = ctx >= 1
            saved = [self.choose(n) for n in T.pattern_vars(t.pat)]
            pat_text = self._pattern(t.pat)
            if paren:
                push(")")
            push(("pop", saved))
            push(("t", t.body, 0))
            push(("act", saved))
            push(" in ")
            push(("t", t.bound, 0))
            push(f"let {pat_text} = ")
            if paren:
                push("(")
        else:
            raise TypeError(f"not a term: {t!r}")

    def _pattern(self, p: T.Term) -> str:
        if isinstance(p, T.Var):
            return self.show(p.name)
        if isinstance(p, T.Pair):
            return "(" + ", ".join(self._pattern(e) for e in _tuple_elems(p)) + ")"
        raise TypeError(f"not a pattern: {p!r}")

    # iso contexts: "top" checks against a known type, "head" synthesises
    # its type (needs an ascription), "arg" is an iso argument and "atom"
    # any other position needing parentheses
    def iso(self, w: T.Iso, ctx: str, stack: list) -> None:
        push = stack.append
        ty = getattr(w, "ty", None)
        if ctx == "arg":
            ctx = "head" if ty is not None else "atom"
        if ctx == "head" and ty is not None and not isinstance(w, (T.IsoVar, T.IsoApp, T.EmptyIso)):
            push(f" : {show_isotype(ty)})")
            self._iso_core(w, "top", stack)
            push("(")
            return
        self._iso_core(w, ctx, stack)

    def _iso_core(self, w: T.Iso, ctx: str, stack: list) -> None:
        push = stack.append
        if isinstance(w, T.IsoVar):
            push(self.show(w.name))
        elif isinstance(w, T.Clauses):
            if not w.clauses:
                push("{}")
                return
            push(" }")
            for i in range(len(w.clauses) - 1, -1, -1):
                c = w.clauses[i]
                saved = [self.choose(n) for n in _value_vars(c.lhs)]
                push(("pop", saved))
                push(("t", c.rhs, 0))
                push(" <-> ")
                push(("t", c.lhs, 0))
                push(("act", saved))
                if i:
                    push(" | ")
            push("{ ")
        elif isinstance(w, (T.Fix, T.Lam, T.NFix)):
            paren = ctx != "top"
            if paren:
                push(")")
            saved = [self.choose(w.var)]
            disp = saved[0][2]
            push(("pop", saved))
            push(("i", w.body, "top"))
            push(("act", saved))
            if isinstance(w, T.Fix):
                push(f"fix {disp}. ")
            elif isinstance(w, T.Lam):
                push(f"\\{disp}. ")
            else:
                push(f"nfix {w.n} {disp}. ")
            if paren:
                push("(")
        elif isinstance(w, T.IsoApp):
            paren = ctx == "atom"
            if paren:
                push(")")
            push(("i", w.arg, "arg"))
            push(" ")
            push(("i", w.fn, "head"))
            if paren:
                push("(")
        elif isinstance(w, T.EmptyIso):
            if w.ty is not None:
                push(f"(empty : {show_isotype(w.ty)})")
            else:
                push("empty")
        else:
            raise TypeError(f"not an iso: {w!r}")


_KW = {T.Inl: "inl ", T.Inr: "inr ", T.Fold: "fold "}


def _tuple_elems(t: T.Pair) -> list[T.Term]:
    elems = [t.left]
    r = t.right
    while isinstance(r, T.Pair):
        elems.append(r.left)
        r = r.right
    elems.append(r)
    return elems


def _value_vars(v: T.Term) -> list[Name]:
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


def _free_texts(root: object) -> set[str]:
    """Texts of stamp-0 identifiers, which binders must never shadow."""
    out: set[str] = set()
    stack = [root]
    while stack:
        n = stack.pop()
        if isinstance(n, T.Node):
            for f in type(n)._fields:
                stack.append(getattr(n, f))
        elif isinstance(n, tuple):
            stack.extend(n)
        elif isinstance(n, Name) and n.uid == 0:
            out.add(n.text)
    return out


# -- programs -----------------------------------------------------------------


class TypeDecl:
    __slots__ = ("name", "type", "span")

    def __init__(self, name: str, type: Type, span=None) -> None:
        self.name = name
        self.type = type
        self.span = span


class IsoDecl:
    __slots__ = ("name", "type", "iso", "span")

    def __init__(self, name: Name, type: IsoType, iso: T.Iso, span=None) -> None:
        self.name = name
        self.type = type
        self.iso = iso
        self.span = span


class Program:
    __slots__ = ("decls", "text", "file")

    def __init__(self, decls: Iterable[TypeDecl | IsoDecl], text: str = "", file: str = "<input>") -> None:
        self.decls = list(decls)
        self.text = text
        self.file = file

    @property
    def isos(self) -> list[IsoDecl]:
        return [d for d in self.decls if isinstance(d, IsoDecl)]

    def iso(self, name: str) -> IsoDecl:
        for d in self.decls:
            if isinstance(d, IsoDecl) and d.name.text == name:
                return d
        raise KeyError(name)


def pretty_print(node: object, ty: Type | None = None) -> str:
    """Render any syntax node; with ``ty`` closed values use literal sugar."""
    if isinstance(node, Type):
        return show_type(node)
    if isinstance(node, IsoType):
        return show_isotype(node)
    if isinstance(node, Program):
        return "".join(pretty_print(d) + "\n" for d in node.decls)
    if isinstance(node, TypeDecl):
        return f"type {node.name} = {show_type(node.type)};"
    if isinstance(node, IsoDecl):
        body = _Printer(node.iso).run(("i", node.iso, "top"))
        return f"iso {node.name.text} : {show_isotype(node.type)} = {body};"
    if isinstance(node, T.Term) and ty is not None and T.is_closed_value(node):
        return show_value(node, ty)
    if isinstance(node, T.Term):
        return _Printer(node).run(("t", node, 0))
    if isinstance(node, T.Iso):
        return _Printer(node).run(("i", node, "top"))
    if isinstance(node, T.Clause):
        return _Printer(node).run(("i", T.Clauses([node]), "top"))[2:-2]
    raise TypeError(f"cannot print {type(node).__name__}")


def show_value(v: T.Term, ty: Type) -> str:
    """Type-directed rendering of a closed value with nat/list/bool sugar."""
    out: list[str] = []
    stack: list = [(v, ty, 0)]
    while stack:
        it = stack.pop()
        if isinstance(it, str):
            out.append(it)
            continue
        v, ty, ctx = it
        if is_nat(ty):
            n = T.nat_of(v)
            if n is not None:
                out.append(str(n))
                continue
        if is_bool(ty) and isinstance(v, (T.Inl, T.Inr)) and isinstance(v.body, T.Unit):
            out.append("tt" if isinstance(v, T.Inl) else "ff")
            continue
        elem = list_element(ty)
        if elem is not None:
            items = T.list_of_value(v)
            if items is not None:
                stack.append("]")
                for i in range(len(items) - 1, -1, -1):
                    stack.append((items[i], elem, 0))
                    if i:
                        stack.append(", ")
                stack.append("[")
                continue
        if isinstance(v, T.Unit):
            out.append("()")
        elif isinstance(v, (T.Inl, T.Inr)) and isinstance(ty, Sum):
            kw = "inl " if isinstance(v, T.Inl) else "inr "
            sub = ty.left if isinstance(v, T.Inl) else ty.right
            if ctx >= 2:
                stack.append(")")
            stack.append((v.body, sub, 1))
            stack.append(kw)
            if ctx >= 2:
                stack.append("(")
        elif isinstance(v, T.Fold) and isinstance(ty, Mu):
            if ctx >= 2:
                stack.append(")")
            stack.append((v.body, ty.unfold(), 1))
            stack.append("fold ")
            if ctx >= 2:
                stack.append("(")
        elif isinstance(v, T.Pair) and isinstance(ty, Prod):
            stack.append(")")
            stack.append((v.right, ty.right, 0))
            stack.append(", ")
            stack.append((v.left, ty.left, 0))
            stack.append("(")
        else:
            out.append(pretty_print(v))
    return "".join(out)
