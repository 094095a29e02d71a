"""Term and iso syntax trees.

Nodes are plain ``__slots__`` classes: they are built in the evaluator's
inner loop, where dataclass construction overhead is noticeable. Structural
equality ignores spans and type annotations; hashing is cached per node.
Values, patterns and clause expressions are sub-grammars of ``Term`` and
are recognised by predicates rather than separate classes.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .names import Name, SourceSpan
from .types import Ground, IsoType


class Node:
    __slots__ = ("span", "_hash")
    _fields: tuple[str, ...] = ()

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        stack: list[tuple[object, object]] = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            ta = type(a)
            if ta is not type(b):
                return False
            if isinstance(a, Node):
                ha, hb = a._hash, b._hash  # type: ignore[union-attr]
                if ha is not None and hb is not None and ha != hb:
                    return False
                for f in ta._fields:  # type: ignore[attr-defined]
                    stack.append((getattr(a, f), getattr(b, f)))
            elif ta is tuple:
                if len(a) != len(b):  # type: ignore[arg-type]
                    return False
                stack.extend(zip(a, b))  # type: ignore[call-overload]
            elif a != b:
                return False
        return True

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self._fields))
            self._hash = h
        return h

    def __repr__(self) -> str:
        from .printer import pretty_print

        return pretty_print(self)


# ---------------------------------------------------------------------------
# terms


class Term(Node):
    __slots__ = ("is_value", "_fv", "_fiv")


class Unit(Term):
    __slots__ = ()
    _fields = ()

    def __init__(self, span: SourceSpan | None = None) -> None:
        self.span = span
        self._hash = None
        self.is_value = True
        self._fv = _EMPTY
        self._fiv = _EMPTY


class Var(Term):
    __slots__ = ("name",)
    _fields = ("name",)

    def __init__(self, name: Name, span: SourceSpan | None = None) -> None:
        self.name = name
        self.span = span
        self._hash = None
        self.is_value = True
        self._fv = None
        self._fiv = _EMPTY


class Inl(Term):
    __slots__ = ("body",)
    _fields = ("body",)

    def __init__(self, body: Term, span: SourceSpan | None = None) -> None:
        self.body = body
        self.span = span
        self._hash = None
        self.is_value = body.is_value
        self._fv = None
        self._fiv = None


class Inr(Term):
    __slots__ = ("body",)
    _fields = ("body",)

    def __init__(self, body: Term, span: SourceSpan | None = None) -> None:
        self.body = body
        self.span = span
        self._hash = None
        self.is_value = body.is_value
        self._fv = None
        self._fiv = None


class Fold(Term):
    __slots__ = ("body",)
    _fields = ("body",)

    def __init__(self, body: Term, span: SourceSpan | None = None) -> None:
        self.body = body
        self.span = span
        self._hash = None
        self.is_value = body.is_value
        self._fv = None
        self._fiv = None


class Pair(Term):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: Term, right: Term, span: SourceSpan | None = None) -> None:
        self.left = left
        self.right = right
        self.span = span
        self._hash = None
        self.is_value = left.is_value and right.is_value
        self._fv = None
        self._fiv = None


class App(Term):
    """Iso application ``iso arg``."""

    __slots__ = ("iso", "arg")
    _fields = ("iso", "arg")

    def __init__(self, iso: "Iso", arg: Term, span: SourceSpan | None = None) -> None:
        self.iso = iso
        self.arg = arg
        self.span = span
        self._hash = None
        self.is_value = False
        self._fv = None
        self._fiv = None


class Let(Term):
    """``let pat = bound in body``.

    In a clause expression ``bound`` is an application of an iso to a
    pattern. ``ty`` records the type of ``bound`` once the checker has seen
    it, so later re-checks of reduced terms need no inference.
    """

    __slots__ = ("pat", "bound", "body", "ty")
    _fields = ("pat", "bound", "body")

    def __init__(
        self,
        pat: Term,
        bound: Term,
        body: Term,
        span: SourceSpan | None = None,
        ty: object = None,
    ) -> None:
        self.pat = pat
        self.bound = bound
        self.body = body
        self.span = span
        self.ty = ty
        self._hash = None
        self.is_value = False
        self._fv = None
        self._fiv = None


# ---------------------------------------------------------------------------
# isos


class Iso(Node):
    __slots__ = ("_fiv",)


class Clause(Node):
    __slots__ = ("lhs", "rhs", "_fiv")
    _fields = ("lhs", "rhs")

    def __init__(self, lhs: Term, rhs: Term, span: SourceSpan | None = None) -> None:
        self.lhs = lhs
        self.rhs = rhs
        self.span = span
        self._hash = None
        self._fiv = None


class Clauses(Iso):
    __slots__ = ("clauses", "ty")
    _fields = ("clauses",)

    def __init__(
        self,
        clauses: Iterable[Clause],
        ty: Ground | None = None,
        span: SourceSpan | None = None,
    ) -> None:
        self.clauses = tuple(clauses)
        self.ty = ty
        self.span = span
        self._hash = None
        self._fiv = None


class Fix(Iso):
    __slots__ = ("var", "body", "ty")
    _fields = ("var", "body")

    def __init__(
        self, var: Name, body: Iso, ty: IsoType | None = None, span: SourceSpan | None = None
    ) -> None:
        self.var = var
        self.body = body
        self.ty = ty
        self.span = span
        self._hash = None
        self._fiv = None


class Lam(Iso):
    __slots__ = ("var", "body", "ty")
    _fields = ("var", "body")

    def __init__(
        self, var: Name, body: Iso, ty: IsoType | None = None, span: SourceSpan | None = None
    ) -> None:
        self.var = var
        self.body = body
        self.ty = ty
        self.span = span
        self._hash = None
        self._fiv = None


class IsoVar(Iso):
    __slots__ = ("name",)
    _fields = ("name",)

    def __init__(self, name: Name, span: SourceSpan | None = None) -> None:
        self.name = name
        self.span = span
        self._hash = None
        self._fiv = None


class IsoApp(Iso):
    __slots__ = ("fn", "arg")
    _fields = ("fn", "arg")

    def __init__(self, fn: Iso, arg: Iso, span: SourceSpan | None = None) -> None:
        self.fn = fn
        self.arg = arg
        self.span = span
        self._hash = None
        self._fiv = None


class NFix(Iso):
    """Fixpoint that may unfold at most ``n`` more times."""

    __slots__ = ("n", "var", "body", "ty")
    _fields = ("n", "var", "body")

    def __init__(
        self,
        n: int,
        var: Name,
        body: Iso,
        ty: IsoType | None = None,
        span: SourceSpan | None = None,
    ) -> None:
        if n < 0:
            raise ValueError("unfold budget must be non-negative")
        self.n = n
        self.var = var
        self.body = body
        self.ty = ty
        self.span = span
        self._hash = None
        self._fiv = None


class EmptyIso(Iso):
    """The nowhere-defined iso reached when a bounded fixpoint runs out."""

    __slots__ = ("ty",)
    _fields = ()

    def __init__(self, ty: IsoType | None = None, span: SourceSpan | None = None) -> None:
        self.ty = ty
        self.span = span
        self._hash = None
        self._fiv = _EMPTY


_EMPTY: frozenset = frozenset()


# ---------------------------------------------------------------------------
# variable scans


def free_vars(t: Term) -> frozenset[Name]:
    """Free term variables (isos never contain free term variables)."""
    fv = t._fv
    if fv is not None:
        return fv
    if isinstance(t, Var):
        fv = frozenset((t.name,))
    elif isinstance(t, (Inl, Inr, Fold)):
        fv = free_vars(t.body)
    elif isinstance(t, Pair):
        fv = free_vars(t.left) | free_vars(t.right)
    elif isinstance(t, App):
        fv = free_vars(t.arg)
    elif isinstance(t, Let):
        fv = free_vars(t.bound) | (free_vars(t.body) - pattern_vars_set(t.pat))
    else:
        fv = _EMPTY
    t._fv = fv
    return fv


def free_iso_vars(n: Node) -> frozenset[Name]:
    fiv = n._fiv  # type: ignore[attr-defined]
    if fiv is not None:
        return fiv
    if isinstance(n, IsoVar):
        fiv = frozenset((n.name,))
    elif isinstance(n, (Inl, Inr, Fold)):
        fiv = free_iso_vars(n.body)
    elif isinstance(n, Pair):
        fiv = free_iso_vars(n.left) | free_iso_vars(n.right)
    elif isinstance(n, App):
        fiv = free_iso_vars(n.iso) | free_iso_vars(n.arg)
    elif isinstance(n, Let):
        fiv = free_iso_vars(n.bound) | free_iso_vars(n.body)
    elif isinstance(n, Clauses):
        fiv = _EMPTY
        for c in n.clauses:
            fiv = fiv | free_iso_vars(c)
    elif isinstance(n, Clause):
        fiv = free_iso_vars(n.rhs)
    elif isinstance(n, (Fix, Lam, NFix)):
        fiv = free_iso_vars(n.body) - {n.var}
    elif isinstance(n, IsoApp):
        fiv = free_iso_vars(n.fn) | free_iso_vars(n.arg)
    else:
        fiv = _EMPTY
    n._fiv = fiv  # type: ignore[attr-defined]
    return fiv


def pattern_vars(p: Term) -> Iterator[Name]:
    if isinstance(p, Var):
        yield p.name
    elif isinstance(p, Pair):
        yield from pattern_vars(p.left)
        yield from pattern_vars(p.right)


def pattern_vars_set(p: Term) -> frozenset[Name]:
    return frozenset(pattern_vars(p))


def is_pattern(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, Pair):
        return is_pattern(t.left) and is_pattern(t.right)
    return False


def is_closed_value(t: Term) -> bool:
    return t.is_value and not free_vars(t)


def is_expression(t: Term) -> bool:
    """Clause right-hand side: a value behind a chain of iso-applied lets."""
    while isinstance(t, Let):
        if not (is_pattern(t.pat) and isinstance(t.bound, App) and is_pattern(t.bound.arg)):
            return False
        t = t.body
    return t.is_value


def value_depth(v: Term) -> int:
    """Fold-nesting depth: ``fold`` adds one, pairs take the maximum."""
    best = 0
    stack = [(v, 0)]
    while stack:
        t, d = stack.pop()
        if isinstance(t, Fold):
            stack.append((t.body, d + 1))
        elif isinstance(t, (Inl, Inr)):
            stack.append((t.body, d))
        elif isinstance(t, Pair):
            stack.append((t.left, d))
            stack.append((t.right, d))
        elif d > best:
            best = d
    return best


# ---------------------------------------------------------------------------
# literal helpers


UNIT_V = Unit()


def nat_value(n: int) -> Term:
    v: Term = Fold(Inl(UNIT_V))
    for _ in range(n):
        v = Fold(Inr(v))
    return v


def list_value(items: Iterable[Term]) -> Term:
    seq = list(items)
    v: Term = Fold(Inl(UNIT_V))
    for x in reversed(seq):
        v = Fold(Inr(Pair(x, v)))
    return v


def cons(h: Term, t: Term) -> Term:
    return Fold(Inr(Pair(h, t)))


def tuple_value(*parts: Term) -> Term:
    v = parts[-1]
    for p in reversed(parts[:-1]):
        v = Pair(p, v)
    return v


TT = Inl(UNIT_V)
FF = Inr(UNIT_V)


def nat_of(v: Term) -> int | None:
    """Inverse of ``nat_value``; ``None`` if ``v`` is not a numeral."""
    n = 0
    while isinstance(v, Fold) and isinstance(v.body, Inr):
        n += 1
        v = v.body.body
    if isinstance(v, Fold) and isinstance(v.body, Inl) and isinstance(v.body.body, Unit):
        return n
    return None


def list_of_value(v: Term) -> list[Term] | None:
    out: list[Term] = []
    while isinstance(v, Fold) and isinstance(v.body, Inr) and isinstance(v.body.body, Pair):
        out.append(v.body.body.left)
        v = v.body.body.right
    if isinstance(v, Fold) and isinstance(v.body, Inl) and isinstance(v.body.body, Unit):
        return out
    return None


def injection(i: int, n: int) -> Term:
    """The ``i``-th closed value of the unit sum with ``n`` summands."""
    if not 0 <= i < n:
        raise ValueError(f"injection {i} out of range for {n} summands")
    v: Term = UNIT_V if i == n - 1 else Inl(UNIT_V)
    for _ in range(i):
        v = Inr(v)
    return v


def injection_index(v: Term, n: int) -> int | None:
    i = 0
    while i < n - 1 and isinstance(v, Inr):
        v = v.body
        i += 1
    if i == n - 1:
        return i if isinstance(v, Unit) else None
    return i if isinstance(v, Inl) and isinstance(v.body, Unit) else None
