"""Base types, iso types, and capture-avoiding type substitution.

Type equality is structural up to renaming of ``Mu`` binders: ``__eq__`` and
``__hash__`` go through a de Bruijn key, so ``mu X. 1 + X`` and
``mu Y. 1 + Y`` compare equal and can share dictionary slots.
"""

from __future__ import annotations

from typing import Iterator

from .names import Name, SourceSpan, fresh


class Type:
    __slots__ = ("span", "_key")

    def __init__(self, span: SourceSpan | None = None) -> None:
        self.span = span
        self._key = None

    def key(self) -> tuple:
        k = self._key
        if k is None:
            k = _debruijn(self, [])
            self._key = k
        return k

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Type):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        from .printer import show_type

        return show_type(self)


class Unit(Type):
    __slots__ = ()


class Sum(Type):
    __slots__ = ("left", "right")

    def __init__(self, left: Type, right: Type, span: SourceSpan | None = None) -> None:
        self.left = left
        self.right = right
        self.span = span
        self._key = None


class Prod(Type):
    __slots__ = ("left", "right")

    def __init__(self, left: Type, right: Type, span: SourceSpan | None = None) -> None:
        self.left = left
        self.right = right
        self.span = span
        self._key = None


class Mu(Type):
    __slots__ = ("var", "body")

    def __init__(self, var: Name, body: Type, span: SourceSpan | None = None) -> None:
        self.var = var
        self.body = body
        self.span = span
        self._key = None

    def unfold(self) -> Type:
        """The one-step unrolling ``body[self/var]`` used by ``fold``."""
        return subst_type(self.body, self.var, self)


class TVar(Type):
    __slots__ = ("name",)

    def __init__(self, name: Name, span: SourceSpan | None = None) -> None:
        self.name = name
        self.span = span
        self._key = None


def _debruijn(t: Type, env: list[Name]) -> tuple:
    if isinstance(t, Unit):
        return ("1",)
    if isinstance(t, Sum):
        return ("+", _debruijn(t.left, env), _debruijn(t.right, env))
    if isinstance(t, Prod):
        return ("*", _debruijn(t.left, env), _debruijn(t.right, env))
    if isinstance(t, Mu):
        env.append(t.var)
        try:
            return ("mu", _debruijn(t.body, env))
        finally:
            env.pop()
    if isinstance(t, TVar):
        for i in range(len(env) - 1, -1, -1):
            if env[i] == t.name:
                return ("b", len(env) - 1 - i)
        return ("f", t.name)
    raise TypeError(f"not a type: {t!r}")


UNIT = Unit()


def free_tvars(t: Type) -> set[Name]:
    out: set[Name] = set()

    def go(t: Type, bound: frozenset) -> None:
        if isinstance(t, (Sum, Prod)):
            go(t.left, bound)
            go(t.right, bound)
        elif isinstance(t, Mu):
            go(t.body, bound | {t.var})
        elif isinstance(t, TVar) and t.name not in bound:
            out.add(t.name)

    go(t, frozenset())
    return out


def is_closed(t: Type) -> bool:
    return not free_tvars(t)


def _binders(t: Type) -> Iterator[Name]:
    if isinstance(t, (Sum, Prod)):
        yield from _binders(t.left)
        yield from _binders(t.right)
    elif isinstance(t, Mu):
        yield t.var
        yield from _binders(t.body)


def subst_type(a: Type, x: Name, b: Type) -> Type:
    """Capture-avoiding ``a[b/x]``.

    Inner binders that clash with any variable of ``b`` (free or bound) are
    renamed first, which keeps the result free of shadowing as well as capture.
    """
    avoid = free_tvars(b) | set(_binders(b))
    return _subst(a, x, b, avoid)


def _subst(a: Type, x: Name, b: Type, avoid: set[Name]) -> Type:
    if isinstance(a, TVar):
        return b if a.name == x else a
    if isinstance(a, Unit):
        return a
    if isinstance(a, Sum):
        return Sum(_subst(a.left, x, b, avoid), _subst(a.right, x, b, avoid), a.span)
    if isinstance(a, Prod):
        return Prod(_subst(a.left, x, b, avoid), _subst(a.right, x, b, avoid), a.span)
    if isinstance(a, Mu):
        if a.var == x:
            return a
        if x not in free_tvars(a):
            return a
        var, body = a.var, a.body
        if var in avoid:
            nv = fresh(var.text)
            body = _subst(body, var, TVar(nv), set())
            var = nv
        return Mu(var, _subst(body, x, b, avoid), a.span)
    raise TypeError(f"not a type: {a!r}")


# -- common types -----------------------------------------------------------


def nat() -> Mu:
    x = fresh("X")
    return Mu(x, Sum(UNIT, TVar(x)))


def list_of(a: Type) -> Mu:
    x = fresh("X")
    return Mu(x, Sum(UNIT, Prod(a, TVar(x))))


def bool_type() -> Sum:
    return Sum(UNIT, UNIT)


def unit_sum(n: int) -> Type:
    """``1 + (1 + (... + 1))`` with ``n`` summands; ``n == 1`` gives ``1``."""
    if n < 1:
        raise ValueError("a unit sum needs at least one summand")
    t: Type = UNIT
    for _ in range(n - 1):
        t = Sum(UNIT, t)
    return t


def prod(*parts: Type) -> Type:
    """Right-nested product, matching the n-ary tuple sugar."""
    t = parts[-1]
    for p in reversed(parts[:-1]):
        t = Prod(p, t)
    return t


def list_element(t: Type) -> Type | None:
    """Element type if ``t`` is a list type ``mu X. 1 + A * X``."""
    if isinstance(t, Mu) and isinstance(t.body, Sum) and isinstance(t.body.left, Unit):
        r = t.body.right
        if isinstance(r, Prod) and isinstance(r.right, TVar) and r.right.name == t.var:
            if t.var not in free_tvars(r.left):
                return r.left
    return None


def is_nat(t: Type) -> bool:
    return t == _NAT


def is_bool(t: Type) -> bool:
    return t == _BOOL


_NAT = nat()
_BOOL = bool_type()


# -- iso types --------------------------------------------------------------


class IsoType:
    __slots__ = ("span",)

    def inverse(self) -> "IsoType":
        raise NotImplementedError

    def __repr__(self) -> str:
        from .printer import show_isotype

        return show_isotype(self)


class Ground(IsoType):
    __slots__ = ("dom", "cod")

    def __init__(self, dom: Type, cod: Type, span: SourceSpan | None = None) -> None:
        self.dom = dom
        self.cod = cod
        self.span = span

    def inverse(self) -> "Ground":
        return Ground(self.cod, self.dom, self.span)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ground) and self.dom == other.dom and self.cod == other.cod

    def __hash__(self) -> int:
        return hash(("<->", self.dom, self.cod))


class Arrow(IsoType):
    __slots__ = ("arg", "res")

    def __init__(self, arg: IsoType, res: IsoType, span: SourceSpan | None = None) -> None:
        self.arg = arg
        self.res = res
        self.span = span

    def inverse(self) -> "Arrow":
        return Arrow(self.arg.inverse(), self.res.inverse(), self.span)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Arrow) and self.arg == other.arg and self.res == other.res

    def __hash__(self) -> int:
        return hash(("->", self.arg, self.res))


def isotype_closed(t: IsoType) -> bool:
    if isinstance(t, Ground):
        return is_closed(t.dom) and is_closed(t.cod)
    return isotype_closed(t.arg) and isotype_closed(t.res)
