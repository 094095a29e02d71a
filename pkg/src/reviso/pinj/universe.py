"""Finite truncations of closed types.

The universe of a type at depth ``d`` holds every closed value whose fold
nesting is at most ``d``. Values are ranked arithmetically (mixed radix
over sums and products), so a universe can index a value without listing
its neighbours; listing is lazy and follows rank order.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from ..syntax import terms as T
from ..syntax.types import Mu, Prod, Sum, Type, Unit


class OutsideUniverse(ValueError):
    pass


_types: dict[tuple, Type] = {}


def _intern(t: Type) -> tuple:
    k = t.key()
    _types.setdefault(k, t)
    return k


@lru_cache(maxsize=None)
def _size(k: tuple, d: int) -> int:
    t = _types[k]
    if isinstance(t, Unit):
        return 1
    if isinstance(t, Sum):
        return _size(_intern(t.left), d) + _size(_intern(t.right), d)
    if isinstance(t, Prod):
        return _size(_intern(t.left), d) * _size(_intern(t.right), d)
    if isinstance(t, Mu):
        return 0 if d == 0 else _size(_intern(t.unfold()), d - 1)
    raise ValueError(f"not a closed type: {t!r}")


class ValueUniverse:
    """All closed values of ``ty`` with fold depth at most ``depth``."""

    __slots__ = ("ty", "depth", "_key")

    def __init__(self, ty: Type, depth: int) -> None:
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.ty = ty
        self.depth = depth
        self._key = _intern(ty)

    @property
    def size(self) -> int:
        """Exact cardinality; unlike ``len`` it is not capped at ``sys.maxsize``."""
        return _size(self._key, self.depth)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[T.Term]:
        for i in range(self.size):
            yield self.value_at(i)

    def __contains__(self, v: object) -> bool:
        return isinstance(v, T.Term) and self.ordinal_or_none(v) is not None

    def __repr__(self) -> str:
        return f"ValueUniverse({self.ty!r}, depth={self.depth}, size={self.size})"

    @property
    def values(self) -> list[T.Term]:
        return list(self)

    def ordinal(self, v: T.Term) -> int:
        i = self.ordinal_or_none(v)
        if i is None:
            raise OutsideUniverse(f"value outside the universe: {v!r}")
        return i

    def ordinal_or_none(self, v: T.Term) -> int | None:
        rank = 0
        t, d = self.ty, self.depth
        # rank = sum of offsets * scale; products are handled by a work stack
        stack: list[tuple[T.Term, Type, int, int]] = [(v, t, d, 1)]
        while stack:
            v, t, d, scale = stack.pop()
            if isinstance(t, Unit):
                if not isinstance(v, T.Unit):
                    return None
            elif isinstance(t, Sum):
                if isinstance(v, T.Inl):
                    stack.append((v.body, t.left, d, scale))
                elif isinstance(v, T.Inr):
                    rank += scale * _size(_intern(t.left), d)
                    stack.append((v.body, t.right, d, scale))
                else:
                    return None
            elif isinstance(t, Prod):
                if not isinstance(v, T.Pair):
                    return None
                right = _size(_intern(t.right), d)
                stack.append((v.left, t.left, d, scale * right))
                stack.append((v.right, t.right, d, scale))
            elif isinstance(t, Mu):
                if d == 0 or not isinstance(v, T.Fold):
                    return None
                stack.append((v.body, t.unfold(), d - 1, scale))
            else:
                return None
        return rank

    def value_at(self, i: int) -> T.Term:
        if not 0 <= i < self.size:
            raise IndexError(i)
        return _unrank(self.ty, self.depth, i)


def _unrank(t: Type, d: int, i: int) -> T.Term:
    if isinstance(t, Unit):
        return T.UNIT_V
    if isinstance(t, Sum):
        n = _size(_intern(t.left), d)
        return T.Inl(_unrank(t.left, d, i)) if i < n else T.Inr(_unrank(t.right, d, i - n))
    if isinstance(t, Prod):
        m = _size(_intern(t.right), d)
        return T.Pair(_unrank(t.left, d, i // m), _unrank(t.right, d, i % m))
    if isinstance(t, Mu):
        return T.Fold(_unrank(t.unfold(), d - 1, i))
    raise ValueError(f"not a closed type: {t!r}")


def enumerate_values(ty: Type, depth: int) -> ValueUniverse:
    return ValueUniverse(ty, depth)
