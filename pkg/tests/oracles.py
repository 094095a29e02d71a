"""Reference implementations written directly in Python, used as oracles."""

from __future__ import annotations

from reviso.syntax import terms as T
from reviso.syntax.types import Mu, Prod, Sum, Type, Unit


def cantor(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + x


def cantor_first_step(x: int, y: int):
    """Position after one move along the diagonal, or None at the origin."""
    if x > 0:
        return (x - 1, y + 1)
    if y >= 2:
        return (y - 1, 0)
    if y == 1:
        return (0, 0)
    return None


def nats(v: T.Term) -> list[int]:
    items = T.list_of_value(v)
    assert items is not None
    return [T.nat_of(x) for x in items]


def L(*xs: int) -> T.Term:
    return T.list_value([T.nat_value(x) for x in xs])


N = T.nat_value


def py_of(v: T.Term, ty: Type):
    """Host value for a closed value: ints for naturals, lists, tuples, tags."""
    from reviso.syntax.types import is_nat, list_element

    if is_nat(ty):
        return T.nat_of(v)
    elem = list_element(ty)
    if elem is not None:
        return [py_of(x, elem) for x in T.list_of_value(v)]
    if isinstance(ty, Unit):
        return ()
    if isinstance(ty, Sum):
        return ("L", py_of(v.body, ty.left)) if isinstance(v, T.Inl) else ("R", py_of(v.body, ty.right))
    if isinstance(ty, Prod):
        return (py_of(v.left, ty.left), py_of(v.right, ty.right))
    if isinstance(ty, Mu):
        return ("fold", py_of(v.body, ty.unfold()))
    raise TypeError(ty)


# tags of the flat encoding, by position in Bool + 1 + 1 + 1 + 1 + Nat
TT, FF, S, DSUM, DPROD, DMU = "tt", "ff", "S", "Dsum", "Dprod", "Dmu"


def encode(v: T.Term, ty: Type) -> list:
    """Flat encoding computed by structural recursion, independently of the iso."""
    if isinstance(ty, Unit):
        return [S]
    if isinstance(ty, Sum):
        if isinstance(v, T.Inl):
            return [DSUM, FF] + encode(v.body, ty.left)
        return [DSUM, TT] + encode(v.body, ty.right)
    if isinstance(ty, Prod):
        a = encode(v.left, ty.left)
        b = encode(v.right, ty.right)
        return [DPROD, len(a)] + a + b
    if isinstance(ty, Mu):
        return [DMU] + encode(v.body, ty.unfold())
    raise TypeError(ty)


def decode_tags(v: T.Term) -> list:
    out = []
    for x in T.list_of_value(v):
        depth = 0
        while isinstance(x, T.Inr) and depth < 5:
            x = x.body
            depth += 1
        if depth == 5:
            out.append(T.nat_of(x))
        elif depth == 0:
            out.append(TT if isinstance(x.body, T.Inl) else FF)
        else:
            out.append([None, S, DSUM, DPROD, DMU][depth])
    return out
