"""Partial injections between finite universes, stored as ordinal maps.

A morphism keeps its graph in both directions, so application, inversion,
restriction and composition are dictionary operations. Construction
rejects any graph that is not both functional and injective.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .universe import ValueUniverse


class NotInjective(ValueError):
    pass


class IncompatibleJoin(ValueError):
    """Two partial injections whose union is not a partial injection."""


class PartialInjection:
    __slots__ = ("dom", "cod", "fwd", "bwd")

    def __init__(
        self,
        dom: ValueUniverse | int,
        cod: ValueUniverse | int,
        pairs: Mapping[int, int] | Iterable[tuple[int, int]] = (),
    ) -> None:
        self.dom = dom
        self.cod = cod
        fwd: dict[int, int] = {}
        bwd: dict[int, int] = {}
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        nd, nc = len(dom) if not isinstance(dom, int) else dom, len(cod) if not isinstance(cod, int) else cod
        for a, b in items:
            if not (0 <= a < nd and 0 <= b < nc):
                raise ValueError(f"pair ({a}, {b}) outside the universes")
            if fwd.get(a, b) != b:
                raise NotInjective(f"{a} has two images")
            if bwd.get(b, a) != a:
                raise NotInjective(f"{b} has two preimages")
            fwd[a] = b
            bwd[b] = a
        self.fwd = fwd
        self.bwd = bwd

    @classmethod
    def _raw(cls, dom, cod, fwd: dict[int, int], bwd: dict[int, int]) -> "PartialInjection":
        f = cls.__new__(cls)
        f.dom, f.cod, f.fwd, f.bwd = dom, cod, fwd, bwd
        return f

    # -- basic structure ---------------------------------------------------------

    @classmethod
    def zero(cls, dom, cod) -> "PartialInjection":
        return cls._raw(dom, cod, {}, {})

    @classmethod
    def identity(cls, u) -> "PartialInjection":
        n = u if isinstance(u, int) else len(u)
        m = {i: i for i in range(n)}
        return cls._raw(u, u, m, dict(m))

    def __len__(self) -> int:
        return len(self.fwd)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PartialInjection) and self.fwd == other.fwd

    def __hash__(self) -> int:
        return hash(frozenset(self.fwd.items()))

    def __repr__(self) -> str:
        return f"PartialInjection({sorted(self.fwd.items())})"

    def __call__(self, i: int) -> int | None:
        return self.fwd.get(i)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.fwd.items())

    def is_zero(self) -> bool:
        return not self.fwd

    def leq(self, other: "PartialInjection") -> bool:
        """Graph inclusion."""
        g = other.fwd
        return all(g.get(a) == b for a, b in self.fwd.items())

    __le__ = leq

    # -- algebra -------------------------------------------------------------------

    def inverse(self) -> "PartialInjection":
        return PartialInjection._raw(self.cod, self.dom, dict(self.bwd), dict(self.fwd))

    def restriction(self) -> "PartialInjection":
        """The partial identity on the domain of definition."""
        m = {a: a for a in self.fwd}
        return PartialInjection._raw(self.dom, self.dom, m, dict(m))

    def then(self, g: "PartialInjection") -> "PartialInjection":
        """``g`` after ``self``."""
        fwd = {}
        gf = g.fwd
        for a, b in self.fwd.items():
            c = gf.get(b)
            if c is not None:
                fwd[a] = c
        return PartialInjection._raw(self.dom, g.cod, fwd, {c: a for a, c in fwd.items()})

    def after(self, f: "PartialInjection") -> "PartialInjection":
        """``self`` after ``f``."""
        return f.then(self)

    def compatible(self, other: "PartialInjection") -> bool:
        """Whether the union of the two graphs is still a partial injection."""
        for a, b in other.fwd.items():
            if self.fwd.get(a, b) != b or self.bwd.get(b, a) != a:
                return False
        return True


def join(family: Iterable[PartialInjection], dom=None, cod=None) -> PartialInjection:
    """Union of a pairwise compatible family; raises ``IncompatibleJoin`` otherwise."""
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    for f in family:
        dom = f.dom if dom is None else dom
        cod = f.cod if cod is None else cod
        for a, b in f.fwd.items():
            if fwd.get(a, b) != b or bwd.get(b, a) != a:
                raise IncompatibleJoin(f"graphs disagree at ({a}, {b})")
            fwd[a] = b
            bwd[b] = a
    if dom is None or cod is None:
        raise ValueError("the join of an empty family needs explicit universes")
    return PartialInjection._raw(dom, cod, fwd, bwd)
