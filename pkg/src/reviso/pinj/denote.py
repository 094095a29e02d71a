"""Denotations of isos and terms as partial injections on truncated universes.

Fixpoints are first replaced by bounded fixpoints (``finitize``); a bounded
fixpoint that runs out of unfoldings denotes the empty map. A ground iso
denotes a memoized partial function on values, and its graph on a
universe is a ``PartialInjection`` assembled as the join of one graph per
clause. Arrow-typed isos denote host functions on denotations. Any value
deeper than the overflow bound is treated as undefined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

from ..deep import run_deep
from ..eval import DEFAULT_FUEL, OutOfFuel, Stuck, Value, evaluate, match
from ..syntax import terms as T
from ..syntax.names import Name
from ..syntax.printer import pretty_print
from ..syntax.types import Arrow, Ground, IsoType
from .injection import IncompatibleJoin, PartialInjection, join
from .universe import ValueUniverse

__all__ = [
    "Agree",
    "ArrowDenotation",
    "Disagree",
    "GroundDenotation",
    "Inconclusive",
    "Semantics",
    "Verdict",
    "check_adequacy",
    "check_soundness_step",
    "finitize",
    "graph_of",
    "sem_iso",
    "sem_term",
]

AGREE, DISAGREE, INCONCLUSIVE = "Agree", "Disagree", "Inconclusive"


# -- finitary fixpoints -----------------------------------------------------------


def finitize(node, n: int):
    """Replace every ``fix`` by a fixpoint that may unfold at most ``n`` times.

    Shared subtrees stay shared in the result.
    """
    if n < 0:
        raise ValueError("unfold budget must be non-negative")
    memo: dict[int, T.Node] = {}

    def go(x):
        hit = memo.get(id(x))
        if hit is not None:
            return hit
        if isinstance(x, T.Iso) and not _has_fix(x):
            out = x
        elif isinstance(x, T.Fix):
            out = T.NFix(n, x.var, go(x.body), x.ty, x.span)
        elif isinstance(x, T.NFix):
            out = T.NFix(x.n, x.var, go(x.body), x.ty, x.span)
        elif isinstance(x, T.Clauses):
            out = T.Clauses([T.Clause(c.lhs, go(c.rhs), c.span) for c in x.clauses], x.ty, x.span)
        elif isinstance(x, T.Lam):
            out = T.Lam(x.var, go(x.body), x.ty, x.span)
        elif isinstance(x, T.IsoApp):
            out = T.IsoApp(go(x.fn), go(x.arg), x.span)
        elif isinstance(x, (T.IsoVar, T.EmptyIso)):
            out = x
        elif isinstance(x, T.App):
            out = T.App(go(x.iso), go(x.arg), x.span)
        elif isinstance(x, T.Let):
            out = T.Let(x.pat, go(x.bound), go(x.body), x.span, x.ty)
        elif isinstance(x, T.Pair):
            out = x if x.is_value else T.Pair(go(x.left), go(x.right), x.span)
        elif isinstance(x, (T.Inl, T.Inr, T.Fold)):
            out = x if x.is_value else type(x)(go(x.body), x.span)
        else:
            out = x
        memo[id(x)] = out
        return out

    return run_deep(go, node)


_fix_memo: dict[int, tuple[T.Node, bool]] = {}


def _has_fix(w: T.Node) -> bool:
    hit = _fix_memo.get(id(w))
    if hit is not None and hit[0] is w:
        return hit[1]
    if isinstance(w, T.Fix):
        r = True
    elif isinstance(w, (T.NFix, T.Lam)):
        r = _has_fix(w.body)
    elif isinstance(w, T.IsoApp):
        r = _has_fix(w.fn) or _has_fix(w.arg)
    elif isinstance(w, T.Clauses):
        r = any(_has_fix(c.rhs) for c in w.clauses)
    elif isinstance(w, T.Let):
        r = _has_fix(w.bound) or _has_fix(w.body)
    elif isinstance(w, T.App):
        r = _has_fix(w.iso) or _has_fix(w.arg)
    else:
        r = False
    _fix_memo[id(w)] = (w, r)
    return r


# -- denotations ----------------------------------------------------------------------


class GroundDenotation:
    """A memoized partial function on closed values.

    ``origin`` records which clause produced each defined output, so that
    graphs can be assembled as a join of per-clause graphs.
    """

    __slots__ = ("fn", "memo", "origin", "ty")

    def __init__(self, fn: Callable[[T.Term], T.Term | None], ty: IsoType | None = None) -> None:
        self.fn = fn
        self.memo: dict[T.Term, T.Term | None] = {}
        self.origin: dict[T.Term, int] = {}
        self.ty = ty

    def __call__(self, v: T.Term) -> T.Term | None:
        memo = self.memo
        if v in memo:
            return memo[v]
        r = self.fn(v)
        memo[v] = r
        return r

    def apply(self, arg: "Denotation") -> "Denotation":
        raise TypeError("a ground iso cannot be applied to an iso")


class ArrowDenotation:
    __slots__ = ("fn", "ty", "memo")

    def __init__(self, fn: Callable[["Denotation"], "Denotation"], ty: IsoType | None = None) -> None:
        self.fn = fn
        self.ty = ty
        self.memo: dict[int, tuple[Denotation, Denotation]] = {}

    def apply(self, arg: "Denotation") -> "Denotation":
        hit = self.memo.get(id(arg))
        if hit is None:
            hit = (arg, self.fn(arg))
            self.memo[id(arg)] = hit
        return hit[1]


Denotation = Union[GroundDenotation, ArrowDenotation]


class Semantics:
    """Interpreter into partial injections.

    ``depth`` bounds the universes used for graphs; ``overflow`` bounds the
    fold depth of any value passed to or returned by an iso (default
    ``depth``). ``unfold_exhausted`` and ``overflowed`` record whether either
    budget was ever binding.
    """

    def __init__(self, depth: int, overflow: int | None = None) -> None:
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.depth = depth
        self.overflow = depth if overflow is None else overflow
        self.unfold_exhausted = False
        self.overflowed = False
        self._cache: dict[tuple, tuple[T.Node, Denotation]] = {}

    # -- isos --

    def iso(self, w: T.Iso, env: Mapping[Name, Denotation] | None = None) -> Denotation:
        env = env or {}
        fiv = T.free_iso_vars(w)
        key = (id(w), tuple(sorted((n.text, n.uid, id(env[n])) for n in fiv if n in env)))
        hit = self._cache.get(key)
        if hit is not None and hit[0] is w:
            return hit[1]
        den = self._iso(w, env)
        self._cache[key] = (w, den)
        return den

    def _iso(self, w: T.Iso, env: Mapping[Name, Denotation]) -> Denotation:
        if isinstance(w, T.IsoVar):
            try:
                return env[w.name]
            except KeyError:
                raise ValueError(f"unbound iso variable {w.name}") from None
        if isinstance(w, T.Clauses):
            return self._clauses(w, env)
        if isinstance(w, T.EmptyIso):
            return self._empty(w.ty, exhausted=False)
        if isinstance(w, T.Lam):
            def lam(d: Denotation, w=w, env=env) -> Denotation:
                inner = dict(env)
                inner[w.var] = d
                return self.iso(w.body, inner)

            return ArrowDenotation(lam, w.ty)
        if isinstance(w, T.IsoApp):
            return self.iso(w.fn, env).apply(self.iso(w.arg, env))
        if isinstance(w, T.NFix):
            den = self._empty(w.ty, exhausted=True)
            for _ in range(w.n):
                inner = dict(env)
                inner[w.var] = den
                den = self.iso(w.body, inner)
            return den
        if isinstance(w, T.Fix):
            raise ValueError("unbounded fixpoint; finitize the iso first")
        raise TypeError(f"not an iso: {w!r}")

    def _empty(self, ty: IsoType | None, exhausted: bool) -> Denotation:
        if isinstance(ty, Arrow):
            res = ty.res
            return ArrowDenotation(lambda _d: self._empty(res, exhausted), ty)

        def nowhere(_v: T.Term) -> None:
            if exhausted:
                self.unfold_exhausted = True
            return None

        return GroundDenotation(nowhere, ty)

    def _clauses(self, w: T.Clauses, env: Mapping[Name, Denotation]) -> GroundDenotation:
        clauses = w.clauses
        den: GroundDenotation

        def apply(v: T.Term) -> T.Term | None:
            found = None
            for i, c in enumerate(clauses):
                sigma = match(c.lhs, v)
                if sigma is not None:
                    if found is not None:
                        raise IncompatibleJoin(
                            f"clauses {found[0] + 1} and {i + 1} both match {pretty_print(v)}"
                        )
                    found = (i, sigma)
            if found is None:
                return None
            r = self.term(clauses[found[0]].rhs, found[1], env)
            if r is None:
                return None
            if T.value_depth(r) > self.overflow:
                self.overflowed = True
                return None
            den.origin[v] = found[0]
            return r

        den = GroundDenotation(apply, w.ty)
        return den

    # -- terms --

    def term(
        self,
        t: T.Term,
        sigma: Mapping[Name, T.Term] | None = None,
        env: Mapping[Name, Denotation] | None = None,
    ) -> T.Term | None:
        """The value denoted by ``t`` under the bindings ``sigma``, or ``None``."""
        sigma = sigma or {}
        env = env or {}
        return self._term(t, sigma, env)

    def _term(self, t: T.Term, sigma, env) -> T.Term | None:
        if t.is_value and not T.free_vars(t):
            return t
        if isinstance(t, T.Var):
            return sigma.get(t.name)
        if isinstance(t, (T.Inl, T.Inr, T.Fold)):
            b = self._term(t.body, sigma, env)
            return None if b is None else type(t)(b)
        if isinstance(t, T.Pair):
            a = self._term(t.left, sigma, env)
            if a is None:
                return None
            b = self._term(t.right, sigma, env)
            return None if b is None else T.Pair(a, b)
        if isinstance(t, T.App):
            arg = self._term(t.arg, sigma, env)
            if arg is None:
                return None
            if T.value_depth(arg) > self.overflow:
                self.overflowed = True
                return None
            den = self.iso(t.iso, env)
            if not isinstance(den, GroundDenotation):
                raise TypeError("applied an arrow-typed iso to a value")
            return den(arg)
        if isinstance(t, T.Let):
            v = self._term(t.bound, sigma, env)
            if v is None:
                return None
            binds = match(t.pat, v)
            if binds is None:
                return None
            inner = dict(sigma)
            inner.update(binds)
            return self._term(t.body, inner, env)
        if isinstance(t, T.Unit):
            return t
        raise TypeError(f"not a term: {t!r}")

    # -- graphs --

    def graph(self, den: Denotation, ty: IsoType, depth: int | None = None) -> PartialInjection:
        """The graph of a ground denotation on the universes at ``depth``.

        Built as the join of per-clause graphs; raises ``IncompatibleJoin``
        if two clauses send different inputs to the same output.
        """
        if not isinstance(den, GroundDenotation) or not isinstance(ty, Ground):
            raise TypeError("graphs exist only for ground isos")
        d = self.depth if depth is None else depth
        dom, cod = ValueUniverse(ty.dom, d), ValueUniverse(ty.cod, d)

        def build() -> PartialInjection:
            per_clause: dict[int, list[tuple[int, int]]] = {}
            for i in range(len(dom)):
                v = dom.value_at(i)
                r = den(v)
                if r is None:
                    continue
                j = cod.ordinal_or_none(r)
                if j is None:
                    self.overflowed = True
                    continue
                per_clause.setdefault(den.origin.get(v, -1), []).append((i, j))
            parts = [PartialInjection(dom, cod, ps) for _, ps in sorted(per_clause.items())]
            return join(parts, dom, cod)

        return run_deep(build)


# -- module-level entry points -------------------------------------------------------


def sem_iso(
    psi_env: Mapping[Name, Denotation] | None,
    w: T.Iso,
    depth: int,
    semantics: Semantics | None = None,
) -> Denotation:
    s = semantics or Semantics(depth)
    return run_deep(s.iso, w, psi_env)


def sem_term(t: T.Term, depth: int, semantics: Semantics | None = None) -> T.Term | None:
    s = semantics or Semantics(depth)
    return run_deep(s.term, t)


def graph_of(w: T.Iso, ty: IsoType, depth: int, unfold: int, overflow: int | None = None) -> PartialInjection:
    """Graph of the closed ground iso ``w`` with fixpoints bounded by ``unfold``."""
    s = Semantics(depth, overflow)
    den = sem_iso({}, finitize(w, unfold), depth, s)
    return s.graph(den, ty)


# -- cross-checks against evaluation --------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    kind: str
    detail: str = ""
    operational: object = None
    denotational: T.Term | None = None

    def __bool__(self) -> bool:
        return self.kind != DISAGREE


def Agree(detail: str = "", **kw) -> Verdict:
    return Verdict(AGREE, detail, **kw)


def Disagree(detail: str = "", **kw) -> Verdict:
    return Verdict(DISAGREE, detail, **kw)


def Inconclusive(detail: str = "", **kw) -> Verdict:
    return Verdict(INCONCLUSIVE, detail, **kw)


def check_adequacy(
    t: T.Term, fuel: int = DEFAULT_FUEL, unfold: int = 16, depth: int = 6
) -> Verdict:
    """Compare evaluation of the closed term ``t`` with its denotation."""
    op = evaluate(t, fuel)
    s = Semantics(depth)
    den = sem_term(finitize(t, unfold), depth, s)
    budgets = s.unfold_exhausted or s.overflowed
    if isinstance(op, Value):
        if den is None:
            if budgets:
                return Inconclusive("denotation budget binding", operational=op)
            return Disagree("terminates but denotes nothing", operational=op)
        if den == op.value:
            return Agree(operational=op, denotational=den)
        return Disagree("different values", operational=op, denotational=den)
    if isinstance(op, Stuck):
        if den is None:
            return Agree("stuck and undefined", operational=op)
        return Disagree("stuck but denotes a value", operational=op, denotational=den)
    assert isinstance(op, OutOfFuel)
    return Inconclusive("fuel exhausted", operational=op, denotational=den)


def check_soundness_step(t: T.Term, t2: T.Term, unfold: int = 16, depth: int = 6) -> bool:
    """Whether a reduction step ``t -> t2`` preserves the denotation.

    Both sides are interpreted with the same budgets. A side that is
    undefined only because a budget ran out does not count against the
    step.
    """
    s1, s2 = Semantics(depth), Semantics(depth)
    d1 = sem_term(finitize(t, unfold), depth, s1)
    d2 = sem_term(finitize(t2, unfold), depth, s2)
    if d1 is not None and d2 is not None:
        return d1 == d2
    if d1 is None and d2 is None:
        return True
    undefined = s1 if d1 is None else s2
    return undefined.unfold_exhausted or undefined.overflowed
