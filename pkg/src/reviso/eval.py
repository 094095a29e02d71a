"""Small-step evaluation with pattern matching, plus a fuel-bounded driver.

``step`` is the one-step relation written directly as a recursive function.
``evaluate`` computes the same reduction sequence with an explicit
continuation stack, so it neither rebuilds the whole term on every step nor
recurses on deep terms. One unit of fuel is spent per reduction step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .invert import invert_clause, invert_iso
from .syntax import terms as T
from .syntax.names import Name
from .syntax.subst import apply_subst, subst_iso
from .syntax.types import Arrow

DEFAULT_FUEL = 1_000_000

NO_CLAUSE = "no-clause-matched"
NOT_AN_ISO = "applied-non-iso-value"
MALFORMED = "malformed"

__all__ = [
    "DEFAULT_FUEL",
    "OutOfFuel",
    "Stuck",
    "Value",
    "apply_iso",
    "apply_subst",
    "evaluate",
    "invert_clause",
    "invert_iso",
    "iso_step",
    "match",
    "step",
]


@dataclass(frozen=True)
class Value:
    value: T.Term
    steps: int


@dataclass(frozen=True)
class Stuck:
    term: T.Term
    reason: str
    steps: int


@dataclass(frozen=True)
class OutOfFuel:
    term: T.Term
    steps: int


Outcome = Union[Value, Stuck, OutOfFuel]


def match(pattern: T.Term, v: T.Term) -> dict[Name, T.Term] | None:
    """The substitution sending ``pattern`` to the closed value ``v``, if any."""
    sigma: dict[Name, T.Term] = {}
    stack = [(pattern, v)]
    while stack:
        p, w = stack.pop()
        tp = type(p)
        if tp is T.Var:
            if p.name in sigma:  # supports of the two halves must be disjoint
                return None
            sigma[p.name] = w
        elif tp is not type(w):
            return None
        elif tp is T.Pair:
            stack.append((p.left, w.left))
            stack.append((p.right, w.right))
        elif tp is not T.Unit:
            stack.append((p.body, w.body))
    return sigma


# -- isos ------------------------------------------------------------------------


def iso_step(w: T.Iso) -> T.Iso | None:
    """One iso-level reduction, or ``None`` if ``w`` is already a clause set,
    a lambda, an empty iso or otherwise irreducible."""
    if isinstance(w, T.Fix):
        return subst_iso(w.body, w.var, w)  # type: ignore[return-value]
    if isinstance(w, T.NFix):
        if w.n == 0:
            return T.EmptyIso(w.ty, w.span)
        smaller = T.NFix(w.n - 1, w.var, w.body, w.ty, w.span)
        return subst_iso(w.body, w.var, smaller)  # type: ignore[return-value]
    if isinstance(w, T.IsoApp):
        fn = w.fn
        if isinstance(fn, T.Lam):
            return subst_iso(fn.body, fn.var, w.arg)  # type: ignore[return-value]
        if isinstance(fn, T.EmptyIso):
            ty = fn.ty.res if isinstance(fn.ty, Arrow) else None
            return T.EmptyIso(ty, w.span)
        f2 = iso_step(fn)
        if f2 is None:
            return None
        return T.IsoApp(f2, w.arg, w.span)
    return None


def _fire(w: T.Iso, v: T.Term) -> T.Term | None:
    if isinstance(w, T.Clauses):
        for c in w.clauses:
            sigma = match(c.lhs, v)
            if sigma is not None:
                return apply_subst(sigma, c.rhs)
    return None


# -- reference one-step relation ------------------------------------------------


def step(t: T.Term) -> T.Term | None:
    if t.is_value:
        return None
    if isinstance(t, (T.Inl, T.Inr, T.Fold)):
        s = step(t.body)
        return None if s is None else type(t)(s, t.span)
    if isinstance(t, T.Pair):
        if not t.left.is_value:
            s = step(t.left)
            return None if s is None else T.Pair(s, t.right, t.span)
        s = step(t.right)
        return None if s is None else T.Pair(t.left, s, t.span)
    if isinstance(t, T.App):
        w2 = iso_step(t.iso)
        if w2 is not None:
            return T.App(w2, t.arg, t.span)
        if not t.arg.is_value:
            s = step(t.arg)
            return None if s is None else T.App(t.iso, s, t.span)
        return _fire(t.iso, t.arg)
    if isinstance(t, T.Let):
        if not t.bound.is_value:
            s = step(t.bound)
            return None if s is None else T.Let(t.pat, s, t.body, t.span, t.ty)
        sigma = match(t.pat, t.bound)
        return None if sigma is None else apply_subst(sigma, t.body)
    return None


# -- the machine -----------------------------------------------------------------

# continuation frames: (tag, payload...)
_INL, _INR, _FOLD, _PAIR_L, _PAIR_R, _APP, _LET = range(7)
_CTOR_TAG = {T.Inl: _INL, T.Inr: _INR, T.Fold: _FOLD}
_TAG_CTOR = {_INL: T.Inl, _INR: T.Inr, _FOLD: T.Fold}


def _plug(t: T.Term, frames: list) -> T.Term:
    for fr in reversed(frames):
        tag = fr[0]
        if tag in _TAG_CTOR:
            t = _TAG_CTOR[tag](t)
        elif tag == _PAIR_L:
            t = T.Pair(t, fr[1])
        elif tag == _PAIR_R:
            t = T.Pair(fr[1], t)
        elif tag == _APP:
            t = T.App(fr[1], t)
        else:
            t = T.Let(fr[1], t, fr[2], None, fr[3])
    return t


def evaluate(t: T.Term, fuel: int = DEFAULT_FUEL) -> Outcome:
    """Reduce ``t`` until it is a value, gets stuck, or ``fuel`` steps are spent."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    frames: list = []
    push = frames.append
    steps = 0
    while True:
        if t.is_value:
            if not frames:
                return Value(t, steps)
            fr = frames.pop()
            tag = fr[0]
            if tag <= _FOLD:
                t = _TAG_CTOR[tag](t)
            elif tag == _PAIR_L:
                right = fr[1]
                if right.is_value:
                    t = T.Pair(t, right)
                else:
                    push((_PAIR_R, t))
                    t = right
            elif tag == _PAIR_R:
                t = T.Pair(fr[1], t)
            elif tag == _APP:
                nxt = _fire(fr[1], t)
                if nxt is None:
                    why = NO_CLAUSE if isinstance(fr[1], (T.Clauses, T.EmptyIso)) else NOT_AN_ISO
                    return Stuck(_plug(T.App(fr[1], t), frames), why, steps)
                if steps >= fuel:
                    return OutOfFuel(_plug(T.App(fr[1], t), frames), steps)
                steps += 1
                t = nxt
            else:
                sigma = match(fr[1], t)
                if sigma is None:
                    return Stuck(_plug(T.Let(fr[1], t, fr[2], None, fr[3]), frames), MALFORMED, steps)
                if steps >= fuel:
                    return OutOfFuel(_plug(T.Let(fr[1], t, fr[2], None, fr[3]), frames), steps)
                steps += 1
                t = apply_subst(sigma, fr[2])
            continue
        tt = type(t)
        if tt is T.App:
            w = t.iso
            while True:
                if isinstance(w, (T.Clauses, T.EmptyIso)):
                    break
                w2 = iso_step(w)
                if w2 is None:
                    break
                if steps >= fuel:
                    return OutOfFuel(_plug(T.App(w, t.arg), frames), steps)
                steps += 1
                w = w2
            push((_APP, w))
            t = t.arg
        elif tt is T.Let:
            push((_LET, t.pat, t.body, t.ty))
            t = t.bound
        elif tt is T.Pair:
            push((_PAIR_L, t.right))
            t = t.left
        elif tt in _CTOR_TAG:
            push((_CTOR_TAG[tt],))
            t = t.body  # type: ignore[attr-defined]
        else:
            return Stuck(_plug(t, frames), MALFORMED, steps)


def apply_iso(w: T.Iso, v: T.Term, fuel: int = DEFAULT_FUEL) -> Outcome:
    return evaluate(T.App(w, v), fuel)
