"""Generated library isos.

Each generator is a meta-level function of one or more closed types. Most
are written as surface-syntax templates: the template is parsed with the
type parameters bound as aliases, checked against its iso type with the
helper isos it mentions in the iso context, and then the helpers are
inlined. Duplication and the list encoder recurse over the structure of a
type and are assembled as trees directly. Every result is a closed,
fully annotated iso; results are memoized per type.
"""

from __future__ import annotations

import threading
from typing import Callable, Mapping

from .invert import invert_iso
from .syntax import terms as T
from .syntax.names import Name, fresh
from .syntax.parser import parse_iso, parse_isotype
from .syntax.printer import pretty_print
from .syntax.subst import subst_iso
from .syntax.types import (
    UNIT,
    Ground,
    IsoType,
    Mu,
    Prod,
    Sum,
    Type,
    Unit,
    bool_type,
    list_of,
    nat,
    prod,
    unit_sum,
)
from .typecheck import Checker

Gen = tuple[T.Iso, IsoType]

_lock = threading.RLock()
_memo: dict[tuple, Gen] = {}


def _memoized(key: tuple, build: Callable[[], Gen]) -> Gen:
    with _lock:
        hit = _memo.get(key)
        if hit is None:
            hit = build()
            _memo[key] = hit
        return hit


def _tkey(t: Type) -> tuple:
    return t.key()


def template(
    src: str,
    ty: str | IsoType,
    types: Mapping[str, Type] | None = None,
    refs: Mapping[str, Gen] | None = None,
) -> Gen:
    """Check ``src`` against ``ty`` and inline the helper isos it names."""
    aliases = {"Nat": nat(), "Bool": bool_type()}
    aliases.update(types or {})
    refs = refs or {}
    w = parse_iso(src, aliases)
    ity = parse_isotype(ty, aliases) if isinstance(ty, str) else ty
    psi = {Name(k): g[1] for k, g in refs.items()}
    out, _ = Checker().check_iso(psi, w, ity)
    for k, (ref, rty) in refs.items():
        if hasattr(ref, "ty") and ref.ty is None:  # hand-written helper: annotate it
            ref, _ = Checker().check_iso({}, ref, rty)
        out = subst_iso(out, Name(k), ref)  # type: ignore[assignment]
    return out, ity


def inverse(g: Gen) -> Gen:
    return invert_iso(g[0]), g[1].inverse()


def lit(v: T.Term) -> str:
    """Source text of a closed value, for splicing into templates."""
    return pretty_print(v)


# -- duplication and constants --------------------------------------------------


def dup(a: Type) -> Gen:
    """``a <-> a * a``, copying any closed value."""
    return _memoized(("dup", _tkey(a)), lambda: (_dup(a, {}), Ground(a, Prod(a, a))))


def _v(n: Name) -> T.Var:
    return T.Var(n)


def _dup_case(pat_fn, body_ty: Type, whole: Type, env: dict) -> T.Clause:
    """One clause ``C[x] <-> let (x1, x2) = dup x in (C[x1], C[x2])``."""
    x, x1, x2 = fresh("x"), fresh("x1"), fresh("x2")
    inner = _dup(body_ty, env)
    rhs = T.Let(
        T.Pair(_v(x1), _v(x2)),
        T.App(inner, _v(x)),
        T.Pair(pat_fn(_v(x1)), pat_fn(_v(x2))),
        ty=Prod(body_ty, body_ty),
    )
    return T.Clause(pat_fn(_v(x)), rhs)


def _dup(a: Type, env: dict) -> T.Iso:
    ty = Ground(a, Prod(a, a))
    if isinstance(a, Unit):
        u = T.UNIT_V
        return T.Clauses([T.Clause(u, T.Pair(u, u))], ty)
    if isinstance(a, Prod):
        x, y = fresh("x"), fresh("y")
        x1, x2, y1, y2 = fresh("x1"), fresh("x2"), fresh("y1"), fresh("y2")
        rhs = T.Let(
            T.Pair(_v(x1), _v(x2)),
            T.App(_dup(a.left, env), _v(x)),
            T.Let(
                T.Pair(_v(y1), _v(y2)),
                T.App(_dup(a.right, env), _v(y)),
                T.Pair(T.Pair(_v(x1), _v(y1)), T.Pair(_v(x2), _v(y2))),
                ty=Prod(a.right, a.right),
            ),
            ty=Prod(a.left, a.left),
        )
        return T.Clauses([T.Clause(T.Pair(_v(x), _v(y)), rhs)], ty)
    if isinstance(a, Sum):
        return T.Clauses(
            [_dup_case(T.Inl, a.left, a, env), _dup_case(T.Inr, a.right, a, env)], ty
        )
    if isinstance(a, Mu):
        k = a.key()
        if k in env:
            phi = env[k]
            x, x1, x2 = fresh("x"), fresh("x1"), fresh("x2")
            rhs = T.Let(T.Pair(_v(x1), _v(x2)), T.App(T.IsoVar(phi), _v(x)), T.Pair(_v(x1), _v(x2)), ty=Prod(a, a))
            return T.Clauses([T.Clause(_v(x), rhs)], ty)
        phi = fresh("dup")
        inner_env = dict(env)
        inner_env[k] = phi
        body = T.Clauses([_dup_case(T.Fold, a.unfold(), a, inner_env)], ty)
        return T.Fix(phi, body, ty)
    raise ValueError(f"cannot duplicate values of non-closed type {a!r}")


def erase_const(v: T.Term, a: Type, s: Type) -> Gen:
    """``a * s <-> a``: drops the second component when it equals ``v``."""

    def build() -> Gen:
        x = fresh("x")
        ty = Ground(Prod(a, s), a)
        w = T.Clauses([T.Clause(T.Pair(_v(x), v), _v(x))], ty)
        out, _ = Checker().check_iso({}, w, ty)
        return out, ty

    return _memoized(("erase", hash(v), v, _tkey(a), _tkey(s)), build)


# -- lists -------------------------------------------------------------------------


def length(a: Type) -> Gen:
    """``len : [a] <-> [a] * Nat``."""
    return _memoized(
        ("len", _tkey(a)),
        lambda: template(
            """fix len. { [] <-> ([], 0)
                        | h :: t <-> let (t1, n) = len t in (h :: t1, fold inr n) }""",
            "[A] <-> [A] * Nat",
            {"A": a},
        ),
    )


def snoc_counted(a: Type) -> Gen:
    """``snoc' : [a] * a * Nat <-> [a] * a * Nat``, appending at the end
    while the counter tracks the remaining length."""
    return _memoized(
        ("snoc'", _tkey(a)),
        lambda: template(
            """fix s. { ([], (x, 0)) <-> let (x1, x2) = dup x in ([x1], (x2, 0))
                      | (h :: t, (x, fold inr n)) <->
                          let (t1, (x1, n1)) = s (t, (x, n)) in (h :: t1, (x1, fold inr n1)) }""",
            "[A] * A * Nat <-> [A] * A * Nat",
            {"A": a},
            {"dup": dup(a)},
        ),
    )


def snoc(a: Type) -> Gen:
    """``snoc : [a] * a <-> [a] * a``; ``([v1..vn], v)`` goes to ``([v1..vn, v], v)``."""
    return _memoized(
        ("snoc", _tkey(a)),
        lambda: template(
            """{ (x, y) <-> let (x1, n) = len x in
                           let (x2, (y1, n1)) = snoc1 (x1, (y, n)) in
                           let n2 = ({ k <-> fold inr k } : Nat <-> Nat) n1 in
                           let z = len_inv (x2, n2) in
                           (z, y1) }""",
            "[A] * A <-> [A] * A",
            {"A": a},
            {"len": length(a), "len_inv": inverse(length(a)), "snoc1": snoc_counted(a)},
        ),
    )


def concat(a: Type) -> Gen:
    """``++ : [a] * [a] <-> [a] * Nat``, returning the length of the first list."""
    return _memoized(
        ("++", _tkey(a)),
        lambda: template(
            """fix f. { ([], x) <-> (x, 0)
                      | (h :: t, x) <-> let (y, n) = f (t, x) in (h :: y, fold inr n) }""",
            "[A] * [A] <-> [A] * Nat",
            {"A": a},
        ),
    )


def cons_iso(a: Type) -> Gen:
    return _memoized(
        ("cons", _tkey(a)),
        lambda: template("{ (h, t) <-> h :: t }", "A * [A] <-> [A]", {"A": a}),
    )


def rev_aux(a: Type) -> Gen:
    """``[a] * [a] <-> [a] * [a]``: keeps the first list and pushes its
    elements, in order, onto the second."""
    return _memoized(
        ("rev_aux", _tkey(a)),
        lambda: template(
            """fix r. { ([], y) <-> ([], y)
                      | (h :: t, y) <-> let (h1, h2) = dup h in
                                        let y1 = cons (h2, y) in
                                        let (t1, t2) = r (t, y1) in
                                        (h1 :: t1, t2) }""",
            "[A] * [A] <-> [A] * [A]",
            {"A": a},
            {"dup": dup(a), "cons": cons_iso(a)},
        ),
    )


def rev(a: Type) -> Gen:
    """``[a] <-> [a] * [a]``; ``l`` goes to ``(l, reverse of l)``."""
    la = list_of(a)
    return _memoized(
        ("rev", _tkey(a)),
        lambda: template(
            """{ x <-> let (x1, e) = nil_intro x in let (t1, t2) = aux (x1, e) in (t1, t2) }""",
            "[A] <-> [A] * [A]",
            {"A": a},
            {"nil_intro": inverse(erase_const(T.list_value([]), la, la)), "aux": rev_aux(a)},
        ),
    )


def reverse(a: Type) -> Gen:
    """``[a] <-> [a]`` without garbage, by running ``rev`` forwards and
    backwards around a copy."""

    def build() -> Gen:
        swapped = template(
            "{ x <-> let (y, z) = rev x in (z, y) }",
            "[A] <-> [A] * [A]",
            {"A": a},
            {"rev": rev(a)},
        )
        return garbage_removal(swapped, swapped, list_of(a), list_of(a))

    return _memoized(("reverse", _tkey(a)), build)


def map_iso(a: Type, b: Type) -> Gen:
    """``map : (a <-> b) -> ([a] <-> [b])``."""
    return _memoized(
        ("map", _tkey(a), _tkey(b)),
        lambda: template(
            """\\psi. fix phi. { [] <-> []
                              | h :: t <-> let h1 = psi h in let t1 = phi t in h1 :: t1 }""",
            "(A <-> B) -> ([A] <-> [B])",
            {"A": a, "B": b},
        ),
    )


# -- iteration and garbage removal ---------------------------------------------------


def iterator(a: Type) -> Gen:
    """``It : (a <-> a * Bool) -> (a <-> a * Nat)``.

    Applies its argument until it answers ``ff`` and counts the ``tt``
    answers.
    """
    return _memoized(
        ("It", _tkey(a)),
        lambda: template(
            """\\psi. fix phi. { x <-> let y = psi x in
                                     let z = ({ (y, tt) <-> let (z, n) = phi y in (z, fold inr n)
                                              | (y, ff) <-> (y, 0)
                                              } : A * Bool <-> A * Nat) y in
                                     z }""",
            "(A <-> A * Bool) -> (A <-> A * Nat)",
            {"A": a},
        ),
    )


def garbage_removal(w: Gen, w2: Gen, a: Type, b: Type) -> Gen:
    """``a <-> b`` from ``w : a <-> b * c`` and ``w2 : b <-> a * c'``.

    Runs ``w``, copies the result, runs ``w`` backwards to recover the
    input, then uses ``w2`` to turn the copy back into a second copy of the
    input that cancels against the first.
    """
    t1, t2 = w[1], w2[1]
    if not (isinstance(t1, Ground) and isinstance(t2, Ground)):
        raise TypeError("garbage removal needs ground isos")
    return template(
        """{ x1 <-> let (x2, y) = w x1 in
                   let (x3, z) = dup_b x2 in
                   let x4 = w_inv (x3, y) in
                   let (z2, y2) = w2 z in
                   let z3 = dup_a_inv (z2, x4) in
                   let z4 = w2_inv (z3, y2) in
                   z4 }""",
        Ground(a, b),
        refs={
            "w": w,
            "w_inv": inverse(w),
            "w2": w2,
            "w2_inv": inverse(w2),
            "dup_b": dup(b),
            "dup_a_inv": inverse(dup(a)),
        },
    )


# -- tapes ---------------------------------------------------------------------------


def growth(sigma: Type, blank: T.Term) -> Gen:
    """``[s] * [s] <-> [s] * [s]``, appending ``blank`` to both lists."""
    ls = list_of(sigma)
    er = erase_const(blank, ls, sigma)
    return _memoized(
        ("growth", _tkey(sigma), blank),
        lambda: template(
            """{ (l, r) <-> let (l0, b0) = blank_intro l in
                           let (l1, b1) = snoc (l0, b0) in
                           let (r0, c0) = blank_intro r in
                           let (r1, b2) = snoc (r0, c0) in
                           let l2 = erase (l1, b1) in
                           let r2 = erase (r1, b2) in
                           (l2, r2) }""",
            "[S] * [S] <-> [S] * [S]",
            {"S": sigma},
            {"snoc": snoc(sigma), "erase": er, "blank_intro": inverse(er)},
        ),
    )


def rm_blank(sigma: Type, blank: int) -> Gen:
    """``[s] <-> [s] * Nat``: strips leading blanks and counts them.

    ``sigma`` is a unit sum and ``blank`` the index of the blank symbol.
    """
    n = _summands(sigma)

    def build() -> Gen:
        clauses = ["[] <-> ([], 0)", f"{lit(T.injection(blank, n))} :: t <-> let (t1, k) = rb t in (t1, fold inr k)"]
        for i in range(n):
            if i != blank:
                s = lit(T.injection(i, n))
                clauses.append(f"{s} :: t <-> ({s} :: t, 0)")
        return template(
            "fix rb. { " + " | ".join(clauses) + " }",
            "[S] <-> [S] * Nat",
            {"S": sigma},
        )

    return _memoized(("rmBlank", _tkey(sigma), blank), build)


def _summands(t: Type) -> int:
    n = 1
    while isinstance(t, Sum):
        if not isinstance(t.left, Unit):
            raise ValueError("expected a sum of units")
        n += 1
        t = t.right
    if not isinstance(t, Unit):
        raise ValueError("expected a sum of units")
    return n


def config_type(states: int, symbols: int) -> Type:
    sig = unit_sum(symbols)
    return prod(unit_sum(states), list_of(sig), sig, list_of(sig))


def clean_up(states: int, symbols: int, blank: int) -> Gen:
    """``C * Nat <-> C * Nat * Nat * Nat * [S]`` on tape configurations.

    Strips surplus blanks from the far ends of both tape halves. The blank
    counts and a copy of the original right half are the garbage.
    """
    sig = unit_sum(symbols)
    conf = config_type(states, symbols)

    def build() -> Gen:
        return template(
            """{ ((q, (l, (y, r))), n) <->
                   let (l1, n1) = rb l in
                   let (r_ori, r_rev) = rev r in
                   let (r1, n2) = rb r_rev in
                   let r2 = reverse r1 in
                   ((q, (l1, (y, r2))), (n, (n1, (n2, r_ori)))) }""",
            "C * Nat <-> C * Nat * Nat * Nat * [S]",
            {"C": conf, "S": sig},
            {"rb": rm_blank(sig, blank), "rev": rev(sig), "reverse": reverse(sig)},
        )

    return _memoized(("cleanUp", states, symbols, blank), build)


# -- examples from the language description ----------------------------------------


def cantor_step() -> Gen:
    return _memoized(
        ("cantor_step",),
        lambda: template(
            """{ (fold inr i, j)          <-> inl (i, fold inr j)
               | (0, fold inr fold inr j) <-> inl (fold inr j, 0)
               | (0, 1)                   <-> inl (0, 0)
               | (0, 0)                   <-> inr () }""",
            "Nat * Nat <-> (Nat * Nat) + 1",
        ),
    )


def cantor_pairing() -> Gen:
    """``Nat * Nat <-> Nat``, numbering pairs diagonal by diagonal."""
    return _memoized(
        ("cantor",),
        lambda: template(
            """fix f. { x <-> let y = step x in
                             let z = ({ inl p <-> let m = f p in fold inr m
                                      | inr () <-> 0
                                      } : (Nat * Nat) + 1 <-> Nat) y in
                             z }""",
            "Nat * Nat <-> Nat",
            refs={"step": cantor_step()},
        ),
    )


# -- canonical encoding -----------------------------------------------------------------

ENC_SUMMANDS = 6


def enc_type() -> Type:
    """``Bool + 1 + 1 + 1 + 1 + Nat``."""
    return Sum(bool_type(), Sum(UNIT, Sum(UNIT, Sum(UNIT, Sum(UNIT, nat())))))


def _tag(depth: int, inner: T.Term) -> T.Term:
    v = inner
    for _ in range(depth):
        v = T.Inr(v)
    return v


ENC_TT = T.Inl(T.TT)
ENC_FF = T.Inl(T.FF)
ENC_S = _tag(1, T.Inl(T.UNIT_V))
ENC_SUM = _tag(2, T.Inl(T.UNIT_V))
ENC_PROD = _tag(3, T.Inl(T.UNIT_V))
ENC_MU = _tag(4, T.Inl(T.UNIT_V))


def enc_number(n: T.Term) -> T.Term:
    """The numeric tag carrying ``n``; the last summand of ``Enc``."""
    return _tag(ENC_SUMMANDS - 1, n)


def encoder(a: Type) -> Gen:
    """``a <-> [Enc]``, a flat self-delimiting encoding of closed values."""
    return _memoized(("enc", _tkey(a)), lambda: (_enc(a, {}), Ground(a, list_of(enc_type()))))


def _enc(a: Type, env: dict) -> T.Iso:
    e_list = list_of(enc_type())
    ty = Ground(a, e_list)
    if isinstance(a, Unit):
        return T.Clauses([T.Clause(T.UNIT_V, T.list_value([ENC_S]))], ty)
    if isinstance(a, Sum):
        clauses = []
        for inj, part, flag in ((T.Inl, a.left, ENC_FF), (T.Inr, a.right, ENC_TT)):
            x, y = fresh("x"), fresh("y")
            rhs = T.Let(
                _v(y), T.App(_enc(part, env), _v(x)), T.cons(ENC_SUM, T.cons(flag, _v(y))), ty=e_list
            )
            clauses.append(T.Clause(inj(_v(x)), rhs))
        return T.Clauses(clauses, ty)
    if isinstance(a, Prod):
        x, y, x1, y1, z, n = (fresh(s) for s in ("x", "y", "x1", "y1", "z", "n"))
        cat = concat(enc_type())[0]
        rhs = T.Let(
            _v(x1),
            T.App(_enc(a.left, env), _v(x)),
            T.Let(
                _v(y1),
                T.App(_enc(a.right, env), _v(y)),
                T.Let(
                    T.Pair(_v(z), _v(n)),
                    T.App(cat, T.Pair(_v(x1), _v(y1))),
                    T.cons(ENC_PROD, T.cons(enc_number(_v(n)), _v(z))),
                    ty=Prod(e_list, nat()),
                ),
                ty=e_list,
            ),
            ty=e_list,
        )
        return T.Clauses([T.Clause(T.Pair(_v(x), _v(y)), rhs)], ty)
    if isinstance(a, Mu):
        k = a.key()
        if k in env:
            x, y = fresh("x"), fresh("y")
            rhs = T.Let(_v(y), T.App(T.IsoVar(env[k]), _v(x)), _v(y), ty=e_list)
            return T.Clauses([T.Clause(_v(x), rhs)], ty)
        phi = fresh("enc")
        inner = dict(env)
        inner[k] = phi
        x, y = fresh("x"), fresh("y")
        rhs = T.Let(_v(y), T.App(_enc(a.unfold(), inner), _v(x)), T.cons(ENC_MU, _v(y)), ty=e_list)
        return T.Fix(phi, T.Clauses([T.Clause(T.Fold(_v(x)), rhs)], ty), ty)
    raise ValueError(f"cannot encode values of non-closed type {a!r}")


def _checked(g: Gen) -> Gen:
    out, _ = Checker().check_iso({}, g[0], g[1])
    return out, g[1]


# the structurally built generators are re-checked once so that a bug in
# their construction surfaces as a type error rather than at run time
_dup_raw, _enc_raw = dup, encoder


def dup(a: Type) -> Gen:  # type: ignore[no-redef]
    return _memoized(("dup/checked", _tkey(a)), lambda: _checked(_dup_raw(a)))


def encoder(a: Type) -> Gen:  # type: ignore[no-redef]
    return _memoized(("enc/checked", _tkey(a)), lambda: _checked(_enc_raw(a)))


# -- registry for the command line and the test-suite ------------------------------


def generators() -> dict[str, Callable[..., Gen]]:
    return {
        "dup": dup,
        "len": length,
        "snoc'": snoc_counted,
        "snoc": snoc,
        "++": concat,
        "concat": concat,
        "rev": rev,
        "rev_aux": rev_aux,
        "reverse": reverse,
        "map": lambda a: map_iso(a, a),
        "It": iterator,
        "enc": encoder,
        "cantor": lambda *_: cantor_pairing(),
    }
