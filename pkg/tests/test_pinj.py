import random
import sys

import pytest
from hypothesis import given, settings, strategies as st

from conftest import program_path
from oracles import N, cantor
from reviso import stdlib
from reviso.eval import evaluate, step
from reviso.pinj import (
    IncompatibleJoin,
    NotInjective,
    OutsideUniverse,
    PartialInjection,
    Semantics,
    ValueUniverse,
    check_adequacy,
    check_soundness_step,
    finitize,
    graph_of,
    join,
    sem_iso,
    sem_term,
)
from reviso.pinj.denote import AGREE, DISAGREE, INCONCLUSIVE
from reviso.rtm import computable_function, parse_rtm
from reviso.syntax import parse_iso, parse_program, parse_type, parse_value
from reviso.syntax import terms as T
from reviso.syntax.types import UNIT, bool_type, list_of, nat, unit_sum
from reviso.typecheck import Checker, check_program

# -- universes ---------------------------------------------------------------------


def brute_force(ty, d):
    """All values of ``ty`` up to fold depth ``d`` by naive recursion."""
    from reviso.syntax.types import Mu, Prod, Sum, Unit

    if isinstance(ty, Unit):
        return [T.UNIT_V]
    if isinstance(ty, Sum):
        return [T.Inl(v) for v in brute_force(ty.left, d)] + [T.Inr(v) for v in brute_force(ty.right, d)]
    if isinstance(ty, Prod):
        return [T.Pair(a, b) for a in brute_force(ty.left, d) for b in brute_force(ty.right, d)]
    if isinstance(ty, Mu):
        return [] if d == 0 else [T.Fold(v) for v in brute_force(ty.unfold(), d - 1)]
    raise TypeError(ty)


def test_universe_examples():
    assert ValueUniverse(UNIT, 5).values == [T.UNIT_V]
    assert ValueUniverse(nat(), 3).values == [N(0), N(1), N(2)]
    assert ValueUniverse(unit_sum(2), 0).values == [T.Inl(T.UNIT_V), T.Inr(T.UNIT_V)]
    assert len(ValueUniverse(nat(), 0)) == 0


@pytest.mark.parametrize("ty", ["Nat", "[Bool]", "Nat * [1]", "[Nat] + Bool", "[[Bool]]"])
@pytest.mark.parametrize("d", [0, 1, 2, 3, 4])
def test_universe_matches_brute_force(ty, d):
    a = parse_type(ty)
    u = ValueUniverse(a, d)
    expected = brute_force(a, d)
    assert len(u) == len(expected)
    assert set(map(repr, u)) == set(map(repr, expected))
    for i, v in enumerate(u):
        assert u.ordinal(v) == i and u.value_at(i) == v and v in u


def test_universe_rejects_foreign_values():
    u = ValueUniverse(nat(), 2)
    assert N(5) not in u
    assert u.ordinal_or_none(N(5)) is None
    with pytest.raises(OutsideUniverse):
        u.ordinal(N(5))


def test_large_universes_are_lazy():
    u = ValueUniverse(list_of(nat()), 30)
    # lists at depth d: the empty list, or a natural below depth d - 1 consed on a shorter list
    expected = 0
    for d in range(1, 31):
        expected = 1 + (d - 1) * expected
    assert u.size == expected > sys.maxsize
    v = u.value_at(u.size - 1)
    assert u.ordinal(v) == u.size - 1


# -- the algebra -------------------------------------------------------------------


def random_injection(rnd, n, m, density=0.5):
    dom = [i for i in range(n) if rnd.random() < density]
    cod = rnd.sample(range(m), min(len(dom), m))
    return PartialInjection(n, m, list(zip(dom, cod)))


def test_construction_rejects_non_injective_graphs():
    with pytest.raises(NotInjective):
        PartialInjection(3, 3, [(0, 1), (1, 1)])
    with pytest.raises(NotInjective):
        PartialInjection(3, 3, [(0, 1), (0, 2)])
    with pytest.raises(ValueError):
        PartialInjection(3, 3, [(0, 3)])


def test_zero_and_identity():
    z = PartialInjection.zero(4, 5)
    assert z.is_zero() and z.inverse().is_zero()
    i = PartialInjection.identity(4)
    f = PartialInjection(4, 4, [(0, 2), (2, 0)])
    assert f.then(i) == f == i.then(f)


def test_join_rejects_incompatible_family():
    f = PartialInjection(3, 3, [(0, 0)])
    g = PartialInjection(3, 3, [(1, 0)])
    assert not f.compatible(g)
    with pytest.raises(IncompatibleJoin):
        join([f, g], 3, 3)


@settings(max_examples=300)
@given(st.integers(0, 2**32 - 1))
def test_restriction_and_inverse_laws(seed):
    rnd = random.Random(seed)
    n = rnd.randint(0, 12)
    f = random_injection(rnd, n, n)
    g = random_injection(rnd, n, n)
    fr, gr = f.restriction(), g.restriction()
    assert fr.then(f) == f
    assert gr.then(fr) == fr.then(gr)
    assert f.inverse().inverse() == f
    assert f.then(f.inverse()) == fr
    assert f.restriction().restriction() == fr
    h = random_injection(rnd, n, n)
    assert f.then(g).then(h) == f.then(g.then(h))
    assert f.then(g).inverse() == g.inverse().then(f.inverse())


@settings(max_examples=300)
@given(st.integers(0, 2**32 - 1))
def test_join_of_compatible_maps(seed):
    rnd = random.Random(seed)
    n = rnd.randint(1, 12)
    f = random_injection(rnd, n, n)
    # split a map into pieces: always compatible, and the join restores it
    parts: list[list] = [[], [], []]
    for a, b in f.pairs():
        parts[rnd.randrange(3)].append((a, b))
    pieces = [PartialInjection(n, n, p) for p in parts]
    j = join(pieces, n, n)
    assert j == f
    for p in pieces:
        assert p <= j
    g = random_injection(rnd, n, n)
    if f.compatible(g):
        u = join([f, g], n, n)
        assert len(set(u.fwd.values())) == len(u.fwd)


# -- denotations -----------------------------------------------------------------


@pytest.fixture(scope="module")
def cantor_prog():
    return check_program(parse_program(program_path("cantor.rev").read_text()))


@pytest.fixture(scope="module")
def map_prog():
    return check_program(parse_program(program_path("map.rev").read_text()))


def elaborate(src, ty):
    from reviso.syntax import parse_isotype

    ity = parse_isotype(ty)
    return Checker().check_iso({}, parse_iso(src), ity)[0], ity


def test_finitize():
    w = parse_iso("fix f. f")
    n = finitize(w, 0)
    assert isinstance(n, T.NFix) and n.n == 0
    plain = parse_iso("{ x <-> x }")
    assert finitize(plain, 5) is plain


def test_unit_identity_and_empty():
    w, ty = elaborate("{ () <-> () }", "1 <-> 1")
    assert graph_of(w, ty, 3, 0).pairs() == [(0, 0)]
    w, ty = elaborate("{}", "Nat <-> Nat")
    assert graph_of(w, ty, 3, 0).is_zero()


def test_cantor_denotations(cantor_prog):
    d = sem_iso({}, cantor_prog.linked("diagonal_step"), 6)
    assert d(parse_value("(0, 0)")) == T.Inr(T.UNIT_V)
    t = T.App(finitize(cantor_prog.linked("CantorPairing"), 20), parse_value("(1, 1)"))
    assert sem_term(t, 12) == N(4)
    assert sem_term(T.UNIT_V, 3) == T.UNIT_V


def test_stuck_application_is_undefined():
    w, _ = elaborate("{ inl x <-> x }", "1 + 1 <-> 1")
    assert sem_term(T.App(w, T.Inr(T.UNIT_V)), 3) is None


GROUND_ISOS = [
    lambda: stdlib.dup(nat()),
    lambda: stdlib.snoc(bool_type()),
    lambda: stdlib.length(nat()),
    lambda: stdlib.reverse(bool_type()),
    lambda: stdlib.concat(UNIT),
    lambda: stdlib.encoder(bool_type()),
    lambda: stdlib.encoder(nat()),
    lambda: stdlib.cantor_pairing(),
    lambda: stdlib.rm_blank(unit_sum(3), 0),
]


@pytest.mark.parametrize("make", GROUND_ISOS)
def test_inverse_graph_is_transpose(make):
    w, ty = make()
    inv = stdlib.inverse((w, ty))
    for d, n in [(3, 8), (5, 16)]:
        g = graph_of(w, ty, d, n)
        h = graph_of(inv[0], inv[1], d, n)
        assert h == g.inverse()


@pytest.mark.parametrize("make", GROUND_ISOS)
def test_graph_agrees_with_evaluation(make):
    w, ty = make()
    g = graph_of(w, ty, 4, 16)
    dom, cod = ValueUniverse(ty.dom, 4), ValueUniverse(ty.cod, 4)
    for i, v in enumerate(dom):
        out = evaluate(T.App(w, v), 10**5)
        j = g(i)
        if j is not None:
            assert out.value == cod.value_at(j)


def test_monotone_in_unfolding(map_prog, cantor_prog):
    cases = [
        (cantor_prog.linked("CantorPairing"), cantor_prog.types["CantorPairing"]),
        (map_prog.linked("incr_all"), map_prog.types["incr_all"]),
    ]
    for w, ty in cases:
        prev = None
        for n in range(10):
            g = graph_of(w, ty, 5, n)
            if prev is not None:
                assert prev <= g
            prev = g
        assert len(prev) > 0


def test_higher_order_denotation(map_prog):
    w = finitize(map_prog.linked("map"), 8)
    succ, _ = elaborate("{ n <-> fold inr n }", "Nat <-> Nat")
    s = Semantics(6)
    applied = sem_iso({}, w, 6, s).apply(sem_iso({}, succ, 6, s))
    assert applied(parse_value("[0, 1]")) == parse_value("[1, 2]")
    assert T.value_depth(parse_value("[1, 2]")) > 4
    shallow = Semantics(4)
    applied = sem_iso({}, w, 4, shallow).apply(sem_iso({}, succ, 4, shallow))
    assert applied(parse_value("[0, 1]")) is None and shallow.overflowed


def test_overflow_makes_points_undefined():
    succ, ty = elaborate("{ n <-> fold inr n }", "Nat <-> Nat")
    s = Semantics(3)
    g = s.graph(sem_iso({}, succ, 3, s), ty)
    assert g.pairs() == [(0, 1), (1, 2)]
    assert s.overflowed


# -- cross-checks ----------------------------------------------------------------


def test_adequacy_examples():
    w, _ = stdlib.dup(nat())
    v = check_adequacy(T.App(w, N(2)), 10**5, 16, 6)
    assert v.kind == AGREE and v.denotational == T.Pair(N(2), N(2))
    stuck, _ = elaborate("{ inl x <-> x }", "1 + 1 <-> 1")
    assert check_adequacy(T.App(stuck, T.Inr(T.UNIT_V))).kind == AGREE
    loop, _ = elaborate("fix f. f", "1 <-> 1")
    assert check_adequacy(T.App(loop, T.UNIT_V), 100, 4, 3).kind == INCONCLUSIVE


def test_adequacy_on_cantor(cantor_prog):
    w = cantor_prog.linked("CantorPairing")
    for x in range(3):
        for y in range(3):
            v = check_adequacy(T.App(w, T.Pair(N(x), N(y))), 10**5, 16, 14)
            assert v.kind == AGREE and v.denotational == N(cantor(x, y))
    # 12 needs thirteen folds: with depth 8 the denotation budget binds
    assert check_adequacy(T.App(w, parse_value("(2, 2)")), 10**5, 16, 8).kind == INCONCLUSIVE
    # too few unfoldings bind as well
    assert check_adequacy(T.App(w, parse_value("(2, 2)")), 10**5, 3, 14).kind == INCONCLUSIVE


def test_soundness_of_each_step(cantor_prog, map_prog):
    terms = [
        T.App(cantor_prog.linked("CantorPairing"), parse_value("(1, 1)")),
        T.App(map_prog.linked("incr_all"), parse_value("[0, 2]")),
        T.App(stdlib.snoc(nat())[0], parse_value("([1], 0)")),
    ]
    for t in terms:
        for _ in range(40):
            t2 = step(t)
            if t2 is None:
                break
            assert check_soundness_step(t, t2, 16, 8)
            t = t2


def test_computable_function_denotes_successor():
    m = parse_rtm(program_path("rtm/enc_succ.rtm").read_text())
    w, ty = computable_function(m, nat(), nat())
    # tapes grow well beyond the values they encode, so intermediate values
    # are allowed to be much deeper than the compared universes
    s = Semantics(4, overflow=200)
    den = sem_iso({}, finitize(w, 64), 4, s)
    g = s.graph(den, ty)
    assert g.pairs() == [(0, 1), (1, 2), (2, 3)]


def test_verdict_truthiness():
    from reviso.pinj import Verdict

    assert not Verdict(DISAGREE)
    assert Verdict(INCONCLUSIVE) and Verdict(AGREE)
