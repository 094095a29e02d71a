import random
import threading

import pytest
from hypothesis import given, settings

from oracles import DMU, DPROD, DSUM, FF, S, TT, L, N, cantor, decode_tags, encode
from strategies import random_value, typed_values
from reviso import stdlib
from reviso.eval import OutOfFuel, Stuck, Value, apply_iso
from reviso.pinj import ValueUniverse
from reviso.syntax import alpha_equiv, parse_iso, parse_type, parse_value
from reviso.syntax import terms as T
from reviso.syntax.types import UNIT, Ground, Prod, bool_type, list_of, nat, unit_sum
from reviso.typecheck import check_iso

TEST_TYPES = [UNIT, bool_type(), nat(), list_of(nat()), parse_type("Nat * Bool"), parse_type("[Bool] + 1")]


def run(g, v, fuel=10**6):
    out = apply_iso(g[0], v, fuel)
    assert isinstance(out, Value), out
    return out.value


def test_dup_unit_is_the_literal_clause():
    assert alpha_equiv(stdlib.dup(UNIT)[0], parse_iso("{ () <-> ((), ()) }"))


@pytest.mark.parametrize("ty", TEST_TYPES, ids=str)
def test_dup_copies_every_value(ty):
    g = stdlib.dup(ty)
    for v in ValueUniverse(ty, 4):
        assert run(g, v) == T.Pair(v, v)
        assert run(stdlib.inverse(g), T.Pair(v, v)) == v


def test_dup_inverse_rejects_distinct_components():
    out = apply_iso(stdlib.inverse(stdlib.dup(nat()))[0], parse_value("(1, 2)"))
    assert isinstance(out, Stuck)


def test_erase_const():
    g = stdlib.erase_const(T.TT, nat(), bool_type())
    assert run(g, parse_value("(3, tt)")) == N(3)
    assert run(stdlib.inverse(g), N(3)) == parse_value("(3, tt)")
    assert isinstance(apply_iso(g[0], parse_value("(3, ff)")), Stuck)


def test_list_helpers():
    assert run(stdlib.length(nat()), L()) == T.Pair(L(), N(0))
    assert run(stdlib.length(nat()), L(4, 4, 4)) == T.Pair(L(4, 4, 4), N(3))
    assert run(stdlib.snoc(nat()), parse_value("([1, 2], 3)")) == parse_value("([1, 2, 3], 3)")
    assert run(stdlib.snoc(nat()), parse_value("([], 5)")) == parse_value("([5], 5)")
    assert run(stdlib.rev(nat()), L(1, 2, 3)) == T.Pair(L(1, 2, 3), L(3, 2, 1))
    assert run(stdlib.reverse(nat()), L(1, 2, 3)) == L(3, 2, 1)
    assert run(stdlib.concat(nat()), parse_value("([1], [2])")) == parse_value("([1, 2], 1)")
    sc = stdlib.snoc_counted(nat())
    assert run(sc, parse_value("([7], (8, 1))")) == parse_value("([7, 8], (8, 1))")


@settings(max_examples=60)
@given(typed_values(depth=3))
def test_list_helpers_against_python(tv):
    ty, v = tv
    rnd = random.Random(str(v))
    xs = [v] + [x for x in (random_value(ty, 3, rnd) for _ in range(3)) if x is not None]
    lst = T.list_value(xs)
    assert run(stdlib.reverse(ty), lst) == T.list_value(xs[::-1])
    assert run(stdlib.snoc(ty), T.Pair(lst, v)) == T.Pair(T.list_value(xs + [v]), v)
    assert run(stdlib.concat(ty), T.Pair(lst, lst)) == T.Pair(T.list_value(xs + xs), N(len(xs)))
    assert run(stdlib.inverse(stdlib.concat(ty)), T.Pair(T.list_value(xs + xs), N(len(xs)))) == T.Pair(lst, lst)


def test_map_iso():
    not_ = (parse_iso("{ tt <-> ff | ff <-> tt }"), Ground(bool_type(), bool_type()))
    m = stdlib.map_iso(bool_type(), bool_type())
    assert run((T.IsoApp(m[0], not_[0]), None), parse_value("[tt, tt, ff]")) == parse_value("[ff, ff, tt]")


def test_iterator():
    count_down = parse_iso("{ fold inr n <-> (n, tt) | 0 <-> (0, ff) }")
    it = T.IsoApp(stdlib.iterator(nat())[0], count_down)
    assert apply_iso(it, N(5)).value == T.Pair(N(0), N(5))
    assert apply_iso(it, N(0)).value == T.Pair(N(0), N(0))
    stop = parse_iso("{ x <-> (x, ff) }")
    assert apply_iso(T.IsoApp(stdlib.iterator(nat())[0], stop), N(3)).value == T.Pair(N(3), N(0))
    forever = parse_iso("{ x <-> (x, tt) }")
    assert isinstance(apply_iso(T.IsoApp(stdlib.iterator(nat())[0], forever), N(3), 10**4), OutOfFuel)


def test_growth_and_rm_blank():
    sigma = unit_sum(3)
    b, a1, a2 = (T.injection(i, 3) for i in range(3))
    lst = lambda *xs: T.list_value(list(xs))
    g = stdlib.growth(sigma, b)
    assert run(g, T.Pair(lst(), lst())) == T.Pair(lst(b), lst(b))
    assert run(g, T.Pair(lst(a1), lst(a2))) == T.Pair(lst(a1, b), lst(a2, b))
    assert run(g, run(g, T.Pair(lst(), lst()))) == T.Pair(lst(b, b), lst(b, b))
    rm = stdlib.rm_blank(sigma, 0)
    assert run(rm, lst(b, b, a1)) == T.Pair(lst(a1), N(2))
    assert run(rm, lst(a1)) == T.Pair(lst(a1), N(0))


def test_clean_up_strips_far_blanks():
    b, a = T.injection(0, 2), T.injection(1, 2)
    lst = lambda *xs: T.list_value(list(xs))
    conf = T.tuple_value(T.injection(0, 1), lst(b, b), b, lst(a, a, b))
    out = run(stdlib.clean_up(1, 2, 0), T.Pair(conf, N(7)))
    final, garbage = out.left, out.right
    assert final == T.tuple_value(T.injection(0, 1), lst(), b, lst(a, a))
    assert T.nat_of(garbage.left) == 7
    # the garbage lets the inverse rebuild the padded configuration exactly
    assert run(stdlib.inverse(stdlib.clean_up(1, 2, 0)), out) == T.Pair(conf, N(7))


def test_garbage_removal_with_unit_garbage():
    w = (parse_iso("{ x <-> (x, ()) }"), Ground(nat(), Prod(nat(), UNIT)))
    g = stdlib.garbage_removal(w, w, nat(), nat())
    assert check_iso({}, g[0], g[1]) == Ground(nat(), nat())
    for n in range(5):
        assert run(g, N(n)) == N(n)


def test_garbage_removal_with_real_garbage():
    # rev leaves the original list behind; removing it yields plain reversal
    ln = list_of(nat())
    rev = stdlib.rev(nat())
    swapped = stdlib.template("{ x <-> let (a, b) = rev x in (b, a) }", Ground(ln, Prod(ln, ln)),
                              refs={"rev": rev})
    g = stdlib.garbage_removal(swapped, swapped, ln, ln)
    assert check_iso({}, g[0], g[1]) == Ground(ln, ln)
    for xs in [[], [1], [1, 2, 3], [5, 0, 5, 2]]:
        assert run(g, L(*xs)) == L(*xs[::-1])


def test_garbage_removal_mismatch_gets_stuck():
    w1 = (parse_iso("{ x <-> (x, ()) }"), Ground(nat(), Prod(nat(), UNIT)))
    w2 = (parse_iso("{ x <-> let y = ({ n <-> fold inr n } : Nat <-> Nat) x in (y, ()) }"), Ground(nat(), Prod(nat(), UNIT)))
    g = stdlib.garbage_removal(w1, w2, nat(), nat())
    assert isinstance(apply_iso(g[0], N(2)), Stuck)


def test_cantor():
    step = stdlib.cantor_step()
    assert run(step, parse_value("(0, 0)")) == T.Inr(T.UNIT_V)
    g = stdlib.cantor_pairing()
    assert run(g, parse_value("(0, 0)")) == N(0)
    for k in range(9):
        images = set()
        for x in range(k + 1):
            for y in range(k + 1 - x):
                n = T.nat_of(run(g, T.Pair(N(x), N(y))))
                assert n == cantor(x, y)
                images.add(n)
        assert images == set(range((k + 1) * (k + 2) // 2))


def test_encoder_examples():
    assert decode_tags(run(stdlib.encoder(UNIT), T.UNIT_V)) == [S]
    assert decode_tags(run(stdlib.encoder(unit_sum(2)), T.Inl(T.UNIT_V))) == [DSUM, FF, S]
    assert decode_tags(run(stdlib.encoder(nat()), N(1))) == [DMU, DSUM, TT, DMU, DSUM, FF, S]
    pair = decode_tags(run(stdlib.encoder(parse_type("1 * 1")), parse_value("((), ())")))
    assert pair == [DPROD, 1, S, S]


@pytest.mark.parametrize("ty", ["Nat", "Nat * Nat", "[Bool]", "Bool * Nat", "[Nat] + 1"])
def test_encoder_matches_oracle_and_round_trips(ty):
    a = parse_type(ty)
    enc = stdlib.encoder(a)
    dec = stdlib.inverse(enc)
    seen = {}
    for v in ValueUniverse(a, 4):
        code = run(enc, v)
        assert decode_tags(code) == encode(v, a)
        assert run(dec, code) == v
        key = repr(decode_tags(code))
        assert key not in seen
        seen[key] = v


def test_decoding_nat_to_depth_six():
    dec = stdlib.inverse(stdlib.encoder(nat()))
    for v in ValueUniverse(nat(), 6):
        assert run(dec, run(stdlib.encoder(nat()), v)) == v


def test_every_generated_iso_checks_at_its_type():
    for name, make in stdlib.generators().items():
        for ty in [nat(), parse_type("Bool * [Nat]")]:
            try:
                g = make(ty)
            except TypeError:
                g = make()
            assert check_iso({}, g[0], g[1]) == g[1], name


def test_memo_is_thread_safe():
    results = []

    def work():
        results.append(stdlib.encoder(parse_type("[Nat * Bool] + Nat")))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r is results[0] for r in results)
