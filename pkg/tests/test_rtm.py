import itertools

import pytest

from conftest import program_path
from reviso import stdlib
from reviso.deep import run_deep
from reviso.eval import OutOfFuel, Stuck, Value, apply_iso
from reviso.rtm import (
    Configuration,
    RTMError,
    RunError,
    compile_rtm,
    compile_rtm_flagged,
    computable_function,
    decode_config,
    encode_config,
    parse_rtm,
    pipeline,
    rtm_inverse,
    rtm_run,
    rtm_step,
    run_with_garbage,
)
from reviso.rtm.compile import pad
from reviso.rtm.machine import normalize, start_config, trace
from reviso.syntax import terms as T
from reviso.syntax.types import nat
from reviso.typecheck import orthogonal

FIXTURES = ["identity", "increment", "copy", "enc_succ"]

# walks right forever writing a; still forward and backward deterministic
WALKER = "symbols: b a\nstates: qs l m qf\nrule qs b/b l\nrule l right m\nrule m b/a l\n"


def machine(name):
    return parse_rtm(program_path(f"rtm/{name}.rtm").read_text())


def padded(c: Configuration) -> Configuration:
    return Configuration(c.state, c.left + (0,), c.symbol, c.right + (0,))


def same_modulo_blanks(a: Configuration, b: Configuration) -> bool:
    return normalize(a) == normalize(b)


def run_iso(w, v, fuel=10**7):
    return run_deep(apply_iso, w, v, fuel)


# -- text format and validation ---------------------------------------------------


def test_forward_determinism_error_names_rules():
    text = "symbols: b a c\nstates: q0 q1 q2 qf\nrule q0 a/b q1\nrule q0 a/c q2\n"
    with pytest.raises(RTMError) as e:
        parse_rtm(text)
    assert "forward" in str(e.value) and "q0 a/b q1" in str(e.value) and e.value.line == 4


def test_backward_determinism_error():
    text = "symbols: b a\nstates: q0 q1 qf\nrule q0 a/b qf\nrule q1 b/b qf\n"
    with pytest.raises(RTMError, match="backward"):
        parse_rtm(text)


def test_moves_clash_with_everything():
    text = "symbols: b a\nstates: q0 q1 q2\nrule q0 right q1\nrule q0 a/a q2\n"
    with pytest.raises(RTMError, match="forward"):
        parse_rtm(text)


@pytest.mark.parametrize(
    "text, msg",
    [
        ("states: q\n", "symbols"),
        ("symbols: b\n", "states"),
        ("symbols: b\nstates: q r\nrule q b/z r\n", "unknown symbol"),
        ("symbols: b\nstates: q r\nrule q b/b s\n", "unknown state"),
        ("symbols: b\nstates: q r\nrule q up r\n", "malformed"),
        ("symbols: b\nstates: q r\nrule r b/b q\n", "final state"),
        ("symbols: b b\nstates: q r\n", "duplicate"),
        ("symbols: b\nstates: q r\nwhat\n", "unrecognised"),
    ],
)
def test_format_errors(text, msg):
    with pytest.raises(RTMError, match=msg):
        parse_rtm(text)


def test_empty_rule_set_is_valid():
    m = parse_rtm("symbols: b a\nstates: qs qf\n")
    assert m.rules == ()
    with pytest.raises(RunError) as e:
        rtm_run(m, ())
    assert e.value.kind == "stuck"


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_round_trip_through_text(name):
    m = machine(name)
    assert parse_rtm(m.render()) == m


# -- the direct simulator ----------------------------------------------------------


def test_identity_run():
    m = machine("identity")
    assert rtm_run(m, m.word("aa")) == (m.word("aa"), 1)


def test_increment_run():
    m = machine("increment")
    for n in range(8):
        out, steps = rtm_run(m, m.word("a" * n))
        assert out == m.word("a" * (n + 1))
        assert steps == 4 * n + 6  # two steps out and two back per a, six fixed


def test_copy_run():
    m = machine("copy")
    for n, steps in [(0, 9), (1, 29), (2, 57), (3, 93)]:
        assert rtm_run(m, m.word("a" * n)) == (m.word("a" * n + "c" + "a" * n), steps)


def test_step_rules():
    m = machine("increment")
    c = Configuration(m.state_index("scan"), (), m.symbol_index("a"), ())
    assert rtm_step(m, c) == Configuration(m.state_index("mark"), (), m.symbol_index("c"), ())
    # moving left off the tape materializes a blank
    c = Configuration(m.state_index("back"), (), 0, (1,))
    assert rtm_step(m, c) == Configuration(m.state_index("unmark"), (), 0, (0, 1))
    assert rtm_step(m, Configuration(m.final, (), 0, ())) is None


def test_non_standard_halt_and_divergence():
    m = parse_rtm("symbols: b a\nstates: qs q qf\nrule qs b/b q\nrule q right qf\n")
    with pytest.raises(RunError) as e:
        rtm_run(m, m.word("a"))
    assert e.value.kind == "nonstandard"
    loop = parse_rtm(WALKER)
    with pytest.raises(RunError) as e:
        rtm_run(loop, (), max_steps=50)
    assert e.value.kind == "diverged" and e.value.steps == 50


def test_inverse_machine():
    for name in FIXTURES:
        m = machine(name)
        inv = rtm_inverse(m)
        assert rtm_inverse(inv).rules == m.rules
        assert (inv.initial, inv.final) == (m.final, m.initial)
        for n in range(4):
            word = m.word("a" * n) if name in ("increment", "copy", "identity") else m.word("Dmu Dsum ff S")
            out, steps = rtm_run(m, word)
            assert rtm_run(inv, out) == (word, steps)
    ident = machine("identity")
    (r,) = rtm_inverse(ident).rules
    # same machine once the two states swap names
    assert (r.src, r.action, r.dst) == (ident.final, ident.rules[0].action, ident.initial)


def test_string_semantics_is_injective():
    for name in ["increment", "copy"]:
        m = machine(name)
        outputs = {}
        for n in range(3):
            for word in itertools.product("ac", repeat=n):
                try:
                    out, _ = rtm_run(m, m.word("".join(word)), 2000)
                except RunError:
                    continue
                assert out not in outputs
                outputs[out] = word


# -- encoding and compilation ------------------------------------------------------


def test_encoding_of_standard_configuration():
    m = machine("increment")
    v = encode_config(m, start_config(m, m.word("aa")))
    a = T.injection(1, 3)
    assert v == T.tuple_value(T.injection(0, 7), T.list_value([]), T.injection(0, 3), T.list_value([a, a]))
    c = Configuration(2, (1, 2), 0, (1,))
    assert decode_config(m, encode_config(m, c)) == c


def test_distinct_states_encode_orthogonally():
    m = machine("copy")
    for i in range(len(m.states)):
        for j in range(i + 1, len(m.states)):
            assert orthogonal(T.injection(i, len(m.states)), T.injection(j, len(m.states)))


def test_compiled_clause_shapes():
    m = machine("increment")
    w, _ = compile_rtm(m)
    assert len(w.clauses) == len(m.rules)
    for c in w.clauses:
        assert isinstance(c.rhs, T.Let)


@pytest.mark.parametrize("name", ["identity", "increment", "copy"])
def test_single_step_simulation(name):
    m = machine(name)
    step = compile_rtm(m)[0]
    for n in range(3):
        for c in trace(m, m.word("a" * n), 30)[:-1]:
            expected = rtm_step(m, c)
            given = padded(c)
            out = apply_iso(step, encode_config(m, given))
            got = decode_config(m, out.value)
            assert same_modulo_blanks(got, expected)
            # the growth appends exactly one blank to each side
            assert len(got.left) + len(got.right) == len(given.left) + len(given.right) + 2


def test_flag_marks_entry_into_final_state():
    m = machine("identity")
    out = apply_iso(compile_rtm_flagged(m)[0], encode_config(m, padded(start_config(m, m.word("a")))))
    assert out.value.right == T.FF
    inc = machine("increment")
    out = apply_iso(compile_rtm_flagged(inc)[0], encode_config(inc, padded(start_config(inc, ()))))
    assert out.value.right == T.TT


def test_iterator_counts_steps():
    m = machine("increment")
    conf_it = T.IsoApp(stdlib.iterator(compile_rtm(m)[1].dom)[0], compile_rtm_flagged(m)[0])
    step = compile_rtm(m)[0]
    for n in range(4):
        start = encode_config(m, start_config(m, m.word("a" * n)))
        start = apply_iso(pad(m)[0], start).value
        out = run_iso(conf_it, start)
        final, count = out.value.left, T.nat_of(out.value.right)
        _, steps = rtm_run(m, m.word("a" * n))
        assert count + 1 == steps
        v = start
        for _ in range(steps):
            v = apply_iso(step, v).value
        assert v == final


def test_run_with_garbage_keeps_the_history():
    m = machine("increment")
    w, ty = run_with_garbage(m)
    out = run_iso(w, encode_config(m, start_config(m, m.word("a"))))
    final, garbage = out.value.left, out.value.right
    assert decode_config(m, final) == Configuration(m.final, (), 0, m.word("aa"))
    assert T.nat_of(garbage.left) + 1 == rtm_run(m, m.word("a"))[1]


@pytest.mark.parametrize(
    "name, words",
    [
        ("identity", ["", "a", "ca", "acca"]),
        ("increment", ["", "a", "aa", "aaa"]),
        ("copy", ["", "a"]),
        ("enc_succ", ["Dmu Dsum ff S"]),
    ],
)
def test_pipeline_matches_oracle(name, words):
    m = machine(name)
    w, _ = pipeline(m)
    for s in words:
        word = m.word(s)
        expected, _ = rtm_run(m, word)
        out = run_iso(w, encode_config(m, start_config(m, word)))
        assert isinstance(out, Value)
        assert decode_config(m, out.value) == Configuration(m.final, (), 0, expected)


def test_pipeline_rejects_what_the_oracle_rejects():
    m = machine("increment")
    w, _ = pipeline(m)
    out = run_iso(w, encode_config(m, start_config(m, m.word("ac"))))
    with pytest.raises(RunError):
        rtm_run(m, m.word("ac"))
    assert isinstance(out, Stuck)


def test_diverging_machine_runs_out_of_fuel():
    loop = parse_rtm(WALKER)
    out = run_iso(pipeline(loop)[0], encode_config(loop, start_config(loop, ())), 20_000)
    assert isinstance(out, OutOfFuel)


def test_pipeline_inverse_runs_backwards():
    m = machine("increment")
    inv = stdlib.inverse(pipeline(m))[0]
    out = run_iso(inv, encode_config(m, Configuration(m.final, (), 0, m.word("aaa"))))
    assert decode_config(m, out.value) == start_config(m, m.word("aa"))


def test_computable_function_on_encoded_naturals():
    m = machine("enc_succ")
    w, _ = computable_function(m, nat(), nat())
    for n in range(4):
        assert run_iso(w, T.nat_value(n)).value == T.nat_value(n + 1)
