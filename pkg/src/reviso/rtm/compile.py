"""Translation of reversible Turing machines into isos.

A configuration ``(q, (l, s, r))`` is encoded as a value of
``C = Q * [S] * S * [S]`` where ``Q`` and ``S`` are unit sums indexed by
state and symbol, and both tape halves are lists nearest-first. Each rule
becomes one clause; every clause also appends a blank to both tape halves
so that a move never runs off the end of the encoded tape.
"""

from __future__ import annotations

from .. import stdlib
from ..stdlib import Gen, garbage_removal, lit, template
from ..syntax import terms as T
from ..syntax.printer import pretty_print, show_isotype, show_type
from ..syntax.types import Ground, Prod, Type, list_of, nat, prod, unit_sum
from .machine import Configuration, RTMachine, Rule, rtm_inverse


def symbol_type(m: RTMachine) -> Type:
    return unit_sum(len(m.symbols))


def state_type(m: RTMachine) -> Type:
    return unit_sum(len(m.states))


def config_type(m: RTMachine) -> Type:
    return stdlib.config_type(len(m.states), len(m.symbols))


def _sym(m: RTMachine, i: int) -> T.Term:
    return T.injection(i, len(m.symbols))


def _state(m: RTMachine, i: int) -> T.Term:
    return T.injection(i, len(m.states))


def encode_config(m: RTMachine, c: Configuration) -> T.Term:
    return T.tuple_value(
        _state(m, c.state),
        T.list_value([_sym(m, s) for s in c.left]),
        _sym(m, c.symbol),
        T.list_value([_sym(m, s) for s in c.right]),
    )


def decode_config(m: RTMachine, v: T.Term) -> Configuration:
    try:
        q, rest = v.left, v.right  # type: ignore[attr-defined]
        left, rest = rest.left, rest.right
        sym, right = rest.left, rest.right
    except AttributeError:
        raise ValueError("not an encoded configuration") from None
    ns, nq = len(m.symbols), len(m.states)

    def syms(lst: T.Term) -> tuple[int, ...]:
        items = T.list_of_value(lst)
        if items is None:
            raise ValueError("tape half is not a list")
        return tuple(_index(x, ns) for x in items)

    return Configuration(_index(q, nq), syms(left), _index(sym, ns), syms(right))


def _index(v: T.Term, n: int) -> int:
    i = T.injection_index(v, n)
    if i is None:
        raise ValueError(f"not one of {n} constants: {pretty_print(v)}")
    return i


def encode_word(m: RTMachine, word) -> T.Term:
    return T.list_value([_sym(m, s) for s in word])


# -- one transition per clause ------------------------------------------------------


def _clause(m: RTMachine, r: Rule, flag: str | None) -> str:
    q, q1 = lit(_state(m, r.src)), lit(_state(m, r.dst))
    if r.action == "right":
        lhs = f"({q}, (x1, (y1, y2 :: x2)))"
        out = f"({q1}, (y1 :: l, (y2, r)))"
    elif r.action == "left":
        lhs = f"({q}, (y1 :: x1, (y2, x2)))"
        out = f"({q1}, (l, (y1, y2 :: r)))"
    elif r.action == "stay":
        lhs = f"({q}, (x1, (y, x2)))"
        out = f"({q1}, (l, (y, r)))"
    else:
        rd, wr = r.action  # type: ignore[misc]
        lhs = f"({q}, (x1, ({lit(_sym(m, rd))}, x2)))"
        out = f"({q1}, (l, ({lit(_sym(m, wr))}, r)))"
    if flag is not None:
        out = f"({out}, {'ff' if r.dst == m.final else 'tt'})"
    return f"{lhs} <-> let (l, r) = growth (x1, x2) in {out}"


def _transitions(m: RTMachine, flagged: bool) -> Gen:
    conf = config_type(m)
    cod = "C * Bool" if flagged else "C"
    body = " | ".join(_clause(m, r, "flag" if flagged else None) for r in m.rules)
    return template(
        "{ " + body + " }",
        f"C <-> {cod}",
        {"C": conf, "S": symbol_type(m)},
        {"growth": stdlib.growth(symbol_type(m), _sym(m, RTMachine.BLANK))},
    )


def compile_rtm(m: RTMachine) -> Gen:
    """``C <-> C``: one machine step per application."""
    return _transitions(m, False)


def compile_rtm_flagged(m: RTMachine) -> Gen:
    """``C <-> C * Bool``: one step, answering ``ff`` exactly when the step
    enters the final state."""
    return _transitions(m, True)


def pad(m: RTMachine) -> Gen:
    return template(
        "{ (q, (l, (s, r))) <-> let (l1, r1) = growth (l, r) in (q, (l1, (s, r1))) }",
        "C <-> C",
        {"C": config_type(m)},
        {"growth": stdlib.growth(symbol_type(m), _sym(m, RTMachine.BLANK))},
    )


def garbage_type(m: RTMachine) -> Type:
    return prod(nat(), nat(), nat(), list_of(symbol_type(m)))


def run_with_garbage(m: RTMachine) -> Gen:
    """``C <-> C * G``: pad, iterate to the final state, strip far-end blanks.

    The garbage ``G`` holds the step count, the stripped blank counts and
    the pre-clean right tape half.
    """
    conf = config_type(m)
    step = compile_rtm_flagged(m)
    it = stdlib.iterator(conf)
    iterate: Gen = (T.IsoApp(it[0], step[0]), Ground(conf, Prod(conf, nat())))
    return template(
        """{ c <-> let c1 = pad c in
                  let (c2, n) = iterate c1 in
                  let (c3, g) = clean (c2, n) in
                  (c3, g) }""",
        Ground(conf, Prod(conf, garbage_type(m))),
        refs={
            "pad": pad(m),
            "iterate": iterate,
            "clean": stdlib.clean_up(len(m.states), len(m.symbols), RTMachine.BLANK),
        },
    )


def pipeline(m: RTMachine) -> Gen:
    """``C <-> C`` sending the encoded standard start configuration to the
    encoded standard final configuration, with no garbage."""
    conf = config_type(m)
    return garbage_removal(run_with_garbage(m), run_with_garbage(rtm_inverse(m)), conf, conf)


# -- functions on encoded values ----------------------------------------------------

TAG_NAMES = {
    "tt": stdlib.ENC_TT,
    "ff": stdlib.ENC_FF,
    "S": stdlib.ENC_S,
    "Dsum": stdlib.ENC_SUM,
    "Dprod": stdlib.ENC_PROD,
    "Dmu": stdlib.ENC_MU,
}


def tag_symbols(m: RTMachine) -> Gen:
    """``Enc <-> S`` for the tags the machine has symbols for."""
    clauses = [
        f"{lit(TAG_NAMES[name])} <-> {lit(_sym(m, i))}"
        for i, name in enumerate(m.symbols)
        if i != RTMachine.BLANK and name in TAG_NAMES
    ]
    if not clauses:
        raise ValueError("machine has no symbols named after encoding tags")
    return template(
        "{ " + " | ".join(clauses) + " }",
        "E <-> S",
        {"E": stdlib.enc_type(), "S": symbol_type(m)},
    )


def _to_config(m: RTMachine, state: int) -> Gen:
    e_list = list_of(stdlib.enc_type())
    tags = stdlib.map_iso(stdlib.enc_type(), symbol_type(m))
    mapped: Gen = (T.IsoApp(tags[0], tag_symbols(m)[0]), Ground(e_list, list_of(symbol_type(m))))
    q, b = lit(_state(m, state)), lit(_sym(m, RTMachine.BLANK))
    return template(
        f"{{ y <-> let t = tags y in ({q}, ([], ({b}, t))) }}",
        Ground(e_list, config_type(m)),
        refs={"tags": mapped},
    )


def computable_function(m: RTMachine, a: Type, b: Type) -> Gen:
    """``a <-> b`` computed by ``m`` on encoded values.

    The input is encoded as a tag list, written on the tape of a standard
    start configuration, run through the garbage-free pipeline, read back
    from the standard final configuration and decoded at ``b``.
    """
    return template(
        """{ x <-> let y = enc x in
                  let c = to_conf y in
                  let c1 = run c in
                  let y1 = from_conf c1 in
                  let z = dec y1 in
                  z }""",
        Ground(a, b),
        refs={
            "enc": stdlib.encoder(a),
            "to_conf": _to_config(m, m.initial),
            "run": pipeline(m),
            "from_conf": stdlib.inverse(_to_config(m, m.final)),
            "dec": stdlib.inverse(stdlib.encoder(b)),
        },
    )


def program_text(m: RTMachine, name: str = "pipeline") -> str:
    """A standalone program declaring the configuration types and the compiled isos."""
    conf = config_type(m)
    step = compile_rtm(m)
    full = pipeline(m)
    header = [
        "-- configurations: state * left half * scanned symbol * right half",
        "-- states: " + " ".join(f"{i}={s}" for i, s in enumerate(m.states)),
        "-- symbols: " + " ".join(f"{i}={s}" for i, s in enumerate(m.symbols)),
        f"type Config = {show_type(conf)};",
        "",
        f"iso step : {show_isotype(step[1])} =",
        "  " + pretty_print(step[0]) + ";",
        "",
        f"iso {name} : {show_isotype(full[1])} =",
        "  " + pretty_print(full[0]) + ";",
    ]
    return "\n".join(header) + "\n"
