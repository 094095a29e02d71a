"""Command-line front end.

Exit codes: 0 success, 1 static error (syntax, type, malformed machine),
2 stuck, 3 out of fuel or inconclusive, 4 internal inconsistency
(disagreement between evaluators or an incompatible join), 64 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path
from typing import Sequence

from . import stdlib
from .deep import run_deep
from .eval import DEFAULT_FUEL, OutOfFuel, Stuck, Value, evaluate
from .invert import invert_iso
from .pinj import IncompatibleJoin, NotInjective, Semantics, ValueUniverse, check_adequacy, finitize
from .rtm import (
    RTMError,
    RunError,
    decode_config,
    encode_config,
    parse_rtm,
    pipeline,
    program_text,
    rtm_run,
    start_config,
)
from .syntax import ParseError, parse_program, parse_type, parse_value, pretty_print, show_isotype, show_value
from .syntax import terms as T
from .syntax.printer import IsoDecl
from .syntax.types import Ground, Sum
from .typecheck import Checker, CheckedProgram, TypeCheckError, check_program

OK, STATIC, STUCK, FUEL, INCONSISTENT, USAGE = 0, 1, 2, 3, 4, 64

SEED_ENV = "REVISO_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _non_negative(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="reviso", description="Reversible iso language toolkit.")
    p.add_argument("--seed", type=int, help=f"random seed (default: ${SEED_ENV} or 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="parse and type-check a program")
    c.add_argument("file")

    r = sub.add_parser("run", help="apply an iso to a value")
    r.add_argument("file")
    r.add_argument("--iso", required=True)
    r.add_argument("--arg", required=True, help="input value, read at the iso's domain type")
    r.add_argument("--fuel", type=_non_negative, default=DEFAULT_FUEL)
    r.add_argument("--format", choices=("plain", "json"), default="plain")

    i = sub.add_parser("invert", help="print the inverse of an iso")
    i.add_argument("file")
    i.add_argument("--iso", required=True)

    s = sub.add_parser("stdlib", help="print a generated library iso")
    s.add_argument("name", choices=sorted(_library()))
    s.add_argument("--type", dest="type_", default=None, help="type parameter, e.g. 'Nat' or '[Bool]'")

    m = sub.add_parser("rtm", help="reversible Turing machines")
    msub = m.add_subparsers(dest="rtm_command", required=True, parser_class=_Parser)
    mc = msub.add_parser("check", help="validate a machine file")
    mc.add_argument("file")
    mr = msub.add_parser("run", help="run a machine on an input word")
    mr.add_argument("file")
    mr.add_argument("--input", default=None, help="input word (default: the file's input line)")
    mode = mr.add_mutually_exclusive_group()
    mode.add_argument("--oracle", dest="mode", action="store_const", const="oracle")
    mode.add_argument("--compiled", dest="mode", action="store_const", const="compiled")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    mr.add_argument("--max-steps", type=_non_negative, default=100_000)
    mr.add_argument("--fuel", type=_non_negative, default=10_000_000)
    mk = msub.add_parser("compile", help="write the compiled isos as a program")
    mk.add_argument("file")
    mk.add_argument("-o", "--output", required=True)

    d = sub.add_parser("sem", help="graph of an iso in the finite semantics")
    d.add_argument("file")
    d.add_argument("--iso", required=True)
    d.add_argument("--depth", type=_non_negative, required=True)
    d.add_argument("--unfold", type=_non_negative, required=True)
    d.add_argument("--dump-graph", default=None, metavar="OUT.tsv")
    d.add_argument("--format", choices=("plain", "json"), default="plain")

    a = sub.add_parser("adequacy", help="compare evaluation with the finite semantics")
    a.add_argument("file")
    a.add_argument("--fuel", type=_non_negative, required=True)
    a.add_argument("--depth", type=_non_negative, required=True)
    a.add_argument("--unfold", type=_non_negative, required=True)
    a.add_argument("--inputs", type=_non_negative, default=20, help="inputs per iso")
    a.add_argument("--sample", action="store_true", help="pick inputs at random instead of in order")
    a.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed for --sample")
    return p


def _library() -> dict:
    gens = dict(stdlib.generators())
    gens.pop("++", None)
    gens["growth"] = lambda a: stdlib.growth(a, T.injection(0, _summands(a)))
    gens["rmBlank"] = lambda a: stdlib.rm_blank(a, 0)
    return gens


def _summands(a) -> int:
    n = 1
    while isinstance(a, Sum):
        n += 1
        a = a.right
    return n


# -- helpers -------------------------------------------------------------------------


def _out(text: str = "") -> None:
    print(text)


def _err(text: str) -> None:
    print(text, file=sys.stderr)


def _load(path: str) -> tuple[str, CheckedProgram]:
    text = Path(path).read_text(encoding="utf-8")
    program = parse_program(text, path)
    return text, check_program(program)


def _checked(path: str) -> CheckedProgram:
    text, cp = _load(path)
    if not cp.ok:
        raise cp.errors[0]
    return cp


def _decl(cp: CheckedProgram, name: str) -> IsoDecl:
    try:
        return cp.program.iso(name)
    except KeyError:
        known = ", ".join(d.name.text for d in cp.program.isos) or "none"
        raise UsageError(f"no iso named {name!r} (declared: {known})") from None


def _report(fmt: str, result: str, steps: int) -> None:
    if fmt == "json":
        _out(json.dumps({"result": result, "steps": steps}))
    else:
        _out(result)


# -- subcommands ---------------------------------------------------------------------


def cmd_check(args) -> int:
    text, cp = _load(args.file)
    for e in cp.errors:
        _err(e.render(text, args.file))
    if not cp.ok:
        return STATIC
    _out(f"ok: {len(cp.elaborated)} isos")
    return OK


def cmd_run(args) -> int:
    cp = _checked(args.file)
    decl = _decl(cp, args.iso)
    if not isinstance(decl.type, Ground):
        raise UsageError(f"{args.iso} has arrow type {show_isotype(decl.type)}; apply it first")
    v = parse_value(args.arg, "<arg>")
    Checker().check_term({}, {}, v, decl.type.dom)
    outcome = run_deep(evaluate, T.App(cp.linked(args.iso), v), args.fuel)
    if isinstance(outcome, Value):
        _report(args.format, show_value(outcome.value, decl.type.cod), outcome.steps)
        return OK
    if isinstance(outcome, Stuck):
        _report(args.format, f"stuck: {outcome.reason}", outcome.steps)
        return STUCK
    assert isinstance(outcome, OutOfFuel)
    _report(args.format, "out of fuel", outcome.steps)
    return FUEL


def cmd_invert(args) -> int:
    cp = _checked(args.file)
    decl = _decl(cp, args.iso)
    inv = invert_iso(cp.linked(args.iso))
    _out(f"iso {args.iso}_inv : {show_isotype(decl.type.inverse())} =\n  {pretty_print(inv)};")
    return OK


def cmd_stdlib(args) -> int:
    gen = _library()[args.name]
    if args.name == "cantor":
        iso, ty = gen()
    else:
        if args.type_ is None:
            raise UsageError(f"{args.name} needs --type")
        iso, ty = gen(parse_type(args.type_, file="<type>"))
    name = {"snoc'": "snoc_counted"}.get(args.name, args.name)
    _out(f"iso {name} : {show_isotype(ty)} =\n  {pretty_print(iso)};")
    return OK


def _machine(path: str):
    return parse_rtm(Path(path).read_text(encoding="utf-8"))


def cmd_rtm(args) -> int:
    m = _machine(args.file)
    if args.rtm_command == "check":
        _out(f"ok: {len(m.states)} states, {len(m.symbols)} symbols, {len(m.rules)} rules")
        return OK
    if args.rtm_command == "compile":
        Path(args.output).write_text(program_text(m), encoding="utf-8")
        _out(f"wrote {args.output}")
        return OK
    word = m.word(args.input) if args.input is not None else m.input
    if word is None:
        raise UsageError("no --input given and the machine file has no input line")
    mode = args.mode or "oracle"
    status = OK
    oracle = None
    if mode in ("oracle", "both"):
        try:
            out, steps = rtm_run(m, word, args.max_steps)
            oracle = out
            _out(f"oracle: {m.text(out)} ({steps} steps)")
        except RunError as e:
            _out(f"oracle: {e.kind}: {e} ({e.steps} steps)")
            status = FUEL if e.kind == "diverged" else STUCK
    if mode in ("compiled", "both"):
        iso, _ = pipeline(m)
        outcome = run_deep(evaluate, T.App(iso, encode_config(m, start_config(m, word))), args.fuel)
        if isinstance(outcome, Value):
            c = decode_config(m, outcome.value)
            _out(f"compiled: {m.text(c.right)} ({outcome.steps} steps)")
            if mode == "both" and (oracle is None or oracle != c.right):
                _err("compiled result differs from the oracle")
                return INCONSISTENT
        elif isinstance(outcome, Stuck):
            _out(f"compiled: stuck: {outcome.reason} ({outcome.steps} steps)")
            if mode == "both" and oracle is not None:
                _err("compiled run is stuck but the oracle halted")
                return INCONSISTENT
            status = status or STUCK
        else:
            _out(f"compiled: out of fuel ({outcome.steps} steps)")
            status = status or FUEL
    return status


def _ground_decl(cp: CheckedProgram, name: str) -> tuple[IsoDecl, Ground]:
    decl = _decl(cp, name)
    if not isinstance(decl.type, Ground):
        raise UsageError(f"{name} has arrow type {show_isotype(decl.type)}")
    return decl, decl.type


def cmd_sem(args) -> int:
    cp = _checked(args.file)
    _, ty = _ground_decl(cp, args.iso)
    s = Semantics(args.depth)
    den = run_deep(s.iso, finitize(cp.linked(args.iso), args.unfold))
    g = s.graph(den, ty)
    dom, cod = ValueUniverse(ty.dom, args.depth), ValueUniverse(ty.cod, args.depth)
    if args.dump_graph:
        lines = [
            f"{show_value(dom.value_at(a), ty.dom)}\t{show_value(cod.value_at(b), ty.cod)}\n"
            for a, b in g.pairs()
        ]
        Path(args.dump_graph).write_text("".join(lines), encoding="utf-8")
    _report(args.format, f"defined on {len(g)} of {len(dom)} inputs", len(g))
    return OK


def cmd_adequacy(args) -> int:
    cp = _checked(args.file)
    rng = random.Random(_seed(args))
    counts = {"Agree": 0, "Inconclusive": 0, "Disagree": 0}
    for decl in cp.program.isos:
        if not isinstance(decl.type, Ground):
            continue
        w = cp.linked(decl.name.text)
        dom = ValueUniverse(decl.type.dom, args.depth)
        n = len(dom)
        picks = rng.sample(range(n), min(n, args.inputs)) if args.sample else range(min(n, args.inputs))
        for k in picks:
            v = dom.value_at(k)
            verdict = run_deep(check_adequacy, T.App(w, v), args.fuel, args.unfold, args.depth)
            counts[verdict.kind] += 1
            if verdict.kind == "Disagree":
                _err(f"{decl.name.text} {show_value(v, decl.type.dom)}: {verdict.detail}")
    _out(" ".join(f"{k}: {v}" for k, v in counts.items()))
    if counts["Disagree"]:
        return INCONSISTENT
    return FUEL if counts["Inconclusive"] else OK


def _render(e: ParseError | TypeCheckError, args) -> str:
    origin = e.span.file if e.span is not None else None
    if origin == "<arg>":
        return e.render(args.arg, origin)
    if origin == "<type>":
        return e.render(args.type_, origin)
    where = getattr(args, "file", None)
    text = Path(where).read_text(encoding="utf-8") if where and Path(where).is_file() else ""
    return e.render(text, where)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV, "0"))


COMMANDS = {
    "check": cmd_check,
    "run": cmd_run,
    "invert": cmd_invert,
    "stdlib": cmd_stdlib,
    "rtm": cmd_rtm,
    "sem": cmd_sem,
    "adequacy": cmd_adequacy,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.seed is not None:
        os.environ[SEED_ENV] = str(args.seed)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        _err(f"reviso: error: {e}")
        return USAGE
    except (ParseError, TypeCheckError) as e:
        _err(_render(e, args))
        return STATIC
    except RTMError as e:
        _err(f"{args.file}: {e}")
        return STATIC
    except (IncompatibleJoin, NotInjective) as e:
        _err(f"reviso: internal inconsistency: {e}")
        return INCONSISTENT
    except OSError as e:
        _err(f"reviso: {e}")
        return STATIC


if __name__ == "__main__":
    sys.exit(main())
