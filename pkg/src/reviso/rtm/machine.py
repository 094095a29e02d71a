"""Reversible Turing machines: text format, validation and a direct simulator.

Tapes are zippers. ``left`` and ``right`` hold symbol indices ordered
nearest-first, so the cell next to the head is element 0 on either side.
Reading past either end of the finite tape materializes a blank.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

MOVES = ("left", "right", "stay")


class RTMError(Exception):
    """Malformed machine text or a machine that is not reversible."""

    def __init__(self, message: str, line: int | None = None) -> None:
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class RunError(Exception):
    """A run that did not end in a standard final configuration."""

    def __init__(self, kind: str, message: str, steps: int, config: "Configuration") -> None:
        super().__init__(message)
        self.kind = kind  # "stuck", "nonstandard" or "diverged"
        self.steps = steps
        self.config = config


@dataclass(frozen=True)
class Rule:
    """``src --action--> dst``; ``action`` is a move name or a (read, write) pair."""

    src: int
    action: str | tuple[int, int]
    dst: int
    line: int | None = field(default=None, compare=False)

    @property
    def is_move(self) -> bool:
        return isinstance(self.action, str)


@dataclass(frozen=True)
class Configuration:
    state: int
    left: tuple[int, ...]
    symbol: int
    right: tuple[int, ...]


@dataclass(frozen=True)
class RTMachine:
    symbols: tuple[str, ...]  # symbols[0] is the blank
    states: tuple[str, ...]
    rules: tuple[Rule, ...]
    initial: int
    final: int
    input: tuple[int, ...] | None = None

    BLANK = 0

    def symbol_index(self, name: str) -> int:
        try:
            return self.symbols.index(name)
        except ValueError:
            raise RTMError(f"unknown symbol {name!r}") from None

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise RTMError(f"unknown state {name!r}") from None

    def show_rule(self, r: Rule) -> str:
        if isinstance(r.action, str):
            act = r.action
        else:
            act = f"{self.symbols[r.action[0]]}/{self.symbols[r.action[1]]}"
        return f"rule {self.states[r.src]} {act} {self.states[r.dst]}"

    def word(self, s: str | Sequence[str]) -> tuple[int, ...]:
        """Symbol indices of an input given as a string or a list of names.

        A string containing whitespace is split into names; otherwise each
        character is one symbol.
        """
        if isinstance(s, str):
            parts = s.split() if any(c.isspace() for c in s) else list(s)
        else:
            parts = list(s)
        return tuple(self.symbol_index(p) for p in parts)

    def text(self, word: Iterable[int]) -> str:
        names = [self.symbols[i] for i in word]
        if all(len(n) == 1 for n in self.symbols):
            return "".join(names)
        return " ".join(names)

    def render(self) -> str:
        lines = [
            "symbols: " + " ".join(self.symbols),
            "states: " + " ".join(self._ordered_states()),
        ]
        lines += [self.show_rule(r) for r in self.rules]
        if self.input is not None:
            lines.append("input: " + " ".join(self.symbols[i] for i in self.input))
        return "\n".join(lines) + "\n"

    def _ordered_states(self) -> list[str]:
        rest = [s for i, s in enumerate(self.states) if i not in (self.initial, self.final)]
        if self.initial == self.final:
            return [self.states[self.initial], *rest]
        return [self.states[self.initial], *rest, self.states[self.final]]


# -- parsing and validation --------------------------------------------------------

_NAME = r"[^\s/#]+"
_RULE = re.compile(rf"rule\s+({_NAME})\s+(?:(left|right|stay)|({_NAME})/({_NAME}))\s+({_NAME})$")


def parse_rtm(text: str) -> RTMachine:
    symbols: list[str] | None = None
    states: list[str] | None = None
    raw_rules: list[tuple[int, str, str | tuple[str, str], str]] = []
    raw_input: list[str] | None = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("symbols:"):
            symbols = line[len("symbols:"):].split()
            if not symbols:
                raise RTMError("at least the blank symbol is required", no)
        elif line.startswith("states:"):
            states = line[len("states:"):].split()
            if not states:
                raise RTMError("at least one state is required", no)
        elif line.startswith("input:"):
            raw_input = line[len("input:"):].split()
        elif line.startswith("rule"):
            m = _RULE.match(line)
            if not m:
                raise RTMError(f"malformed rule {line!r}", no)
            src, move, rd, wr, dst = m.groups()
            raw_rules.append((no, src, move if move else (rd, wr), dst))
        else:
            raise RTMError(f"unrecognised line {line!r}", no)
    if symbols is None:
        raise RTMError("missing 'symbols:' line")
    if states is None:
        raise RTMError("missing 'states:' line")
    for what, seq in (("symbol", symbols), ("state", states)):
        dup = {x for x in seq if seq.count(x) > 1}
        if dup:
            raise RTMError(f"duplicate {what} {sorted(dup)[0]!r}")

    def st(name: str, no: int) -> int:
        if name not in states:
            raise RTMError(f"unknown state {name!r}", no)
        return states.index(name)

    def sy(name: str, no: int) -> int:
        if name not in symbols:
            raise RTMError(f"unknown symbol {name!r}", no)
        return symbols.index(name)

    rules = []
    for no, src, act, dst in raw_rules:
        action: str | tuple[int, int] = act if isinstance(act, str) else (sy(act[0], no), sy(act[1], no))
        rules.append(Rule(st(src, no), action, st(dst, no), no))
    inp = None
    if raw_input is not None:
        inp = tuple(sy(s, 0) for s in raw_input)
    m = RTMachine(tuple(symbols), tuple(states), tuple(rules), 0, len(states) - 1, inp)
    validate(m)
    return m


def _clash(a: Rule, b: Rule, backward: bool) -> bool:
    if a.is_move or b.is_move:
        return True
    ia = a.action[1] if backward else a.action[0]  # type: ignore[index]
    ib = b.action[1] if backward else b.action[0]  # type: ignore[index]
    return ia == ib


def validate(m: RTMachine) -> None:
    """Raise ``RTMError`` unless ``m`` is forward and backward deterministic
    and has no rule leaving the final state or entering the initial one."""
    rs = m.rules
    for i, a in enumerate(rs):
        if a.src == m.final:
            raise RTMError(f"{m.show_rule(a)} leaves the final state", a.line)
        if a.dst == m.initial:
            raise RTMError(f"{m.show_rule(a)} enters the initial state", a.line)
        for b in rs[i + 1:]:
            if a == b:
                raise RTMError(f"duplicate rule {m.show_rule(a)}", b.line)
            if a.src == b.src and _clash(a, b, False):
                raise RTMError(
                    f"not forward deterministic: {m.show_rule(a)} and {m.show_rule(b)}", b.line
                )
            if a.dst == b.dst and _clash(a, b, True):
                raise RTMError(
                    f"not backward deterministic: {m.show_rule(a)} and {m.show_rule(b)}", b.line
                )


# -- semantics ---------------------------------------------------------------------


def applicable(m: RTMachine, c: Configuration) -> Rule | None:
    for r in m.rules:
        if r.src == c.state and (r.is_move or r.action[0] == c.symbol):  # type: ignore[index]
            return r
    return None


def apply_rule(r: Rule, c: Configuration) -> Configuration:
    b = RTMachine.BLANK
    if r.action == "stay":
        return Configuration(r.dst, c.left, c.symbol, c.right)
    if r.action == "right":
        head, rest = (c.right[0], c.right[1:]) if c.right else (b, ())
        return Configuration(r.dst, (c.symbol, *c.left), head, rest)
    if r.action == "left":
        head, rest = (c.left[0], c.left[1:]) if c.left else (b, ())
        return Configuration(r.dst, rest, head, (c.symbol, *c.right))
    return Configuration(r.dst, c.left, r.action[1], c.right)  # type: ignore[index]


def rtm_step(m: RTMachine, c: Configuration) -> Configuration | None:
    """The successor configuration, or ``None`` when no rule applies."""
    r = applicable(m, c)
    return None if r is None else apply_rule(r, c)


def start_config(m: RTMachine, word: Sequence[int]) -> Configuration:
    if RTMachine.BLANK in word:
        raise ValueError("input must be blank-free")
    return Configuration(m.initial, (), RTMachine.BLANK, tuple(word))


def strip_blanks(word: Sequence[int]) -> tuple[int, ...]:
    """Drop blanks at the far end of a nearest-first tape half."""
    w = list(word)
    while w and w[-1] == RTMachine.BLANK:
        w.pop()
    return tuple(w)


def is_standard(c: Configuration) -> bool:
    """``(q, (eps, b, s))`` with ``s`` blank-free, up to far-end blanks."""
    return (
        not strip_blanks(c.left)
        and c.symbol == RTMachine.BLANK
        and RTMachine.BLANK not in strip_blanks(c.right)
    )


def normalize(c: Configuration) -> Configuration:
    return Configuration(c.state, strip_blanks(c.left), c.symbol, strip_blanks(c.right))


def rtm_run(m: RTMachine, word: Sequence[int], max_steps: int = 100_000) -> tuple[tuple[int, ...], int]:
    """Run from the standard start configuration; returns ``(output, steps)``."""
    c = start_config(m, word)
    steps = 0
    while True:
        if c.state == m.final:
            if not is_standard(c):
                raise RunError("nonstandard", "halted in a non-standard configuration", steps, c)
            return strip_blanks(c.right), steps
        r = applicable(m, c)
        if r is None:
            raise RunError("stuck", f"no rule applies in state {m.states[c.state]}", steps, c)
        if steps >= max_steps:
            raise RunError("diverged", f"no halt within {max_steps} steps", steps, c)
        c = apply_rule(r, c)
        steps += 1


def trace(m: RTMachine, word: Sequence[int], max_steps: int = 100_000) -> list[Configuration]:
    """All configurations visited from the start, in order."""
    c: Configuration | None = start_config(m, word)
    out = []
    while c is not None and len(out) <= max_steps:
        out.append(c)
        c = rtm_step(m, c)
    return out


_INVERSE_MOVE = {"left": "right", "right": "left", "stay": "stay"}


def rtm_inverse(m: RTMachine) -> RTMachine:
    """The machine running ``m`` backwards: rules flipped, initial and final swapped."""
    rules = []
    for r in m.rules:
        if isinstance(r.action, str):
            act: str | tuple[int, int] = _INVERSE_MOVE[r.action]
        else:
            act = (r.action[1], r.action[0])
        rules.append(Rule(r.dst, act, r.src, r.line))
    inv = RTMachine(m.symbols, m.states, tuple(rules), m.final, m.initial)
    validate(inv)
    return inv
