"""Identifiers carrying a globally unique stamp.

Every binder gets a fresh stamp when it is parsed or generated, so two
binders never share a ``Name`` even when their display text coincides.
Stamp 0 is reserved for free references to top-level declarations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

_counter = itertools.count(1)


@dataclass(frozen=True, slots=True)
class Name:
    text: str
    uid: int = 0

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"{self.text}#{self.uid}" if self.uid else self.text


def fresh(text: str) -> Name:
    # itertools.count.__next__ is atomic under the GIL
    return Name(text, next(_counter))


def refresh(name: Name) -> Name:
    return fresh(name.text)


@dataclass(frozen=True, slots=True)
class SourceSpan:
    start: int
    end: int
    file: str = "<input>"

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError("span start exceeds end")

    def line_col(self, text: str) -> tuple[int, int]:
        line = text.count("\n", 0, self.start) + 1
        col = self.start - (text.rfind("\n", 0, self.start) + 1) + 1
        return line, col
