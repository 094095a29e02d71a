"""Finite denotational semantics in partial injections."""

from .denote import (
    ArrowDenotation,
    GroundDenotation,
    Semantics,
    Verdict,
    check_adequacy,
    check_soundness_step,
    finitize,
    graph_of,
    sem_iso,
    sem_term,
)
from .injection import IncompatibleJoin, NotInjective, PartialInjection, join
from .universe import OutsideUniverse, ValueUniverse, enumerate_values

__all__ = [
    "ArrowDenotation",
    "GroundDenotation",
    "IncompatibleJoin",
    "NotInjective",
    "OutsideUniverse",
    "PartialInjection",
    "Semantics",
    "ValueUniverse",
    "Verdict",
    "check_adequacy",
    "check_soundness_step",
    "enumerate_values",
    "finitize",
    "graph_of",
    "join",
    "sem_iso",
    "sem_term",
]
