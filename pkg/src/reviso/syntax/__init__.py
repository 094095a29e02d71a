from .alpha import alpha_equiv
from .names import Name, SourceSpan, fresh
from .parser import (
    ParseError,
    aliases_of,
    parse_iso,
    parse_isotype,
    parse_program,
    parse_term,
    parse_type,
    parse_value,
)
from .printer import IsoDecl, Program, TypeDecl, pretty_print, show_isotype, show_type, show_value
from .types import subst_type

__all__ = [
    "IsoDecl",
    "Name",
    "ParseError",
    "Program",
    "SourceSpan",
    "TypeDecl",
    "aliases_of",
    "alpha_equiv",
    "fresh",
    "parse_iso",
    "parse_isotype",
    "parse_program",
    "parse_term",
    "parse_type",
    "parse_value",
    "pretty_print",
    "show_isotype",
    "show_type",
    "show_value",
    "subst_type",
]
