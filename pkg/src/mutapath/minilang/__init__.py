"""MiniLang: a small typed imperative language used as the mutation substrate."""

from .nodes import (
    Ast,
    AstError,
    Node,
    NodeKind,
    NodePath,
    canonical_hash,
    literal_kind,
    node_at,
    replace_at,
    validate,
)
from .parser import ParseError, parse, tokenize
from .printer import pretty_print

__all__ = [
    "Ast",
    "AstError",
    "Node",
    "NodeKind",
    "NodePath",
    "ParseError",
    "canonical_hash",
    "literal_kind",
    "node_at",
    "parse",
    "pretty_print",
    "replace_at",
    "tokenize",
    "validate",
]
