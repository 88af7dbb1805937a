"""Generic ordered labeled trees for MiniLang programs.

Every construct is a ``Node(kind, label, children)``. Nodes are immutable and
carry a 128-bit structural digest, so rewrites share untouched subtrees and
search states can be deduplicated by digest alone.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

NodePath = tuple[int, ...]


class NodeKind(str, Enum):
    PROGRAM = "Program"
    FUNCTION_DECL = "FunctionDecl"
    PARAM = "Param"
    TYPE_REF = "TypeRef"
    BLOCK = "Block"
    VAR_DECL = "VarDecl"
    ASSIGN = "Assign"
    IF = "If"
    WHILE = "While"
    RETURN = "Return"
    EXPR_STMT = "ExprStmt"
    BINARY_EXPR = "BinaryExpr"
    UNARY_EXPR = "UnaryExpr"
    INC_DEC_EXPR = "IncDecExpr"
    CALL = "Call"
    IDENTIFIER = "Identifier"
    LITERAL = "Literal"

    def __str__(self) -> str:
        return self.value


K = NodeKind

LABELED_KINDS = frozenset(
    {
        K.IDENTIFIER,
        K.LITERAL,
        K.BINARY_EXPR,
        K.UNARY_EXPR,
        K.INC_DEC_EXPR,
        K.CALL,
        K.FUNCTION_DECL,
        K.VAR_DECL,
        K.TYPE_REF,
    }
)

EXPRESSION_KINDS = frozenset(
    {K.BINARY_EXPR, K.UNARY_EXPR, K.INC_DEC_EXPR, K.CALL, K.IDENTIFIER, K.LITERAL}
)
STATEMENT_KINDS = frozenset(
    {K.VAR_DECL, K.ASSIGN, K.IF, K.WHILE, K.RETURN, K.EXPR_STMT, K.BLOCK}
)

TYPE_NAMES = ("int", "float", "bool", "string", "void", "ref")
BINARY_OPERATORS = (
    "||", "&&", "|", "^", "&", "==", "!=", "<", "<=", ">", ">=",
    "<<", ">>", "+", "-", "*", "/", "%",
)
UNARY_OPERATORS = ("-", "!")
INC_DEC_OPERATORS = ("++", "--")
KEYWORDS = frozenset(TYPE_NAMES + ("if", "else", "while", "return", "true", "false", "null"))

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
LITERAL_RE = re.compile(r'\d+\.\d+|\d+|true|false|null|"(?:[^"\\\n]|\\.)*"')


class AstError(ValueError):
    """A tree violates the MiniLang node-kind table."""


class Node:
    """Immutable tree node. Equality and hashing go through the digest."""

    __slots__ = ("kind", "label", "children", "digest", "size")

    kind: NodeKind
    label: str
    children: tuple[Node, ...]
    digest: bytes
    size: int

    def __init__(self, kind: NodeKind, label: str = "", children: Sequence[Node] = ()):
        kind = NodeKind(kind)
        children = tuple(children)
        h = hashlib.blake2b(digest_size=16)
        h.update(kind.value.encode())
        h.update(b"\x00")
        h.update(label.encode())
        h.update(b"\x00")
        size = 1
        for child in children:
            h.update(child.digest)
            size += child.size
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "digest", h.digest())
        object.__setattr__(self, "size", size)

    def __setattr__(self, name, value):
        raise AttributeError("Node is immutable")

    def __reduce__(self):
        return (Node, (self.kind, self.label, self.children))

    def __eq__(self, other) -> bool:
        return isinstance(other, Node) and self.digest == other.digest

    def __hash__(self) -> int:
        return hash(self.digest)

    def __repr__(self) -> str:
        head = f"{self.kind.value}({self.label!r})" if self.label else self.kind.value
        if not self.children:
            return head
        return f"{head}[{', '.join(map(repr, self.children))}]"

    def with_children(self, children: Sequence[Node]) -> Node:
        return Node(self.kind, self.label, children)

    def with_label(self, label: str) -> Node:
        return Node(self.kind, label, self.children)

    def preorder(self) -> Iterator[Node]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def walk(self, path: NodePath = ()) -> Iterator[tuple[NodePath, Node]]:
        """Yield ``(path, node)`` pairs in pre-order."""
        stack = [(path, self)]
        while stack:
            p, node = stack.pop()
            yield p, node
            for i in range(len(node.children) - 1, -1, -1):
                stack.append((p + (i,), node.children[i]))


@dataclass(frozen=True)
class Ast:
    """A whole MiniLang program. ``root`` is normally a Program node."""

    root: Node

    @property
    def digest(self) -> bytes:
        return self.root.digest

    @property
    def size(self) -> int:
        return self.root.size

    def __eq__(self, other) -> bool:
        return isinstance(other, Ast) and self.root.digest == other.root.digest

    def __hash__(self) -> int:
        return hash(self.root.digest)

    def node_at(self, path: NodePath) -> Node:
        return node_at(self.root, path)

    def walk(self) -> Iterator[tuple[NodePath, Node]]:
        return self.root.walk()


def canonical_hash(ast: Ast | Node) -> bytes:
    """128-bit structural digest over (kind, label, child digests)."""
    return ast.digest


def node_at(root: Node, path: NodePath) -> Node:
    node = root
    for i in path:
        if not 0 <= i < len(node.children):
            raise IndexError(f"no node at path {path}")
        node = node.children[i]
    return node


def replace_at(root: Node, path: NodePath, new: Node | None) -> Node:
    """Return a copy of ``root`` with the node at ``path`` replaced.

    ``new=None`` removes the node from its parent's child list. Only the
    spine from the root to ``path`` is rebuilt.
    """
    if not path:
        if new is None:
            raise IndexError("cannot delete the root")
        return new
    spine = [root]
    for i in path[:-1]:
        spine.append(spine[-1].children[i])
    parent = spine[-1]
    last = path[-1]
    if not 0 <= last < len(parent.children):
        raise IndexError(f"no node at path {path}")
    kids = list(parent.children)
    if new is None:
        del kids[last]
    else:
        kids[last] = new
    node = parent.with_children(kids)
    for depth in range(len(path) - 2, -1, -1):
        up = spine[depth]
        kids = list(up.children)
        kids[path[depth]] = node
        node = up.with_children(kids)
    return node


def literal_kind(lexeme: str) -> str:
    """Classify a literal lexeme as int, float, bool, string or null."""
    if lexeme in ("true", "false"):
        return "bool"
    if lexeme == "null":
        return "null"
    if lexeme.startswith('"'):
        return "string"
    if "." in lexeme:
        return "float"
    return "int"


def _check(cond: bool, node: Node, msg: str) -> None:
    if not cond:
        raise AstError(f"{node.kind.value}({node.label!r}): {msg}")


def _is_expr(node: Node) -> bool:
    return node.kind in EXPRESSION_KINDS


def _is_stmt(node: Node) -> bool:
    return node.kind in STATEMENT_KINDS


def _dangles(stmt: Node) -> bool:
    # True when a trailing else would attach to a nested If inside ``stmt``.
    while True:
        if stmt.kind is K.IF:
            if len(stmt.children) == 2:
                return True
            stmt = stmt.children[2]
        elif stmt.kind is K.WHILE:
            stmt = stmt.children[1]
        else:
            return False


def validate(ast: Ast | Node) -> None:
    """Raise AstError unless every node satisfies the kind/label/arity table.

    Besides arity, rejects shapes the parser can never produce (an If with an
    else whose then-branch ends in an else-less If), so printing round-trips.
    """
    root = ast.root if isinstance(ast, Ast) else ast
    _check(root.kind is K.PROGRAM, root, "root must be Program")
    for node in root.preorder():
        kind, label, kids = node.kind, node.label, node.children
        n = len(kids)
        _check(bool(label) == (kind in LABELED_KINDS), node, "label presence")
        if kind is K.PROGRAM:
            _check(all(c.kind is K.FUNCTION_DECL for c in kids), node, "functions only")
        elif kind is K.FUNCTION_DECL:
            _check(n >= 2 and kids[0].kind is K.TYPE_REF and kids[-1].kind is K.BLOCK,
                   node, "TypeRef, Param*, Block")
            _check(all(c.kind is K.PARAM for c in kids[1:-1]), node, "params")
        elif kind is K.PARAM:
            _check(n == 2 and kids[0].kind is K.TYPE_REF and kids[1].kind is K.IDENTIFIER,
                   node, "TypeRef, Identifier")
        elif kind is K.TYPE_REF:
            _check(n == 0 and label in TYPE_NAMES, node, "type name")
        elif kind is K.BLOCK:
            _check(all(map(_is_stmt, kids)), node, "statements only")
        elif kind is K.VAR_DECL:
            _check(n in (1, 2) and kids[0].kind is K.TYPE_REF, node, "TypeRef, init?")
            _check(n == 1 or _is_expr(kids[1]), node, "initializer")
        elif kind is K.ASSIGN:
            _check(n == 2 and kids[0].kind is K.IDENTIFIER and _is_expr(kids[1]),
                   node, "Identifier, expr")
        elif kind is K.IF:
            _check(n in (2, 3) and _is_expr(kids[0]) and all(map(_is_stmt, kids[1:])),
                   node, "cond, then, else?")
            _check(n == 2 or not _dangles(kids[1]), node, "ambiguous dangling else")
        elif kind is K.WHILE:
            _check(n == 2 and _is_expr(kids[0]) and _is_stmt(kids[1]), node, "cond, body")
        elif kind is K.RETURN:
            _check(n <= 1 and all(map(_is_expr, kids)), node, "expr?")
        elif kind is K.EXPR_STMT:
            _check(n == 1 and _is_expr(kids[0]), node, "expr")
        elif kind is K.BINARY_EXPR:
            _check(n == 2 and all(map(_is_expr, kids)) and label in BINARY_OPERATORS,
                   node, "two operands")
        elif kind is K.UNARY_EXPR:
            _check(n == 1 and _is_expr(kids[0]) and label in UNARY_OPERATORS,
                   node, "one operand")
        elif kind is K.INC_DEC_EXPR:
            _check(n == 1 and kids[0].kind is K.IDENTIFIER and label in INC_DEC_OPERATORS,
                   node, "identifier operand")
        elif kind is K.CALL:
            _check(all(map(_is_expr, kids)), node, "arguments")
        elif kind is K.LITERAL:
            _check(n == 0 and LITERAL_RE.fullmatch(label) is not None, node, "literal leaf")
        elif kind is K.IDENTIFIER:
            _check(n == 0, node, "leaf")
        if kind in (K.IDENTIFIER, K.CALL, K.FUNCTION_DECL, K.VAR_DECL):
            _check(IDENT_RE.fullmatch(label) is not None and label not in KEYWORDS,
                   node, "identifier name")
