"""Canonical MiniLang pretty-printer (two-space indent, minimal parentheses)."""

from __future__ import annotations

from .nodes import Ast, Node, NodeKind as K

_BINARY_PRECEDENCE = {
    "||": 0,
    "&&": 1,
    "|": 2,
    "^": 3,
    "&": 4,
    "==": 5, "!=": 5,
    "<": 6, "<=": 6, ">": 6, ">=": 6,
    "<<": 7, ">>": 7,
    "+": 8, "-": 8,
    "*": 9, "/": 9, "%": 9,
}
_UNARY = 10
_POSTFIX = 11
_PRIMARY = 12
_INDENT = "  "


def expression(node: Node, context: int = 0) -> str:
    """Render an expression; parenthesize when it binds looser than ``context``."""
    kind = node.kind
    if kind is K.BINARY_EXPR:
        prec = _BINARY_PRECEDENCE[node.label]
        left, right = node.children
        text = f"{expression(left, prec)} {node.label} {expression(right, prec + 1)}"
    elif kind is K.UNARY_EXPR:
        prec = _UNARY
        (operand,) = node.children
        inner = expression(operand, _UNARY)
        if operand.kind is K.UNARY_EXPR:
            inner = f"({inner})"
        text = node.label + inner
    elif kind is K.INC_DEC_EXPR:
        prec = _POSTFIX
        text = expression(node.children[0], _PRIMARY) + node.label
    elif kind is K.CALL:
        prec = _PRIMARY
        text = f"{node.label}({', '.join(expression(a) for a in node.children)})"
    elif kind in (K.IDENTIFIER, K.LITERAL):
        prec = _PRIMARY
        text = node.label
    else:
        raise ValueError(f"not an expression: {node.kind.value}")
    return f"({text})" if prec < context else text


def _block_lines(block: Node, depth: int) -> list[str]:
    lines = []
    for stmt in block.children:
        lines.extend(statement_lines(stmt, depth))
    return lines


def _with_body(header: str, body: Node, depth: int) -> list[str]:
    if body.kind is K.BLOCK:
        return [header + " {", *_block_lines(body, depth + 1), _INDENT * depth + "}"]
    return [header, *statement_lines(body, depth + 1)]


def statement_lines(node: Node, depth: int = 0) -> list[str]:
    pad = _INDENT * depth
    kind = node.kind
    if kind is K.BLOCK:
        return [pad + "{", *_block_lines(node, depth + 1), pad + "}"]
    if kind is K.VAR_DECL:
        head = f"{pad}{node.children[0].label} {node.label}"
        if len(node.children) == 2:
            return [f"{head} = {expression(node.children[1])};"]
        return [head + ";"]
    if kind is K.ASSIGN:
        target, value = node.children
        return [f"{pad}{target.label} = {expression(value)};"]
    if kind is K.RETURN:
        if node.children:
            return [f"{pad}return {expression(node.children[0])};"]
        return [pad + "return;"]
    if kind is K.EXPR_STMT:
        return [f"{pad}{expression(node.children[0])};"]
    if kind is K.WHILE:
        cond, body = node.children
        return _with_body(f"{pad}while ({expression(cond)})", body, depth)
    if kind is K.IF:
        cond, then = node.children[:2]
        lines = _with_body(f"{pad}if ({expression(cond)})", then, depth)
        if len(node.children) == 3:
            other = node.children[2]
            if then.kind is K.BLOCK:
                header = lines.pop() + " else"
            else:
                header = pad + "else"
            if other.kind is K.IF:
                rest = statement_lines(other, depth)
                lines.append(f"{header} {rest[0].lstrip()}")
                lines.extend(rest[1:])
            else:
                lines.extend(_with_body(header, other, depth))
        return lines
    raise ValueError(f"not a statement: {node.kind.value}")


def _function_lines(node: Node) -> list[str]:
    rtype, *params, body = node.children
    plist = ", ".join(f"{p.children[0].label} {p.children[1].label}" for p in params)
    return _with_body(f"{rtype.label} {node.label}({plist})", body, 0)


def pretty_print(ast: Ast | Node) -> str:
    """Render canonical MiniLang text. Functions are separated by a blank line."""
    root = ast.root if isinstance(ast, Ast) else ast
    if root.kind is K.PROGRAM:
        chunks = ["\n".join(_function_lines(f)) + "\n" for f in root.children]
        return "\n".join(chunks)
    if root.kind is K.FUNCTION_DECL:
        return "\n".join(_function_lines(root)) + "\n"
    if root.kind.value in _STATEMENT_NAMES:
        return "\n".join(statement_lines(root)) + "\n"
    return expression(root)


_STATEMENT_NAMES = {"Block", "VarDecl", "Assign", "If", "While", "Return", "ExprStmt"}
