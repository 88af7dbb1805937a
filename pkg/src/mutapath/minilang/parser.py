"""Tokenizer and recursive-descent parser for MiniLang."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .nodes import KEYWORDS, TYPE_NAMES, Ast, Node, NodeKind as K


class ParseError(Exception):
    """Malformed MiniLang source.

    Carries the 1-based ``line``/``column`` of the offending token and the set
    of token texts (or classes like ``<identifier>``) that would have been
    accepted there.
    """

    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, float, string, op, eof
    text: str
    line: int
    column: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<float>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||[-+*/%<>=!&|^(){},;])
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "keyword"
            tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# Binary precedence ladder, loosest first.
_BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "%"),
)
_LITERAL_KEYWORDS = ("true", "false", "null")
_EXPR_START = {"(", "-", "!", "<identifier>", "<literal>"}


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.return_type = "void"

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def error(self, message: str, expected: Iterable[str] = ()) -> ParseError:
        return ParseError(message, self.tok.line, self.tok.column, expected)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "keyword") and self.tok.text in texts

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"unexpected {self.tok.describe()}", {text})
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error(f"unexpected {self.tok.describe()}", {"<identifier>"})
        text = self.tok.text
        self.pos += 1
        return text

    def type_ref(self) -> Node:
        if not (self.tok.kind == "keyword" and self.tok.text in TYPE_NAMES):
            raise self.error(f"unexpected {self.tok.describe()}", TYPE_NAMES)
        text = self.tok.text
        self.pos += 1
        return Node(K.TYPE_REF, text)

    # declarations

    def program(self) -> Node:
        functions = []
        while self.tok.kind != "eof":
            if not (self.tok.kind == "keyword" and self.tok.text in TYPE_NAMES):
                raise self.error(f"unexpected {self.tok.describe()}", set(TYPE_NAMES) | {"end of input"})
            functions.append(self.function())
        return Node(K.PROGRAM, "", functions)

    def function(self) -> Node:
        rtype = self.type_ref()
        name = self.ident()
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.pos += 1
                params.append(self.param())
        self.expect(")")
        self.return_type = rtype.label
        body = self.block()
        return Node(K.FUNCTION_DECL, name, [rtype, *params, body])

    def param(self) -> Node:
        t = self.type_ref()
        return Node(K.PARAM, "", [t, Node(K.IDENTIFIER, self.ident())])

    # statements

    def block(self) -> Node:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unexpected end of input", {"}"})
            stmts.append(self.statement())
        self.expect("}")
        return Node(K.BLOCK, "", stmts)

    def statement(self) -> Node:
        tok = self.tok
        if tok.kind == "keyword" and tok.text in TYPE_NAMES:
            return self.var_decl()
        if self.at("{"):
            return self.block()
        if self.at("if"):
            return self.if_stmt()
        if self.at("while"):
            self.pos += 1
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return Node(K.WHILE, "", [cond, self.statement()])
        if self.at("return"):
            return self.return_stmt()
        if tok.kind == "ident" and self.peek().kind == "op" and self.peek().text == "=":
            target = Node(K.IDENTIFIER, self.ident())
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return Node(K.ASSIGN, "", [target, value])
        value = self.expr()
        self.expect(";")
        return Node(K.EXPR_STMT, "", [value])

    def var_decl(self) -> Node:
        t = self.type_ref()
        name = self.ident()
        kids = [t]
        if self.at("="):
            self.pos += 1
            kids.append(self.expr())
        self.expect(";")
        return Node(K.VAR_DECL, name, kids)

    def if_stmt(self) -> Node:
        self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        kids = [cond, self.statement()]
        if self.at("else"):
            self.pos += 1
            kids.append(self.statement())
        return Node(K.IF, "", kids)

    def return_stmt(self) -> Node:
        self.expect("return")
        if self.return_type == "void":
            self.expect(";")
            return Node(K.RETURN)
        if self.at(";"):
            raise self.error("missing return value", _EXPR_START)
        value = self.expr()
        self.expect(";")
        return Node(K.RETURN, "", [value])

    # expressions

    def expr(self, level: int = 0) -> Node:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        ops = _BINARY_LEVELS[level]
        left = self.expr(level + 1)
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.tok.text
            self.pos += 1
            right = self.expr(level + 1)
            left = Node(K.BINARY_EXPR, op, [left, right])
        return left

    def unary(self) -> Node:
        if self.at("-", "!"):
            op = self.tok.text
            self.pos += 1
            return Node(K.UNARY_EXPR, op, [self.unary()])
        return self.postfix()

    def postfix(self) -> Node:
        node = self.primary()
        while self.at("++", "--"):
            if node.kind is not K.IDENTIFIER:
                raise self.error(f"{self.tok.text} needs a variable operand", ())
            node = Node(K.INC_DEC_EXPR, self.tok.text, [node])
            self.pos += 1
        return node

    def primary(self) -> Node:
        tok = self.tok
        if tok.kind in ("int", "float", "string") or (tok.kind == "keyword" and tok.text in _LITERAL_KEYWORDS):
            self.pos += 1
            return Node(K.LITERAL, tok.text)
        if tok.kind == "ident":
            self.pos += 1
            if self.at("("):
                self.pos += 1
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.at(","):
                        self.pos += 1
                        args.append(self.expr())
                self.expect(")")
                return Node(K.CALL, tok.text, args)
            return Node(K.IDENTIFIER, tok.text)
        if self.at("("):
            self.pos += 1
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error(f"unexpected {tok.describe()}", _EXPR_START)


def parse(source: str) -> Ast:
    """Parse MiniLang source into an Ast; raises ParseError on bad input.

    ``return;`` is only accepted inside void functions and ``return expr;``
    only outside them.
    """
    parser = Parser(source)
    try:
        return Ast(parser.program())
    except RecursionError:
        raise parser.error("nesting too deep") from None
