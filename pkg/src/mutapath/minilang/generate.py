"""Random well-formed MiniLang programs for property tests and seeded corpora."""

from __future__ import annotations

import random

from .nodes import Ast, Node, NodeKind as K, _dangles

VAR_NAMES = ("a", "b", "c", "n", "x", "y")
FUNC_NAMES = ("f", "g", "h", "step", "log")
_ARITH = ("+", "-", "*", "/", "%")
_BITWISE = ("&", "|", "^", "<<", ">>")
_RELATIONAL = ("<", "<=", ">", ">=", "==", "!=")
_STRINGS = ('""', '"x"', '"ab"', '"a\\"b"')


def _lit(text: str) -> Node:
    return Node(K.LITERAL, text)


def _ident(name: str) -> Node:
    return Node(K.IDENTIFIER, name)


class _Gen:
    def __init__(self, rng: random.Random, depth: int):
        self.rng = rng
        self.depth = depth
        self.functions: dict[str, tuple[str, int]] = {}

    def int_expr(self, d: int) -> Node:
        r = self.rng.random()
        if d <= 0 or r < 0.35:
            return self.rng.choice([_lit(str(self.rng.randint(0, 9))), _ident(self.rng.choice(VAR_NAMES))])
        if r < 0.75:
            ops = _ARITH if self.rng.random() < 0.8 else _BITWISE
            return Node(K.BINARY_EXPR, self.rng.choice(ops), [self.int_expr(d - 1), self.int_expr(d - 1)])
        if r < 0.85:
            return Node(K.UNARY_EXPR, "-", [self.int_expr(d - 1)])
        if r < 0.92:
            return Node(K.INC_DEC_EXPR, self.rng.choice(("++", "--")), [_ident(self.rng.choice(VAR_NAMES))])
        return self.call(d)

    def float_expr(self, d: int) -> Node:
        if d <= 0 or self.rng.random() < 0.5:
            return _lit(f"{self.rng.randint(0, 9)}.{self.rng.randint(0, 9)}")
        return Node(K.BINARY_EXPR, self.rng.choice(("+", "-", "*", "/")), [self.float_expr(d - 1), self.int_expr(d - 1)])

    def bool_expr(self, d: int) -> Node:
        r = self.rng.random()
        if d <= 0 or r < 0.2:
            return self.rng.choice([_lit("true"), _lit("false"), _ident(self.rng.choice(VAR_NAMES))])
        if r < 0.75:
            return Node(K.BINARY_EXPR, self.rng.choice(_RELATIONAL), [self.int_expr(d - 1), self.int_expr(d - 1)])
        if r < 0.9:
            return Node(K.BINARY_EXPR, self.rng.choice(("&&", "||")), [self.bool_expr(d - 1), self.bool_expr(d - 1)])
        return Node(K.UNARY_EXPR, "!", [self.bool_expr(d - 1)])

    def typed_expr(self, type_name: str, d: int) -> Node:
        if type_name == "float":
            return self.float_expr(d)
        if type_name == "bool":
            return self.bool_expr(d)
        if type_name == "string":
            if self.rng.random() < 0.3:
                return Node(K.BINARY_EXPR, "+", [_lit(self.rng.choice(_STRINGS)), _ident(self.rng.choice(VAR_NAMES))])
            return _lit(self.rng.choice(_STRINGS))
        if type_name == "ref":
            return self.rng.choice([_lit("null"), _ident(self.rng.choice(VAR_NAMES))])
        return self.int_expr(d)

    def call(self, d: int) -> Node:
        name = self.rng.choice(FUNC_NAMES)
        arity = self.functions.get(name, ("void", self.rng.randint(0, 2)))[1]
        return Node(K.CALL, name, [self.int_expr(d - 1) for _ in range(arity)])

    def statement(self, d: int, rtype: str) -> Node:
        r = self.rng.random()
        if d <= 0 or r < 0.25:
            t = self.rng.choice(("int", "int", "float", "bool"))
            kids = [Node(K.TYPE_REF, t)]
            if self.rng.random() < 0.8:
                kids.append(self.typed_expr(t, self.depth))
            return Node(K.VAR_DECL, self.rng.choice(VAR_NAMES), kids)
        if r < 0.45:
            return Node(K.ASSIGN, "", [_ident(self.rng.choice(VAR_NAMES)), self.int_expr(self.depth)])
        if r < 0.65:
            if self.rng.random() < 0.7:
                return Node(K.EXPR_STMT, "", [self.call(self.depth)])
            return Node(K.EXPR_STMT, "", [Node(K.INC_DEC_EXPR, self.rng.choice(("++", "--")), [_ident(self.rng.choice(VAR_NAMES))])])
        if r < 0.82:
            then = self.body(d - 1, rtype)
            kids = [self.bool_expr(self.depth), then]
            if self.rng.random() < 0.4:
                if _dangles(then):
                    kids[1] = Node(K.BLOCK, "", [then])
                kids.append(self.body(d - 1, rtype))
            return Node(K.IF, "", kids)
        if r < 0.92:
            return Node(K.WHILE, "", [self.bool_expr(self.depth), self.body(d - 1, rtype)])
        return self.ret(rtype)

    def body(self, d: int, rtype: str) -> Node:
        if self.rng.random() < 0.75:
            return Node(K.BLOCK, "", [self.statement(d, rtype) for _ in range(self.rng.randint(0, 2))])
        return self.statement(d, rtype)

    def ret(self, rtype: str) -> Node:
        if rtype == "void":
            return Node(K.RETURN)
        return Node(K.RETURN, "", [self.typed_expr(rtype, self.depth)])

    def function(self, name: str, rtype: str, arity: int) -> Node:
        params = [
            Node(K.PARAM, "", [Node(K.TYPE_REF, self.rng.choice(("int", "int", "float", "bool", "ref"))), _ident(v)])
            for v in self.rng.sample(VAR_NAMES, arity)
        ]
        stmts = [self.statement(2, rtype) for _ in range(self.rng.randint(1, 3))]
        if rtype != "void" or self.rng.random() < 0.3:
            stmts.append(self.ret(rtype))
        return Node(K.FUNCTION_DECL, name, [Node(K.TYPE_REF, rtype), *params, Node(K.BLOCK, "", stmts)])


def random_program(rng: random.Random, min_nodes: int = 1, max_nodes: int = 60,
                   max_functions: int = 2, expr_depth: int = 2) -> Ast:
    """Draw programs from ``rng`` until one has between min and max nodes."""
    while True:
        gen = _Gen(rng, expr_depth)
        names = rng.sample(FUNC_NAMES, rng.randint(1, max_functions))
        sigs = [(name, rng.choice(("int", "int", "bool", "float", "string", "ref", "void")), rng.randint(0, 2))
                for name in names]
        gen.functions = {name: (rtype, arity) for name, rtype, arity in sigs}
        root = Node(K.PROGRAM, "", [gen.function(*sig) for sig in sigs])
        if min_nodes <= root.size <= max_nodes:
            return Ast(root)
