"""Mutation operators as enumerable AST rewrites.

Operators come in two sets: ``pitest`` (Pitest's eleven defaults) and
``extended`` (those plus five relaxed/rename operators, with MethodCalls
standing in for VoidMethodCalls). Operators whose replacement value is open
ended draw candidates from a :class:`CandidatePool` harvested from the pair of
programs under analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

from .minilang.nodes import Ast, Node, NodeKind as K, NodePath, literal_kind, node_at, replace_at


class OperatorName(str, Enum):
    CONDITIONAL_BOUNDARY = "ConditionalBoundary"
    INCREMENTS = "Increments"
    INVERT_NEGATIVE = "InvertNegative"
    MATH = "Math"
    NEGATE_CONDITIONALS = "NegateConditionals"
    VOID_METHOD_CALLS = "VoidMethodCalls"
    EMPTY_RETURNS = "EmptyReturns"
    FALSE_RETURNS = "FalseReturns"
    TRUE_RETURNS = "TrueReturns"
    NULL_RETURNS = "NullReturns"
    PRIMITIVE_RETURNS = "PrimitiveReturns"
    METHOD_CALLS = "MethodCalls"
    RELAXED_EMPTY_RETURNS = "RelaxedEmptyReturns"
    RELAXED_INLINE_CONSTANTS = "RelaxedInlineConstants"
    RELAXED_RETURN_VALUES = "RelaxedReturnValues"
    RENAME = "Rename"

    def __str__(self) -> str:
        return self.value


Op = OperatorName


class StaleApplication(Exception):
    """An application no longer matches the tree it is applied to."""


@dataclass(frozen=True)
class MutationApplication:
    """One operator instantiated at one site with one replacement choice.

    ``action`` is one of relabel, replace, delete, wrap, unwrap. ``expect``
    guards against stale use: the old label for relabels, otherwise the hex
    digest of the node at ``site``. For wrap/unwrap the site is the operand.
    """

    operator: OperatorName
    site: NodePath
    action: str
    expect: str
    new_kind: K | None = None
    new_label: str = ""

    def to_dict(self) -> dict:
        out = {
            "operator": self.operator.value,
            "site": list(self.site),
            "action": self.action,
        }
        if self.action == "relabel":
            out["old_label"] = self.expect
            out["new_label"] = self.new_label
        elif self.action == "replace":
            out["new_kind"] = self.new_kind.value
            out["new_label"] = self.new_label
        return out


@dataclass(frozen=True)
class CandidatePool:
    literals: frozenset[tuple[str, str]]  # (literal kind, lexeme)
    identifiers: frozenset[str]

    def literals_of(self, kind: str) -> list[str]:
        return sorted(lex for k, lex in self.literals if k == kind)

    def sorted_identifiers(self) -> list[str]:
        return sorted(self.identifiers)


_NAMED = (K.IDENTIFIER, K.CALL, K.FUNCTION_DECL, K.VAR_DECL)


def build_pool(fixed: Ast, buggy: Ast) -> CandidatePool:
    """Literals of ``buggy`` plus identifier names from both programs."""
    literals = frozenset(
        (literal_kind(n.label), n.label) for n in buggy.root.preorder() if n.kind is K.LITERAL
    )
    names = frozenset(
        n.label for tree in (fixed, buggy) for n in tree.root.preorder() if n.kind in _NAMED
    )
    return CandidatePool(literals, names)


# --- site context ---------------------------------------------------------

_DEFAULTS = {"int": "0", "float": "0.0", "bool": "false", "string": '""', "ref": "null"}
_LITERAL_KIND_FOR_TYPE = {"int": "int", "float": "float", "bool": "bool", "string": "string", "ref": "null"}
_NUMERIC_TYPES = ("int", "float")


@dataclass(frozen=True)
class _Site:
    path: NodePath
    node: Node
    parent: Node | None
    index: int
    return_type: str
    numeric_names: frozenset[str]


class _Context:
    """One pre-order pass over an AST shared by all operators."""

    def __init__(self, ast: Ast):
        root = ast.root
        self.root = root
        self.declared: dict[str, str] = {}
        for fn in root.children:
            if fn.kind is K.FUNCTION_DECL:
                self.declared.setdefault(fn.label, fn.children[0].label)
        self.sites: list[_Site] = []
        stack: list[tuple[NodePath, Node, Node | None, int, str, frozenset[str]]] = [
            ((), root, None, -1, "void", frozenset())
        ]
        while stack:
            path, node, parent, index, rtype, numeric = stack.pop()
            if node.kind is K.FUNCTION_DECL:
                rtype = node.children[0].label
                numeric = _numeric_names(node)
            self.sites.append(_Site(path, node, parent, index, rtype, numeric))
            kids = node.children
            for i in range(len(kids) - 1, -1, -1):
                stack.append((path + (i,), kids[i], node, i, rtype, numeric))


def _numeric_names(fn: Node) -> frozenset[str]:
    names = set()
    for n in fn.preorder():
        if n.kind is K.PARAM and n.children[0].label in _NUMERIC_TYPES:
            names.add(n.children[1].label)
        elif n.kind is K.VAR_DECL and n.children[0].label in _NUMERIC_TYPES:
            names.add(n.label)
    return frozenset(names)


def _is_rvalue_identifier(site: _Site) -> bool:
    parent = site.parent
    if parent is None:
        return False
    if parent.kind in (K.PARAM, K.INC_DEC_EXPR):
        return False
    return not (parent.kind is K.ASSIGN and site.index == 0)


def _digest(node: Node) -> str:
    return node.digest.hex()


def _relabel(op: Op, site: _Site, new_label: str) -> MutationApplication:
    return MutationApplication(op, site.path, "relabel", site.node.label, site.node.kind, new_label)


def _replace(op: Op, site: _Site, kind: K, label: str) -> MutationApplication | None:
    node = site.node
    if node.kind is kind and node.label == label and not node.children:
        return None
    return MutationApplication(op, site.path, "replace", _digest(node), kind, label)


def _delete(op: Op, site: _Site) -> MutationApplication:
    return MutationApplication(op, site.path, "delete", _digest(site.node))


def _sites_of(ctx: _Context, kind: K) -> Iterable[_Site]:
    return (s for s in ctx.sites if s.node.kind is kind)


def _valued_returns(ctx: _Context) -> Iterable[_Site]:
    """Return-value expression sites (the child of a Return)."""
    for s in ctx.sites:
        if s.parent is not None and s.parent.kind is K.RETURN:
            yield s


def _statement_call(site: _Site) -> bool:
    # ExprStmt(Call) sitting directly in a Block, so removing it keeps the tree valid.
    node = site.node
    return (
        node.kind is K.EXPR_STMT
        and node.children[0].kind is K.CALL
        and site.parent is not None
        and site.parent.kind is K.BLOCK
    )


# --- operators ------------------------------------------------------------

_BOUNDARY = {"<": "<=", "<=": "<", ">": ">=", ">=": ">"}
_NEGATE = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
_ARITHMETIC = ("+", "-", "*", "/", "%")
_BITWISE = ("&", "|", "^", "<<", ">>")


def _conditional_boundary(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    return [
        _relabel(Op.CONDITIONAL_BOUNDARY, s, _BOUNDARY[s.node.label])
        for s in _sites_of(ctx, K.BINARY_EXPR)
        if s.node.label in _BOUNDARY
    ]


def _increments(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    flip = {"++": "--", "--": "++"}
    return [_relabel(Op.INCREMENTS, s, flip[s.node.label]) for s in _sites_of(ctx, K.INC_DEC_EXPR)]


def _invert_negative(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    out = []
    for s in ctx.sites:
        node = s.node
        if node.kind is K.LITERAL:
            numeric = literal_kind(node.label) in _NUMERIC_TYPES
        elif node.kind is K.IDENTIFIER:
            numeric = _is_rvalue_identifier(s) and node.label in s.numeric_names
        else:
            continue
        if not numeric:
            continue
        parent = s.parent
        negated = parent is not None and parent.kind is K.UNARY_EXPR and parent.label == "-"
        out.append(MutationApplication(Op.INVERT_NEGATIVE, s.path, "unwrap" if negated else "wrap", _digest(node)))
    return out


def _math(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    out = []
    for s in _sites_of(ctx, K.BINARY_EXPR):
        label = s.node.label
        family = _ARITHMETIC if label in _ARITHMETIC else _BITWISE if label in _BITWISE else None
        if family is None:
            continue
        if label == "+" and any(
            c.kind is K.LITERAL and literal_kind(c.label) == "string" for c in s.node.children
        ):
            continue
        out.extend(_relabel(Op.MATH, s, alt) for alt in family if alt != label)
    return out


def _negate_conditionals(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    return [
        _relabel(Op.NEGATE_CONDITIONALS, s, _NEGATE[s.node.label])
        for s in _sites_of(ctx, K.BINARY_EXPR)
        if s.node.label in _NEGATE
    ]


def _void_method_calls(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    return [
        _delete(Op.VOID_METHOD_CALLS, s)
        for s in ctx.sites
        if _statement_call(s) and ctx.declared.get(s.node.children[0].label, "void") == "void"
    ]


def _fixed_return(op: Op, types: tuple[str, ...], value: Callable[[str], str]):
    def enumerate_(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
        out = []
        for s in _valued_returns(ctx):
            if s.return_type in types:
                app = _replace(op, s, K.LITERAL, value(s.return_type))
                if app is not None:
                    out.append(app)
        return out

    return enumerate_


_empty_returns = _fixed_return(Op.EMPTY_RETURNS, ("int", "float", "string", "bool"), _DEFAULTS.__getitem__)
_false_returns = _fixed_return(Op.FALSE_RETURNS, ("bool",), lambda t: "false")
_true_returns = _fixed_return(Op.TRUE_RETURNS, ("bool",), lambda t: "true")
_null_returns = _fixed_return(Op.NULL_RETURNS, ("ref",), lambda t: "null")
_primitive_returns = _fixed_return(Op.PRIMITIVE_RETURNS, _NUMERIC_TYPES, _DEFAULTS.__getitem__)


def _method_calls(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    out = []
    for s in ctx.sites:
        if _statement_call(s):
            out.append(_delete(Op.METHOD_CALLS, s))
        elif s.node.kind is K.CALL and s.parent is not None and s.parent.kind is not K.EXPR_STMT:
            rtype = ctx.declared.get(s.node.label)
            if rtype in _DEFAULTS:
                out.append(_replace(Op.METHOD_CALLS, s, K.LITERAL, _DEFAULTS[rtype]))
    return out


def _relaxed_empty_returns(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    out = []
    for s in _valued_returns(ctx):
        lk = _LITERAL_KIND_FOR_TYPE.get(s.return_type)
        if lk is None:
            continue
        for lex in pool.literals_of(lk):
            app = _replace(Op.RELAXED_EMPTY_RETURNS, s, K.LITERAL, lex)
            if app is not None:
                out.append(app)
    return out


def _relaxed_inline_constants(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    out = []
    for s in _sites_of(ctx, K.LITERAL):
        for lex in pool.literals_of(literal_kind(s.node.label)):
            if lex != s.node.label:
                out.append(_relabel(Op.RELAXED_INLINE_CONSTANTS, s, lex))
    return out


def _relaxed_return_values(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    out = []
    names = pool.sorted_identifiers()
    for s in _valued_returns(ctx):
        lk = _LITERAL_KIND_FOR_TYPE.get(s.return_type)
        choices = [(K.LITERAL, lex) for lex in pool.literals_of(lk)] if lk else []
        choices.extend((K.IDENTIFIER, name) for name in names)
        for kind, label in choices:
            app = _replace(Op.RELAXED_RETURN_VALUES, s, kind, label)
            if app is not None:
                out.append(app)
    return out


def _rename(ctx: _Context, pool: CandidatePool) -> list[MutationApplication]:
    names = pool.sorted_identifiers()
    out = []
    for s in ctx.sites:
        if s.node.kind in (K.IDENTIFIER, K.CALL):
            out.extend(_relabel(Op.RENAME, s, name) for name in names if name != s.node.label)
    return out


@dataclass(frozen=True)
class MutationOperator:
    name: OperatorName
    enumerate: Callable[[_Context, CandidatePool], list[MutationApplication]]


OPERATORS: dict[OperatorName, MutationOperator] = {
    op.name: op
    for op in (
        MutationOperator(Op.CONDITIONAL_BOUNDARY, _conditional_boundary),
        MutationOperator(Op.INCREMENTS, _increments),
        MutationOperator(Op.INVERT_NEGATIVE, _invert_negative),
        MutationOperator(Op.MATH, _math),
        MutationOperator(Op.NEGATE_CONDITIONALS, _negate_conditionals),
        MutationOperator(Op.VOID_METHOD_CALLS, _void_method_calls),
        MutationOperator(Op.EMPTY_RETURNS, _empty_returns),
        MutationOperator(Op.FALSE_RETURNS, _false_returns),
        MutationOperator(Op.TRUE_RETURNS, _true_returns),
        MutationOperator(Op.NULL_RETURNS, _null_returns),
        MutationOperator(Op.PRIMITIVE_RETURNS, _primitive_returns),
        MutationOperator(Op.METHOD_CALLS, _method_calls),
        MutationOperator(Op.RELAXED_EMPTY_RETURNS, _relaxed_empty_returns),
        MutationOperator(Op.RELAXED_INLINE_CONSTANTS, _relaxed_inline_constants),
        MutationOperator(Op.RELAXED_RETURN_VALUES, _relaxed_return_values),
        MutationOperator(Op.RENAME, _rename),
    )
}


@dataclass(frozen=True)
class OperatorSet:
    name: str
    operators: tuple[MutationOperator, ...]

    @property
    def names(self) -> tuple[OperatorName, ...]:
        return tuple(op.name for op in self.operators)


_PITEST_NAMES = tuple(OperatorName)[:11]
PITEST = OperatorSet("pitest", tuple(OPERATORS[n] for n in _PITEST_NAMES))
EXTENDED = OperatorSet(
    "extended", tuple(OPERATORS[n] for n in OperatorName if n is not Op.VOID_METHOD_CALLS)
)
OPERATOR_SETS = {"pitest": PITEST, "extended": EXTENDED}


def operator_set(name: str) -> OperatorSet:
    try:
        return OPERATOR_SETS[name]
    except KeyError:
        raise ValueError(f"unknown operator set {name!r}; choose pitest or extended") from None


def enumerate_applications(opset: OperatorSet, ast: Ast, pool: CandidatePool) -> list[MutationApplication]:
    """All applications of ``opset`` on ``ast``, operator-major, sites in pre-order."""
    ctx = _Context(ast)
    out: list[MutationApplication] = []
    for op in opset.operators:
        out.extend(op.enumerate(ctx, pool))
    return out


def apply(app: MutationApplication, ast: Ast) -> Ast:
    try:
        node = node_at(ast.root, app.site)
    except IndexError:
        raise StaleApplication(f"site {app.site} does not exist") from None
    action = app.action
    if action == "relabel":
        if node.label != app.expect or (app.new_kind is not None and node.kind is not app.new_kind):
            raise StaleApplication(f"expected label {app.expect!r} at {app.site}, found {node.label!r}")
        return Ast(replace_at(ast.root, app.site, node.with_label(app.new_label)))
    if node.digest.hex() != app.expect:
        raise StaleApplication(f"subtree at {app.site} changed")
    if action == "replace":
        new = Node(app.new_kind, app.new_label)
        return Ast(replace_at(ast.root, app.site, new))
    if action == "delete":
        return Ast(replace_at(ast.root, app.site, None))
    if action == "wrap":
        return Ast(replace_at(ast.root, app.site, Node(K.UNARY_EXPR, "-", [node])))
    if action == "unwrap":
        parent_path = app.site[:-1]
        parent = node_at(ast.root, parent_path)
        if parent.kind is not K.UNARY_EXPR or parent.label != "-":
            raise StaleApplication(f"no negation around {app.site}")
        return Ast(replace_at(ast.root, parent_path, node))
    raise StaleApplication(f"unknown action {action!r}")


def touched_size(app: MutationApplication, ast: Ast) -> int:
    """Upper bound on how far one application can move the tree edit distance."""
    if app.action in ("relabel", "wrap", "unwrap"):
        return 1
    node = node_at(ast.root, app.site)
    if app.action == "delete":
        return node.size
    return node.size + 1
