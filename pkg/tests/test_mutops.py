from __future__ import annotations

import random
from collections import Counter

import pytest

from mutapath.minilang import NodeKind as K, canonical_hash, node_at, parse, pretty_print, validate
from mutapath.minilang.generate import random_program
from mutapath.mutops import (
    EXTENDED,
    OPERATOR_SETS,
    PITEST,
    CandidatePool,
    MutationApplication,
    OperatorName as Op,
    StaleApplication,
    apply,
    build_pool,
    enumerate_applications,
    operator_set,
    touched_size,
)

SECOND_ORDER_FIXED = "int f(int a,int b){return a + a;}"
SECOND_ORDER_BUGGY = "int f(int a,int b){return a - b;}"


def by_operator(apps):
    return Counter(a.operator for a in apps)


def only(apps, op):
    return [a for a in apps if a.operator is op]


def body_of(source: str) -> str:
    return pretty_print(parse(source))


def test_operator_sets():
    assert [o.value for o in PITEST.names] == [
        "ConditionalBoundary", "Increments", "InvertNegative", "Math", "NegateConditionals",
        "VoidMethodCalls", "EmptyReturns", "FalseReturns", "TrueReturns", "NullReturns", "PrimitiveReturns",
    ]
    assert len(EXTENDED.names) == 15
    assert set(EXTENDED.names) == set(Op) - {Op.VOID_METHOD_CALLS}
    assert operator_set("pitest") is PITEST and OPERATOR_SETS["extended"] is EXTENDED
    with pytest.raises(ValueError):
        operator_set("everything")


def test_pool_collects_names_from_both_and_literals_from_buggy():
    fixed = parse("int f(int a){ return a + 1; }")
    buggy = parse("int f(int a){ int b = 42; return a + b * 0; }")
    pool = build_pool(fixed, buggy)
    assert pool.identifiers == {"f", "a", "b"}
    assert pool.literals == {("int", "0"), ("int", "42")}


def test_pool_of_identical_programs():
    ast = parse('string g(string s){ log(s); return "x"; }')
    pool = build_pool(ast, ast)
    assert pool.identifiers == {"g", "s", "log"}
    assert pool.literals == {("string", '"x"')}


def test_second_order_enumeration():
    ast = parse("int f(int a){ return a + a; }")
    pool = CandidatePool(frozenset(), frozenset({"a", "b"}))
    apps = enumerate_applications(EXTENDED, ast, pool)
    math = only(apps, Op.MATH)
    assert [a.new_label for a in math] == ["-", "*", "/", "%"]
    renames = only(apps, Op.RENAME)
    ret_expr = (0, 2, 0, 0)
    in_return = [a for a in renames if a.site[:4] == ret_expr]
    assert [(a.site, a.new_label) for a in in_return] == [(ret_expr + (0,), "b"), (ret_expr + (1,), "b")]
    # the parameter name is an identifier too and may be renamed
    assert len(renames) == 3
    assert by_operator(apps)[Op.CONDITIONAL_BOUNDARY] == 0


def test_no_relational_operator_means_no_boundary_mutants():
    ast = parse("int f(int a){ a++; return a * 2; }")
    pool = build_pool(ast, ast)
    assert only(enumerate_applications(PITEST, ast, pool), Op.CONDITIONAL_BOUNDARY) == []


def test_undeclared_void_call_deletion():
    ast = parse("void f(){ g(); }")
    apps = only(enumerate_applications(PITEST, ast, build_pool(ast, ast)), Op.VOID_METHOD_CALLS)
    assert len(apps) == 1
    assert apps[0].action == "delete" and apps[0].site == (0, 1, 0)
    assert body_of("void f(){ }") == pretty_print(apply(apps[0], ast))


def test_void_method_calls_skip_valued_callees():
    ast = parse("int g(){ return 1; } void f(){ g(); h(); }")
    apps = only(enumerate_applications(PITEST, ast, build_pool(ast, ast)), Op.VOID_METHOD_CALLS)
    assert [node_at(ast.root, a.site).children[0].label for a in apps] == ["h"]


def test_apply_second_order_steps():
    ast = parse(SECOND_ORDER_FIXED)
    pool = build_pool(ast, parse(SECOND_ORDER_BUGGY))
    minus = next(a for a in enumerate_applications(EXTENDED, ast, pool)
                 if a.operator is Op.MATH and a.new_label == "-")
    step1 = apply(minus, ast)
    assert pretty_print(step1) == body_of("int f(int a,int b){return a - a;}")
    rename = next(a for a in enumerate_applications(EXTENDED, step1, pool)
                  if a.operator is Op.RENAME and a.site == (0, 3, 0, 0, 1) and a.new_label == "b")
    assert canonical_hash(apply(rename, step1)) == canonical_hash(parse(SECOND_ORDER_BUGGY))
    # input untouched
    assert pretty_print(ast) == body_of(SECOND_ORDER_FIXED)


def test_stale_application():
    ast = parse(SECOND_ORDER_FIXED)
    app = enumerate_applications(EXTENDED, ast, build_pool(ast, ast))[0]
    other = parse("int f(){ return 1; }")
    with pytest.raises(StaleApplication):
        apply(app, other)
    with pytest.raises(StaleApplication):
        apply(MutationApplication(Op.MATH, (9, 9), "relabel", "+", K.BINARY_EXPR, "-"), ast)
    moved = parse("int f(int a,int b){return a * a;}")
    math = next(a for a in enumerate_applications(EXTENDED, ast, build_pool(ast, ast)) if a.operator is Op.MATH)
    with pytest.raises(StaleApplication):
        apply(math, moved)


@pytest.mark.parametrize("source,op,expected", [
    ("bool f(int a){ return a < 1; }", Op.CONDITIONAL_BOUNDARY, ["return a <= 1;"]),
    ("bool f(int a){ return a >= 1; }", Op.CONDITIONAL_BOUNDARY, ["return a > 1;"]),
    ("bool f(int a){ return a == 1; }", Op.CONDITIONAL_BOUNDARY, []),
    ("void f(int a){ a++; }", Op.INCREMENTS, ["a--;"]),
    ("bool f(int a){ return a <= 1; }", Op.NEGATE_CONDITIONALS, ["return a > 1;"]),
    ("bool f(int a){ return a != 1; }", Op.NEGATE_CONDITIONALS, ["return a == 1;"]),
    ("int f(int a){ return a << 1; }", Op.MATH, ["return a & 1;", "return a | 1;", "return a ^ 1;", "return a >> 1;"]),
    ('string f(string s){ return s + "x"; }', Op.MATH, []),
    ("int f(){ return -3; }", Op.INVERT_NEGATIVE, ["return 3;"]),
    ("float f(float x){ return x; }", Op.INVERT_NEGATIVE, ["return -x;"]),
    ("bool f(bool x){ return x; }", Op.INVERT_NEGATIVE, []),
    ("int f(int a){ return a + 1; }", Op.EMPTY_RETURNS, ["return 0;"]),
    ("float f(){ return 2.5; }", Op.EMPTY_RETURNS, ["return 0.0;"]),
    ('string f(){ return "x"; }', Op.EMPTY_RETURNS, ['return "";']),
    ("bool f(int a){ return a > 0; }", Op.EMPTY_RETURNS, ["return false;"]),
    ("int f(){ return 0; }", Op.EMPTY_RETURNS, []),
    ("bool f(int a){ return a > 0; }", Op.FALSE_RETURNS, ["return false;"]),
    ("bool f(int a){ return a > 0; }", Op.TRUE_RETURNS, ["return true;"]),
    ("ref f(ref r){ return r; }", Op.NULL_RETURNS, ["return null;"]),
    ("int f(int a){ return a; }", Op.PRIMITIVE_RETURNS, ["return 0;"]),
    ("ref f(ref r){ return r; }", Op.PRIMITIVE_RETURNS, []),
])
def test_operator_semantics(source, op, expected):
    ast = parse(source)
    opset = PITEST if op in PITEST.names else EXTENDED
    apps = only(enumerate_applications(opset, ast, build_pool(ast, ast)), op)
    lines = []
    for app in apps:
        text = pretty_print(apply(app, ast))
        lines.append(next(line.strip() for line in text.splitlines() if line.startswith("  ")))
    assert lines == expected


def test_method_calls_delete_statements_and_default_expressions():
    ast = parse("int g(){ return 7; } void h(){ } int f(){ h(); return g() + 1; }")
    apps = only(enumerate_applications(EXTENDED, ast, build_pool(ast, ast)), Op.METHOD_CALLS)
    assert [a.action for a in apps] == ["delete", "replace"]
    text = pretty_print(apply(apps[1], ast))
    assert "return 0 + 1;" in text


def test_relaxed_operators_draw_from_pool():
    fixed = parse("int f(int a){ int c = 3; return a; }")
    buggy = parse("int f(int a){ int c = 5; return 9; }")
    pool = build_pool(fixed, buggy)
    apps = enumerate_applications(EXTENDED, fixed, pool)
    assert [a.new_label for a in only(apps, Op.RELAXED_EMPTY_RETURNS)] == ["5", "9"]
    assert [a.new_label for a in only(apps, Op.RELAXED_INLINE_CONSTANTS)] == ["5", "9"]
    assert [(a.new_kind, a.new_label) for a in only(apps, Op.RELAXED_RETURN_VALUES)] == [
        (K.LITERAL, "5"), (K.LITERAL, "9"), (K.IDENTIFIER, "c"), (K.IDENTIFIER, "f"),
    ]


def test_relaxed_inline_constants_keep_literal_kind():
    fixed = parse("float f(){ return 1.5; }")
    buggy = parse("float f(){ int k = 2; return 1.5; }")
    apps = enumerate_applications(EXTENDED, fixed, build_pool(fixed, buggy))
    assert only(apps, Op.RELAXED_INLINE_CONSTANTS) == []


def _programs(n, seed):
    rng = random.Random(seed)
    return [random_program(rng, max_nodes=50) for _ in range(n)]


def test_enumeration_is_deterministic():
    for ast in _programs(30, 3):
        pool = build_pool(ast, ast)
        assert enumerate_applications(EXTENDED, ast, pool) == enumerate_applications(EXTENDED, ast, pool)


def test_every_application_changes_the_tree_and_stays_valid():
    for ast in _programs(60, 4):
        pool = build_pool(ast, ast)
        for app in enumerate_applications(EXTENDED, ast, pool) + only(
                enumerate_applications(PITEST, ast, pool), Op.VOID_METHOD_CALLS):
            node_at(ast.root, app.site)
            out = apply(app, ast)
            assert canonical_hash(out) != canonical_hash(ast)
            validate(out)
            assert canonical_hash(parse(pretty_print(out))) == canonical_hash(out)


def test_pitest_applications_are_contained_in_extended():
    for ast in _programs(60, 5):
        pool = build_pool(ast, ast)
        extended = set(enumerate_applications(EXTENDED, ast, pool))
        for app in enumerate_applications(PITEST, ast, pool):
            if app.operator is Op.VOID_METHOD_CALLS:
                twin = MutationApplication(Op.METHOD_CALLS, app.site, app.action, app.expect)
                assert twin in extended
            else:
                assert app in extended


def test_touched_size():
    ast = parse("int g(){ return 1; } void f(int a){ a++; g(); }")
    apps = enumerate_applications(EXTENDED, ast, build_pool(ast, ast))
    deletion = next(a for a in apps if a.action == "delete")
    assert touched_size(deletion, ast) == node_at(ast.root, deletion.site).size == 2
    relabel = next(a for a in apps if a.action == "relabel")
    assert touched_size(relabel, ast) == 1


def test_to_dict_is_json_ready():
    ast = parse(SECOND_ORDER_FIXED)
    for app in enumerate_applications(EXTENDED, ast, build_pool(ast, ast)):
        d = app.to_dict()
        assert d["operator"] == app.operator.value
        assert d["site"] == list(app.site)
