from __future__ import annotations

import pickle
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mutapath.minilang import (
    Ast,
    AstError,
    Node,
    NodeKind as K,
    ParseError,
    canonical_hash,
    literal_kind,
    node_at,
    parse,
    pretty_print,
    replace_at,
    tokenize,
    validate,
)
from mutapath.minilang.generate import random_program


def kinds(node: Node) -> list[str]:
    return [n.kind.value for n in node.preorder()]


def test_minimal_function_shape():
    ast = parse("int f(){ return 0; }")
    fn = ast.root.children[0]
    assert ast.root.kind is K.PROGRAM
    assert (fn.kind, fn.label) == (K.FUNCTION_DECL, "f")
    block = fn.children[-1]
    assert block.kind is K.BLOCK
    ret = block.children[0]
    assert ret.kind is K.RETURN
    assert (ret.children[0].kind, ret.children[0].label) == (K.LITERAL, "0")


def test_binary_return_shape():
    ast = parse("int f(int a){ return a + a; }")
    ret = ast.root.children[0].children[-1].children[0]
    expr = ret.children[0]
    assert (expr.kind, expr.label) == (K.BINARY_EXPR, "+")
    assert [(c.kind, c.label) for c in expr.children] == [(K.IDENTIFIER, "a")] * 2


def test_missing_return_value_is_a_parse_error():
    with pytest.raises(ParseError) as info:
        parse("int f(){ return ; }")
    err = info.value
    assert (err.line, err.column) == (1, 17)
    assert "<literal>" in err.expected and "<identifier>" in err.expected


@pytest.mark.parametrize("source", [
    "int f( { }",
    "int f() { return 1 }",
    "f() {}",
    "int f() { x = ; }",
    "int f() { if x { } }",
    "int f() { return 1; ",
    "int 9f() {}",
    'string s() { return "abc; }',
    "int f() { return 1 +; }",
    "int f() { int = 3; }",
    "void f() { return 1; }",
    "int f() { 3++; }",
    "int f() { @; }",
])
def test_malformed_sources_raise(source):
    with pytest.raises(ParseError):
        parse(source)


def test_parse_error_position_on_later_line():
    with pytest.raises(ParseError) as info:
        parse("int f() {\n  return 1\n}\n")
    assert info.value.line == 3
    assert info.value.column == 1
    assert ";" in info.value.expected


def test_comments_and_whitespace_are_discarded():
    a = parse("int f(){return 1;}")
    b = parse("// header\nint  f( ) {\n\treturn 1 ; // one\n}\n")
    assert canonical_hash(a) == canonical_hash(b)


def test_precedence_and_associativity():
    ret = parse("int f(int a, int b){ return a - b - 1 * 2; }").root.children[0].children[-1].children[0]
    top = ret.children[0]
    assert top.label == "-"
    assert top.children[0].label == "-"
    assert top.children[1].label == "*"
    cond = parse("bool g(int a){ return a < 1 || a > 2 && !true; }").root.children[0].children[-1].children[0]
    assert cond.children[0].label == "||"
    assert cond.children[0].children[1].label == "&&"


def test_all_constructs_parse():
    src = """
    void log(string s) { }
    ref nothing() { return null; }
    float half(float x) { return x / 2.0; }
    int loop(int n) {
      int i = 0;
      bool done;
      while (i < n) {
        i++;
        if (i == 3) { log("three"); } else if (i > 5) { done = true; } else { i--; }
      }
      { n = n << 1 ^ -n; }
      return n % 7;
    }
    """
    ast = parse(src)
    validate(ast)
    seen = set(kinds(ast.root))
    assert seen == {k.value for k in K}


def test_pretty_print_canonical_form():
    assert pretty_print(parse("int f(){return 0;}")) == "int f() {\n  return 0;\n}\n"


def test_pretty_print_hand_built_binary():
    root = Node(K.PROGRAM, "", [Node(K.FUNCTION_DECL, "f", [
        Node(K.TYPE_REF, "int"),
        Node(K.PARAM, "", [Node(K.TYPE_REF, "int"), Node(K.IDENTIFIER, "a")]),
        Node(K.PARAM, "", [Node(K.TYPE_REF, "int"), Node(K.IDENTIFIER, "b")]),
        Node(K.BLOCK, "", [Node(K.RETURN, "", [
            Node(K.BINARY_EXPR, "-", [Node(K.IDENTIFIER, "a"), Node(K.IDENTIFIER, "b")]),
        ])]),
    ])])
    text = pretty_print(Ast(root))
    assert "  return a - b;\n" in text.splitlines(keepends=True)


def test_pretty_print_keeps_needed_parentheses():
    src = "int f(int a, int b){ return (a - b) * -(-a); }"
    text = pretty_print(parse(src))
    assert "(a - b) * -(-a)" in text
    assert canonical_hash(parse(text)) == canonical_hash(parse(src))


def test_dangling_else_round_trips():
    src = "void f(int a){ if (a > 0) { if (a > 1) a++; } else a--; }"
    ast = parse(src)
    assert canonical_hash(parse(pretty_print(ast))) == canonical_hash(ast)


def test_round_trip_on_random_programs():
    rng = random.Random(7)
    for _ in range(1000):
        ast = random_program(rng)
        validate(ast)
        text = pretty_print(ast)
        assert canonical_hash(parse(text)) == canonical_hash(ast), text


def test_hash_is_deterministic_and_label_sensitive():
    a = parse("int f(){return 1;}")
    assert canonical_hash(a) == canonical_hash(a)
    assert canonical_hash(a) == canonical_hash(parse("int f(){return 1;}"))
    assert canonical_hash(a) != canonical_hash(parse("int f(){return 2;}"))
    assert len(canonical_hash(a)) * 8 >= 128


def test_hash_distinguishes_structure_from_labels():
    # same multiset of labels, different shape
    x = Node(K.BLOCK, "", [Node(K.BLOCK, "", [])])
    y = Node(K.BLOCK, "", [Node(K.BLOCK, ""), Node(K.BLOCK, "")])
    assert x.digest != y.digest
    assert Node(K.IDENTIFIER, "ab").digest != Node(K.IDENTIFIER, "a").digest


def test_nodes_are_immutable_and_picklable():
    ast = parse("int f(int a){ return a; }")
    with pytest.raises(AttributeError):
        ast.root.label = "x"
    clone = pickle.loads(pickle.dumps(ast))
    assert clone == ast and clone.digest == ast.digest


def test_replace_at_shares_untouched_subtrees():
    ast = parse("int f(int a){ return a; } int g(){ return 1; }")
    path = (0, 2, 0, 0)
    assert node_at(ast.root, path).label == "a"
    new_root = replace_at(ast.root, path, Node(K.IDENTIFIER, "b"))
    assert node_at(new_root, path).label == "b"
    assert new_root.children[1] is ast.root.children[1]
    assert node_at(ast.root, path).label == "a"


def test_replace_at_none_deletes():
    ast = parse("void f(){ g(); h(); }")
    block = (0, 1)
    new_root = replace_at(ast.root, block + (0,), None)
    assert [c.children[0].label for c in node_at(new_root, block).children] == ["h"]


@pytest.mark.parametrize("root", [
    Node(K.PROGRAM, "", [Node(K.LITERAL, "1")]),
    Node(K.PROGRAM, "x"),
    Node(K.BINARY_EXPR, "+", [Node(K.LITERAL, "1")]),
    Node(K.PROGRAM, "", [Node(K.FUNCTION_DECL, "f", [Node(K.TYPE_REF, "int"), Node(K.BLOCK, "", [
        Node(K.RETURN, "", [Node(K.BINARY_EXPR, "+", [Node(K.LITERAL, "1")])])])])]),
    Node(K.PROGRAM, "", [Node(K.FUNCTION_DECL, "f", [Node(K.TYPE_REF, "int"), Node(K.BLOCK, "", [
        Node(K.RETURN, "", [Node(K.IDENTIFIER, "if")])])])]),
])
def test_validate_rejects_bad_shapes(root):
    with pytest.raises(AstError):
        validate(root)


@pytest.mark.parametrize("lexeme,kind", [
    ("0", "int"), ("42", "int"), ("1.5", "float"), ("true", "bool"),
    ("false", "bool"), ('"hi"', "string"), ("null", "null"),
])
def test_literal_kind(lexeme, kind):
    assert literal_kind(lexeme) == kind


def test_tokenize_tracks_positions():
    toks = tokenize("int x;\n  x++;")
    texts = [(t.text, t.line, t.column) for t in toks if t.kind != "eof"]
    assert texts[0] == ("int", 1, 1)
    assert ("++", 2, 4) in texts


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.sampled_from(list("intfvodbr(){};=+-*/<>!&|^%\"., \n0123456789abxyreturnifelsewhile")),
               max_size=80))
def test_parser_is_total(source):
    try:
        ast = parse(source)
    except ParseError:
        return
    validate(ast)


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=60))
def test_parser_is_total_on_arbitrary_text(source):
    try:
        parse(source)
    except ParseError:
        pass


def test_deep_nesting_is_reported_not_crashing():
    src = "int f(){ return " + "(" * 5000 + "1" + ")" * 5000 + "; }"
    try:
        parse(src)
    except ParseError:
        pass
