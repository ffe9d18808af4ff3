import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixloc.lang import (
    LEAF_KINDS, MiniSyntaxError, NodeKind, ast_paths, is_language_keyword, parse, render, split_subtokens,
    tokenize, truncate_kinds,
)
from fixloc.lang.symbols import declarations, visible_at

from .conftest import FORMAT_EXCERPT

K = NodeKind


def test_smallest_method_tree():
    ast = parse("int f() { return 0; }")
    assert ast.structure() == (
        "MethodDeclaration", "", (
            ("TypeName", "int", ()),
            ("SimpleName", "f", ()),
            ("Block", "", (("ReturnStatement", "", (("NumberLiteral", "0", ()),)),)),
        ),
    )
    # punctuation and the return keyword are not leaves
    assert ast.tokens == ["int", "f", "0"]


def test_hand_parsed_leaf_order():
    ast = parse("void g(int x) { if (x < 0) { x = 0; } }")
    assert ast.tokens == ["void", "g", "int", "x", "x", "<", "0", "x", "=", "0"]
    assert [leaf.kind for leaf in ast.leaves] == [
        K.TypeName, K.SimpleName, K.TypeName, K.SimpleName, K.SimpleName, K.Operator,
        K.NumberLiteral, K.SimpleName, K.Operator, K.NumberLiteral,
    ]


def test_missing_expression_reports_position():
    with pytest.raises(MiniSyntaxError) as info:
        parse("int f() { return ; }")
    assert (info.value.line, info.value.col) == (1, 18)


@pytest.mark.parametrize("src", [
    "int f() { return 0 }",
    "int f( { return 0; }",
    "int f() { return 0; } extra",
    "int f() { 1 = x; }",
    "int f() { return @; }",
])
def test_syntax_errors(src):
    with pytest.raises(MiniSyntaxError):
        parse(src)


def test_nested_if_path_for_buggy_operator():
    ast = parse(FORMAT_EXCERPT)
    (lt,) = [p for p in ast_paths(ast) if ast.leaves[p.leaf_index].token == "<"]
    assert lt.kinds == (K.MethodDeclaration, K.Block, K.IfStatement, K.IfStatement, K.InfixExpression,
                        K.InfixExpression, K.InfixExpression, K.Operator)


def test_logical_operators_nest_to_the_right_and_others_to_the_left():
    ast = parse("boolean f(int a) { return a < 1 && a < 2 && a < 3; }")
    ret = ast.root.children[-1].children[0].children[0]
    assert ret.children[1].token == "&&"
    assert ret.children[2].kind is K.InfixExpression and ret.children[2].children[1].token == "&&"
    ast = parse("int f(int a) { return a - 1 - 2; }")
    ret = ast.root.children[-1].children[0].children[0]
    assert ret.children[0].kind is K.InfixExpression and ret.children[2].token == "2"


def test_smallest_method_paths():
    paths = ast_paths(parse("int f() { return 0; }"))
    assert len(paths) == 3
    assert paths[-1].kinds == (K.MethodDeclaration, K.Block, K.ReturnStatement, K.NumberLiteral)


def test_path_count_matches_independent_leaf_walk(small_corpus):
    for rec in small_corpus[:100]:
        ast = parse(rec.buggy_src)
        walked = [n for n in ast.root.walk() if not n.children and n.kind in LEAF_KINDS]
        assert len(ast_paths(ast)) == len(walked)
        assert [p.leaf_index for p in ast_paths(ast)] == list(range(len(walked)))


def test_paths_are_root_to_leaf_chains(small_corpus):
    for rec in small_corpus[:50]:
        ast = parse(rec.buggy_src)
        for p in ast_paths(ast):
            assert p.kinds[0] is K.MethodDeclaration and p.kinds[-1].is_leaf and len(p.kinds) >= 2
            chain, node = [], ast.leaves[p.leaf_index]
            while node is not None:
                chain.append(node.kind)
                node = node.parent
            assert tuple(reversed(chain)) == p.kinds


def test_truncation_keeps_leaf_end():
    kinds = tuple(range(20))
    assert truncate_kinds(kinds, 15) == tuple(range(5, 20))
    assert truncate_kinds(kinds[:4], 15) == kinds[:4]


@pytest.mark.parametrize("token,parts", [
    ("getFooBar", ["get", "foo", "bar"]),
    ("max_value", ["max", "value"]),
    ("sourceExcerpt", ["source", "excerpt"]),
    ("utf8Name", ["utf8", "name"]),
    ("x", ["x"]),
    ("URL", ["url"]),
    ("_", ["_"]),
])
def test_split_subtokens(token, parts):
    assert split_subtokens(token) == parts


identifiers = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,12}", fullmatch=True)


@given(identifiers)
def test_split_is_idempotent_on_joined_output(token):
    parts = split_subtokens(token)
    assert parts and all(p == p.lower() and "_" not in p for p in parts)
    assert split_subtokens("_".join(parts)) == parts


@pytest.mark.parametrize("token,expected", [("if", True), ("counter", False), ("Int", False), ("null", True)])
def test_keywords(token, expected):
    assert is_language_keyword(token) is expected


def test_leaf_positions_strictly_increase(small_corpus):
    for rec in small_corpus[:100]:
        starts = [leaf.start for leaf in parse(rec.buggy_src).leaves]
        assert starts == sorted(set(starts))


def test_round_trip_on_corpus(small_corpus):
    for rec in small_corpus:
        for src in (rec.buggy_src, rec.fixed_src):
            ast = parse(src)
            assert parse(render(ast)).structure() == ast.structure()


def test_round_trip_keeps_dangling_else_and_parentheses():
    src = "int f(int a) { if (a > 0) if (a > 1) return 1; else return 2; return (a + 1) * 2; }"
    ast = parse(src)
    assert parse(render(ast)).structure() == ast.structure()


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_round_trip_on_generated_expressions(data):
    names = ["a", "b", "count"]
    leaf = st.one_of(st.sampled_from(names), st.integers(0, 99).map(str), st.sampled_from(["true", "false"]))
    expr = st.recursive(leaf, lambda inner: st.one_of(
        st.tuples(inner, st.sampled_from(["+", "-", "*", "<", "==", "&&", "||", "&"]), inner).map(
            lambda t: f"{t[0]} {t[1]} {t[2]}"),
        inner.map(lambda e: f"({e})"),
        inner.map(lambda e: f"!{e}"),
        st.lists(inner, max_size=3).map(lambda args: f"a.call({', '.join(args)})"),
    ), max_leaves=8)
    src = f"int f(int a, int b, int count) {{ return {data.draw(expr)}; }}"
    ast = parse(src)
    assert parse(render(ast)).structure() == ast.structure()


def test_tokenizer_skips_comments():
    toks = [t.text for t in tokenize("int /* c */ f() { // x\n return 0; }")]
    assert toks[:3] == ["int", "f", "("]


def test_scope_aware_declarations():
    ast = parse("int f(int a) { int b = a; { long c = b; } return b; }")
    decls = {d.name: d for d in declarations(ast)}
    assert decls["a"].type == "int" and decls["c"].type == "long"
    last_b = max(i for i, leaf in enumerate(ast.leaves) if leaf.token == "b")
    assert set(visible_at(ast, last_b)) == {"a", "b"}
