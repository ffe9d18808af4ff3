import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixloc.baselines import (
    BugProbTable, Forest, best_split, feature_matrix, fit_forest, fit_forest_arrays, fit_statistics, gini,
    rank_forest, rank_statistical, token_features,
)
from fixloc.diff import PatchRecord, extract_oracle
from fixloc.errors import DegenerateLabels, EmptyDataset
from fixloc.lang import NodeKind, parse

K = NodeKind


def record(rid, buggy, fixed):
    return PatchRecord(rid, buggy, fixed, extract_oracle(buggy, fixed))


HAND_CORPUS = [
    record("r1", "int f(int a) { return a + 1; }", "int f(int a) { return a - 1; }"),
    record("r2", "boolean g(boolean b) { return b && true; }", "boolean g(boolean b) { return b && false; }"),
    record("r3", "int h(int x) { int y = x; return y; }", "int h(int x) { long y = x; return y; }"),
]


def test_hand_counted_table():
    table = fit_statistics(HAND_CORPUS)
    assert table.total[K.TypeName] == 7 and table.buggy[K.TypeName] == 1
    assert table.total[K.SimpleName] == 11
    assert table.prob(K.TypeName) == 1 / 7
    assert table.prob(K.Operator) == 1 / 3
    assert table.prob(K.BooleanLiteral) == 1.0
    assert table.prob(K.SimpleName) == 0.0
    assert table.prob(K.NumberLiteral) == 0.0
    assert table.prob(K.Modifier) == 0.0  # never seen
    assert all(0.0 <= p <= 1.0 for p in table.probs.values())


def test_operator_bugs_dominate(small_corpus):
    from fixloc.mutation import MutationKind
    ops = [r for r in small_corpus if r.mutation_kind is MutationKind.OperatorSwap]
    table = fit_statistics(ops)
    assert table.prob(K.Operator) == max(table.probs.values()) > 0


def test_statistical_ranking_rules():
    table = BugProbTable({k: 0.5 for k in NodeKind})
    ast = parse("int f(int a) { return a + 1; }")
    assert rank_statistical(ast, table) == list(range(len(ast.leaves)))
    table = BugProbTable({K.Operator: 0.9, K.SimpleName: 0.2})
    assert rank_statistical(ast, table)[0] == 5


def brute_force_rank(scores):
    """Selection sort: repeatedly take the earliest leaf with the highest remaining score."""
    left = list(range(len(scores)))
    out = []
    while left:
        best = left[0]
        for i in left[1:]:
            if scores[i] > scores[best]:
                best = i
        out.append(best)
        left.remove(best)
    return out


def test_ten_leaf_ranking_matches_brute_force():
    ast = parse("int f(int a) { a = a + 1; return a; }")
    assert len(ast.leaves) == 10
    table = fit_statistics(HAND_CORPUS)
    scores = [table.prob(leaf.kind) for leaf in ast.leaves]
    assert rank_statistical(ast, table) == brute_force_rank(scores)


def test_table_json_round_trip():
    table = fit_statistics(HAND_CORPUS)
    back = BugProbTable.from_json(json.loads(table.dumps()))
    assert back == table
    assert json.loads(table.dumps())["version"] == 1


def test_empty_training_set():
    with pytest.raises(EmptyDataset):
        fit_statistics([])
    with pytest.raises(EmptyDataset):
        fit_forest([])


def test_token_features():
    ast = parse("void run() { counter.max_value = 0; }")
    feats = token_features(ast)
    by_token = {ast.leaves[i].token: f for i, f in enumerate(feats)}
    assert by_token["max_value"].num_subtokens == 2
    assert by_token["max_value"].token_length == 9
    assert by_token["max_value"].statement_type is K.ExpressionStatement
    assert by_token["void"].statement_type is K.MethodDeclaration
    assert [f.token_rank for f in feats] == list(range(len(feats)))
    assert feature_matrix(ast).shape == (len(feats), 4)


def test_gini_values():
    assert gini(0, 4) == 0.0 and gini(2, 4) == 0.5 and gini(1, 4) == 0.375


EIGHT_X = np.array([[1, 0], [2, 1], [3, 0], [4, 1], [5, 0], [6, 1], [7, 0], [8, 1]], dtype=float)
EIGHT_Y = np.array([0, 0, 1, 0, 1, 1, 1, 1], dtype=float)


def test_hand_computed_best_split():
    # cuts after rows 1..7 score 0.357, 0.208, 0.367, 0.1875, 0.3, ... ; the parity category scores 0.4375
    score, thr = best_split(EIGHT_X[:, 0], EIGHT_Y, categorical=False)
    assert (score, thr) == (pytest.approx(0.1875), 4.5)
    score_c, _ = best_split(EIGHT_X[:, 1], EIGHT_Y, categorical=True)
    assert score_c == pytest.approx(0.4375)
    forest = fit_forest_arrays(EIGHT_X, EIGHT_Y, n_trees=1, max_depth=1, bootstrap=False, max_features=2)
    tree = forest.trees[0]
    assert (tree.feature[0], tree.threshold[0]) == (0, 4.5)
    np.testing.assert_allclose(forest.predict_proba(EIGHT_X), [0.25] * 4 + [1.0] * 4)


def test_depth_zero_predicts_base_rate():
    forest = fit_forest_arrays(EIGHT_X, EIGHT_Y, n_trees=3, max_depth=0, bootstrap=False)
    np.testing.assert_allclose(forest.predict_proba(EIGHT_X), EIGHT_Y.mean())


def test_separable_features_fit_exactly():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(60, 4))
    y = (X[:, 2] > 0.1).astype(float)
    forest = fit_forest_arrays(X, y, n_trees=15, max_depth=6, seed=1, max_features=4)
    assert np.mean((forest.predict_proba(X) > 0.5) == (y > 0)) == 1.0


def test_degenerate_labels():
    with pytest.raises(DegenerateLabels):
        fit_forest_arrays(EIGHT_X, np.zeros(8))


def test_forest_deterministic_and_serialisable(small_corpus):
    a = fit_forest(small_corpus[:40], n_trees=5, max_depth=4, seed=3)
    b = fit_forest(small_corpus[:40], n_trees=5, max_depth=4, seed=3)
    assert a.dumps() == b.dumps()
    back = Forest.from_json(json.loads(a.dumps()))
    X = feature_matrix(parse(small_corpus[50].buggy_src))
    np.testing.assert_array_equal(back.predict_proba(X), a.predict_proba(X))
    probs = a.predict_proba(X)
    assert np.all((probs >= 0) & (probs <= 1))


def test_forest_ranking_matches_brute_force(small_corpus):
    forest = fit_forest(small_corpus[:40], n_trees=5, max_depth=4, seed=3)
    ast = parse("int f(int a) { a = a + 1; return a; }")
    scores = forest.predict_proba(feature_matrix(ast)).tolist()
    assert rank_forest(ast, forest) == brute_force_rank(scores)
    flat = Forest(forest.trees[:1], 1, 0, 0)
    flat.trees[0] = fit_forest_arrays(EIGHT_X, EIGHT_Y, 1, 0).trees[0]  # constant tree
    assert rank_forest(ast, flat) == list(range(10))


_forest = None


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 299))
def test_rankings_are_permutations(small_corpus, i):
    global _forest
    if _forest is None:
        _forest = (fit_statistics(small_corpus[:100]), fit_forest(small_corpus[:100], 5, 4, 0))
    table, forest = _forest
    ast = parse(small_corpus[i].buggy_src)
    for ranking in (rank_statistical(ast, table), rank_forest(ast, forest)):
        assert sorted(ranking) == list(range(len(ast.leaves)))
