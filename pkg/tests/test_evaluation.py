import json
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixloc.diff import ChangeOperator, PatchRecord, enumerate_operation_paths, extract_oracle
from fixloc.errors import NotFound, TooFewRecords
from fixloc.evaluation import (
    TOKEN_AND_OPERATOR, TOKEN_ONLY, TOP_N, EvalReport, dedup, effort_stats, first_rank, format_table, kfold,
    mfr, recall_at_k, scope_line,
)
from fixloc.lang import is_language_keyword, parse, tokenize

BASE = "int f(int a) { return a + 1; }"
FIX = "int f(int a) { return a - 1; }"


def rec(rid, buggy=BASE, fixed=FIX):
    return PatchRecord(rid, buggy, fixed, extract_oracle(buggy, fixed))


def test_dedup_hand_filtered():
    records = [
        rec("a"),
        rec("b"),                                                    # byte-identical to a
        rec("c", "int f(int a) {\n  return a + 1;\n}"),              # whitespace variant of a
        rec("d", BASE, "int f(int a) { return a * 1; }"),            # different fix
        rec("e#test"),                                               # test code
        rec("f#test", "int g() { return 0; }", "int g() { return 1; }"),
        rec("g", "int g() { return 0; }", "int g() { return 1; }"),
        rec("h", "int g()  {  return 0; }", "int g() { return 1; }"),  # whitespace variant of g
        rec("i", "int g() { return 0; }", "int g() { return 2; }"),
        rec("test_j", BASE, "int f(int a) { return a / 1; }"),      # only the suffix marks test code
    ]
    assert [r.id for r in dedup(records)] == ["a", "d", "g", "i", "test_j"]
    assert dedup([]) == []


def ops_for(src):
    return enumerate_operation_paths(parse(src))


def test_first_rank_examples():
    cands = ops_for(BASE)
    assert first_rank(cands, [cands[0]], TOKEN_AND_OPERATOR) == 1
    assert first_rank(cands, [cands[8], cands[3]], TOKEN_AND_OPERATOR) == 4
    # token_only walks distinct leaves: leaf 2 is the third distinct leaf
    assert first_rank(cands, [cands[7]], TOKEN_ONLY) == 3
    with pytest.raises(NotFound) as info:
        first_rank(cands[:3], [cands[10]], TOKEN_AND_OPERATOR)
    assert info.value.rank == 4


def test_token_only_ignores_operator():
    cands = ops_for(BASE)
    wrong_op = [c for c in cands if c.leaf_index == 5 and c.operator is ChangeOperator.DELETE]
    oracle = [c for c in cands if c.leaf_index == 5 and c.operator is ChangeOperator.UPDATE]
    ranked = wrong_op + [c for c in cands if c not in wrong_op]
    assert first_rank(ranked, oracle, TOKEN_ONLY) == 1
    assert first_rank(ranked, oracle, TOKEN_AND_OPERATOR) > 1


def brute_first_rank(ranked, oracle, mode):
    seen, rank = [], 0
    for op in ranked:
        unit = (op.leaf_index, op.operator) if mode == TOKEN_AND_OPERATOR else op.leaf_index
        if unit in seen:
            continue
        seen.append(unit)
        rank += 1
        for o in oracle:
            if (mode == TOKEN_ONLY and o.leaf_index == op.leaf_index) or o == op:
                return rank
    return None


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from([TOKEN_ONLY, TOKEN_AND_OPERATOR]))
def test_first_rank_matches_linear_scan(rnd, mode):
    cands = ops_for(BASE)
    ranked = rnd.sample(cands, rnd.randint(1, len(cands)))
    oracle = rnd.sample(cands, rnd.randint(1, 2))
    expected = brute_first_rank(ranked, oracle, mode)
    if expected is None:
        with pytest.raises(NotFound):
            first_rank(ranked, oracle, mode)
    else:
        assert first_rank(ranked, oracle, mode) == expected


def test_recall_and_mfr_examples():
    assert recall_at_k([1, 2, 9], 5) == pytest.approx(2 / 3)
    assert recall_at_k([1, 2, 9], 9) == 1.0
    assert recall_at_k([1, 2], 1, n_total=4) == 0.25
    assert mfr([1, 2, 9]) == 4.0
    assert mfr([1] * 7) == 1.0
    with pytest.raises(ValueError):
        recall_at_k([1], 0)
    with pytest.raises(ValueError):
        mfr([])


@given(st.lists(st.integers(1, 60), min_size=1, max_size=50))
def test_metric_properties(ranks):
    recalls = [recall_at_k(ranks, k) for k in range(1, 62)]
    assert recalls == sorted(recalls)
    assert mfr(ranks) == pytest.approx(sum(ranks) / len(ranks))
    assert mfr(sorted(ranks)) == pytest.approx(mfr(ranks))
    assert mfr(ranks[:1]) == ranks[0]


def test_report_handles_misses():
    report = EvalReport.from_ranks([1, None, 3, 12], "line")
    assert report.n_bugs == 4 and report.n_not_found == 1
    assert report.recall_at[1] == 0.25 and report.recall_at[3] == 0.5 and report.recall_at[20] == 0.75
    assert report.mfr == pytest.approx(16 / 3)
    assert report.per_bug_first_rank == [1, 3, 12]
    assert list(report.recall_at) == list(TOP_N)
    back = EvalReport.from_json(json.loads(json.dumps(report.to_json())))
    assert back == report
    table = format_table([report])
    assert "Top-20" in table and "5.33" in table


def test_kfold_partition():
    records = [rec(f"r{i}") for i in range(20)]
    plan = kfold(records, 10, seed=4)
    tests = [t for _, _, t in plan.folds(records)]
    assert all(len(t) == 2 for t in tests)
    ids = [r.id for t in tests for r in t]
    assert sorted(ids) == sorted(r.id for r in records)
    for f, train, test in plan.folds(records):
        assert not {r.id for r in train} & {r.id for r in test}
    assert kfold(records, 10, seed=4).assignments == plan.assignments
    assert kfold(records, 10, seed=5).assignments != plan.assignments
    sizes = np.bincount(list(kfold(records[:17], 10, 0).assignments.values()))
    assert sizes.max() - sizes.min() <= 1
    with pytest.raises(TooFewRecords):
        kfold(records[:5], 10)


def independent_count(src, line=None):
    skip = set("(){};,.")
    return sum(1 for t in tokenize(src) if t.kind != "EOF" and t.text not in skip
               and not is_language_keyword(t.text) and (line is None or t.line == line))


def test_effort_stats_smallest_method():
    stats = effort_stats([rec("x", "int f(){return 0;}", "int f(){return 1;}")])
    assert stats["method"]["median"] == 2


def test_effort_stats_match_hand_counter(small_corpus):
    records = small_corpus[:50]
    stats = effort_stats(records)
    methods = [independent_count(r.buggy_src) for r in records]
    lines = [independent_count(r.buggy_src, scope_line(r)) for r in records]
    assert stats["method"]["median"] == statistics.median(methods)
    assert stats["line"]["median"] == statistics.median(lines)
    assert stats["method"]["min"] == min(methods) and stats["method"]["max"] == max(methods)


def test_scope_line_uses_leaf_line():
    r = rec("m", "int f(int a) {\n    int b = a;\n    return b + 1;\n}",
            "int f(int a) {\n    int b = a;\n    return b - 1;\n}")
    assert scope_line(r) == 3
