import itertools
import json
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixloc.diff import ChangeOperator, enumerate_operation_paths, extract_oracle
from fixloc.errors import NoCandidates, UnassessedOutcome, ValidatorFailure
from fixloc.lang import parse
from fixloc.mutation import UPDATE_KINDS
from fixloc.repair import (
    CommandValidator, Correctness, OracleValidator, RepairOutcome, Status, apply_edits, candidate_tokens,
    _options, correctness_ratio, generate_and_validate, oracle_ranking, schedule, write_outcomes,
)


def path_for(src, token, operator=ChangeOperator.UPDATE):
    ast = parse(src)
    op = next(o for o in enumerate_operation_paths(ast) if o.token == token and o.operator is operator)
    return op, ast


def test_candidate_tokens_examples():
    assert candidate_tokens(*path_for("boolean f(int a) { return a == 0; }", "==")) == ["!=", "<", "<=", ">", ">="]
    assert candidate_tokens(*path_for("boolean f() { return true; }", "true")) == ["false"]
    assert candidate_tokens(*path_for("int f() { return 0; }", "int")) == ["long", "float", "double", "boolean", "char"]
    assert candidate_tokens(*path_for("int f(int a) { return a * 2; }", "*")) == ["+", "-", "/", "%"]


def test_string_literal_has_no_candidates():
    with pytest.raises(NoCandidates):
        candidate_tokens(*path_for('String f() { return "x"; }', '"x"'))


def test_identifier_candidates_are_nearest_same_type_first():
    src = "int f(int a, int b, long c) { int d = a; return d + b; }"
    op, ast = path_for(src, "b")
    op = [o for o in enumerate_operation_paths(ast)
          if o.token == "b" and o.operator is ChangeOperator.UPDATE and o.leaf_index > 10][0]
    tokens = candidate_tokens(op, ast)
    assert tokens == ["d", "a", "c"]  # same-typed names by distance, then the long


def brute_schedule(n, width):
    m = min(n, width)
    out = [(i,) for i in range(1, m + 1)]
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            out.append((i, j))
    return out


def test_schedule_sizes():
    assert list(schedule(range(3), 3)) == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]
    assert len(list(schedule(range(50), 20))) == 210
    assert len(list(schedule(range(5), 20))) == 15


@given(st.integers(0, 40), st.integers(1, 25))
def test_schedule_matches_brute_force(n, width):
    assert list(schedule(range(n), width)) == brute_schedule(n, width)


def test_apply_edits_rejects_overlap():
    from fixloc.repair import SourceEdit
    assert apply_edits("abcdef", [SourceEdit(1, 3, "X"), SourceEdit(4, 5, "Y")]) == "aXdYf"
    assert apply_edits("abcdef", [SourceEdit(1, 3, "X"), SourceEdit(2, 4, "Y")]) is None


def repair(buggy, fixed, validator=None):
    oracle = extract_oracle(buggy, fixed)
    return generate_and_validate(buggy, oracle_ranking(buggy, oracle), validator or OracleValidator(fixed))


def test_npc_examples():
    out = repair("boolean f() { return true; }", "boolean f() { return false; }")
    assert (out.status, out.npc, out.correctness) == (Status.Plausible, 1, Correctness.Correct)
    assert out.patch.patched_src == "boolean f() { return false; }"
    out = repair("boolean f(int a) { return a == 0; }", "boolean f(int a) { return a != 0; }")
    assert out.npc == 1 and out.patch.origin_ranks == [1]


def test_path_without_candidates_costs_nothing():
    buggy = 'String f() { return "x" + "y"; }'
    ast = parse(buggy)
    cands = enumerate_operation_paths(ast)
    string_update = next(o for o in cands if o.token == '"x"' and o.operator is ChangeOperator.UPDATE)
    plus = next(o for o in cands if o.token == "+" and o.operator is ChangeOperator.UPDATE)
    out = generate_and_validate(buggy, [string_update, plus], OracleValidator('String f() { return "x" - "y"; }'))
    assert out.status is Status.Plausible and out.npc == 1  # the string path is skipped, "-" is tried first
    assert out.patch.origin_ranks == [2]


class Counting:
    assesses = False

    def __init__(self, answer):
        self.answer = answer
        self.calls = 0
        self.seen = []

    def __call__(self, src):
        self.calls += 1
        self.seen.append(src)
        return src == self.answer


def test_npc_counts_validator_calls(small_corpus):
    for rec in small_corpus[:40]:
        ranking = oracle_ranking(rec.buggy_src, []) if rec.id.endswith("0") else oracle_ranking(rec.buggy_src, rec.oracle)
        fixed_tokens = parse(rec.fixed_src).tokens
        counter = Counting(None)
        oracle = OracleValidator(rec.fixed_src)

        def check(src, counter=counter):
            counter(src)
            return oracle(src)

        out = generate_and_validate(rec.buggy_src, ranking, check)
        assert out.npc == counter.calls
        assert len(set(counter.seen)) == len(counter.seen)  # duplicates are never re-validated
        if out.status is Status.Plausible:
            assert parse(out.patch.patched_src).tokens == fixed_tokens
        assert out.correctness is Correctness.Unassessed  # a bare function does not assess


def test_correctness_ratio_examples():
    ok = RepairOutcome(Status.Plausible, 1, None, Correctness.Correct)
    bad = RepairOutcome(Status.Plausible, 3, None, Correctness.Overfitting)
    miss = RepairOutcome(Status.Exhausted, 40)
    assert correctness_ratio([ok, ok, ok, bad, miss]) == 0.75
    assert correctness_ratio([miss, miss]) is None
    assert correctness_ratio([]) is None
    with pytest.raises(UnassessedOutcome):
        correctness_ratio([ok, RepairOutcome(Status.Plausible, 2)])


def test_correctness_ratio_hand_labelled():
    # 10 cases: 6 plausible (4 correct, 2 overfitting), 4 exhausted
    labels = "CCOXCXOCXX"
    outcomes = []
    for c in labels:
        if c == "X":
            outcomes.append(RepairOutcome(Status.Exhausted, 10))
        else:
            outcomes.append(RepairOutcome(Status.Plausible, 1, None,
                                          Correctness.Correct if c == "C" else Correctness.Overfitting))
    assert correctness_ratio(outcomes) == pytest.approx(4 / 6)


def test_command_validator(tmp_path):
    checker = tmp_path / "check.py"
    checker.write_text("import sys\nsys.exit(0 if 'false' in open(sys.argv[1]).read() else 1)\n")
    validator = CommandValidator(f"{sys.executable} {checker} {{patched}}")
    out = generate_and_validate("boolean f() { return true; }",
                                oracle_ranking("boolean f() { return true; }",
                                               extract_oracle("boolean f() { return true; }",
                                                              "boolean f() { return false; }")),
                                validator)
    assert out.status is Status.Plausible and out.correctness is Correctness.Unassessed
    with pytest.raises(ValidatorFailure):
        CommandValidator("true")
    with pytest.raises(ValidatorFailure):
        CommandValidator("/no/such/binary {patched}")("int f() { return 0; }")


def test_repair_is_deterministic(small_corpus, tmp_path):
    rec = small_corpus[3]
    outs = [repair(rec.buggy_src, rec.fixed_src) for _ in range(2)]
    assert outs[0].to_json() == outs[1].to_json()
    write_outcomes(tmp_path / "o.jsonl", outs)
    lines = (tmp_path / "o.jsonl").read_text().splitlines()
    assert lines[0] == lines[1] and json.loads(lines[0])["status"] in ("Plausible", "Exhausted")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 299))
def test_search_stays_inside_the_top_20(small_corpus, i):
    """A validator that never passes sees at most the edits scheduled over the first 20 ranks."""
    rec = small_corpus[i]
    ast = parse(rec.buggy_src)
    ranking = oracle_ranking(rec.buggy_src, rec.oracle)
    sizes = []
    for op in ranking.ops[:20]:
        try:
            sizes.append(len(_options(op, ast)))
        except NoCandidates:
            sizes.append(0)
    bound = sum(sizes) + sum(a * b for a, b in itertools.combinations(sizes, 2))
    counter = Counting(None)
    out = generate_and_validate(rec.buggy_src, ranking, counter)
    assert out.status is Status.Exhausted and out.patch is None
    assert out.npc == counter.calls == len(set(counter.seen)) <= bound
    assert rec.buggy_src not in counter.seen


def test_update_mutants_repair_with_perfect_ranking(small_corpus):
    recs = [r for r in small_corpus if r.mutation_kind in UPDATE_KINDS]
    outs = [repair(r.buggy_src, r.fixed_src) for r in recs]
    assert all(o.status is Status.Plausible for o in outs)
    assert correctness_ratio(outs) == 1.0
