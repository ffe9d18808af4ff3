"""Cross-validated comparison of the model against both baselines."""
from __future__ import annotations

from dataclasses import dataclass

from .baselines import fit_forest, fit_statistics, rank_forest, rank_statistical
from .diff import PatchRecord
from .errors import NotFound
from .evaluation import TOKEN_ONLY, EvalReport, first_rank, kfold, scope_line
from .lang import parse
from .model import HyperParams, predict_candidates, scoped_candidates, train
from .seeding import derive_seed

SYSTEMS = ("beep", "statistical", "forest")


@dataclass
class BugResult:
    record_id: str
    fold: int
    system: str
    scenario: str
    rank: int | None


def _rank_or_none(pred, oracle, match_mode):
    try:
        return first_rank(pred, oracle, match_mode)
    except NotFound:
        return None


def evaluate_model(params, vocab, records: list[PatchRecord], scenario: str, match_mode: str = TOKEN_ONLY):
    asts = [parse(r.buggy_src) for r in records]
    scopes = ["method" if scenario == "method" else scope_line(r, a) for r, a in zip(records, asts)]
    preds = predict_candidates([scoped_candidates(a, s) for a, s in zip(asts, scopes)], params, vocab)
    return [_rank_or_none(p, r.oracle, match_mode) for p, r in zip(preds, records)]


def evaluate_leaf_ranker(rank_fn, records: list[PatchRecord], scenario: str):
    ranks = []
    for rec in records:
        ast = parse(rec.buggy_src)
        order = rank_fn(ast)
        if scenario == "line":
            keep = set(ast.leaves_on_line(scope_line(rec, ast)))
            order = [i for i in order if i in keep]
        ranks.append(_rank_or_none(order, rec.oracle, TOKEN_ONLY))
    return ranks


def cross_validate(records: list[PatchRecord], hp: HyperParams, k: int = 10, seed: int = 0,
                   scenarios=("method", "line"), systems=SYSTEMS, match_mode: str = TOKEN_ONLY,
                   forest_trees: int = 100, forest_depth: int = 8, log_fn=None) -> list[EvalReport]:
    """Train every system on each fold's training part and rank its test part.

    Per-bug ranks are merged in fold order, so the reports do not depend on scheduling.
    """
    plan = kfold(records, k, seed)
    results: list[BugResult] = []
    for fold, train_set, test_set in plan.folds(records):
        if "beep" in systems:
            params, vocab, _ = train(train_set, hp, derive_seed(seed, f"beep-fold-{fold}"))
            for scenario in scenarios:
                ranks = evaluate_model(params, vocab, test_set, scenario, match_mode)
                results += [BugResult(r.id, fold, "beep", scenario, x) for r, x in zip(test_set, ranks)]
        if "statistical" in systems:
            table = fit_statistics(train_set)
            for scenario in scenarios:
                ranks = evaluate_leaf_ranker(lambda a: rank_statistical(a, table), test_set, scenario)
                results += [BugResult(r.id, fold, "statistical", scenario, x) for r, x in zip(test_set, ranks)]
        if "forest" in systems:
            forest = fit_forest(train_set, forest_trees, forest_depth, derive_seed(seed, f"forest-fold-{fold}"))
            for scenario in scenarios:
                ranks = evaluate_leaf_ranker(lambda a: rank_forest(a, forest), test_set, scenario)
                results += [BugResult(r.id, fold, "forest", scenario, x) for r, x in zip(test_set, ranks)]
        if log_fn is not None:
            log_fn(fold, results)
    reports = []
    for system in systems:
        for scenario in scenarios:
            ranks = [b.rank for b in results if b.system == system and b.scenario == scenario]
            mode = match_mode if system == "beep" else TOKEN_ONLY
            reports.append(EvalReport.from_ranks(ranks, scenario, system, mode))
    return reports
