"""Localization metrics, k-fold cross-validation, dataset hygiene and scenario control."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .diff import OperationPath, PatchRecord
from .errors import NotFound, TooFewRecords
from .lang import is_language_keyword, parse

TOP_N = (1, 3, 5, 10, 20)
TOKEN_ONLY = "token_only"
TOKEN_AND_OPERATOR = "token_and_operator"
SCENARIOS = ("method", "line")


# dataset hygiene


def normalise_ws(src: str) -> str:
    return " ".join(src.split())


def dedup(records: list[PatchRecord]) -> list[PatchRecord]:
    """Drop test-code records (id ending in "#test") and whitespace-insensitive duplicates."""
    seen, out = set(), []
    for rec in records:
        if rec.id.endswith("#test"):
            continue
        key = (normalise_ws(rec.buggy_src), normalise_ws(rec.fixed_src))
        if key in seen:
            continue
        seen.add(key)
        out.append(rec)
    return out


# metrics


def _ranked_units(pred, match_mode: str) -> list:
    """The ranked sequence the metric walks: operation paths, or distinct leaves for token_only."""
    ops = pred.ops if hasattr(pred, "ops") else list(pred)
    if match_mode == TOKEN_AND_OPERATOR:
        return [(op.leaf_index, op.operator) for op in ops]
    if match_mode != TOKEN_ONLY:
        raise ValueError(f"unknown match mode {match_mode!r}")
    units, seen = [], set()
    for op in ops:
        leaf = op.leaf_index if isinstance(op, OperationPath) else int(op)
        if leaf not in seen:
            seen.add(leaf)
            units.append(leaf)
    return units


def first_rank(pred, oracle: list[OperationPath], match_mode: str = TOKEN_ONLY) -> int:
    """1-based rank of the first entry matching an oracle element.

    ``pred`` is a RankedPrediction, a list of OperationPaths, or a list of leaf indices
    (token_only only). Under token_only the list is read as its sequence of distinct
    leaves. Raises NotFound (carrying rank = len + 1) when nothing matches.
    """
    units = _ranked_units(pred, match_mode)
    if not units:
        raise ValueError("empty prediction")
    if match_mode == TOKEN_AND_OPERATOR:
        wanted = {(op.leaf_index, op.operator) for op in oracle}
    else:
        wanted = {op.leaf_index for op in oracle}
    for rank, unit in enumerate(units, start=1):
        if unit in wanted:
            return rank
    raise NotFound(len(units) + 1)


def recall_at_k(first_ranks, k: int, n_total: int | None = None) -> float:
    """Fraction of bugs whose first rank is <= k; misses counted via ``n_total``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ranks = list(first_ranks)
    total = len(ranks) if n_total is None else n_total
    if total == 0:
        return 0.0
    return sum(1 for r in ranks if r <= k) / total


def mfr(first_ranks) -> float:
    ranks = list(first_ranks)
    if not ranks:
        raise ValueError("mfr of an empty rank list")
    return float(np.mean(ranks))


@dataclass
class EvalReport:
    recall_at: dict[int, float]
    mfr: float
    n_bugs: int
    scenario: str
    per_bug_first_rank: list[int]
    n_not_found: int = 0
    system: str = "beep"
    match_mode: str = TOKEN_ONLY

    @classmethod
    def from_ranks(cls, ranks: list[int | None], scenario: str, system: str = "beep",
                   match_mode: str = TOKEN_ONLY) -> EvalReport:
        """Build a report; ``None`` marks a bug with no matching candidate."""
        found = [r for r in ranks if r is not None]
        recall = {n: recall_at_k(found, n, len(ranks)) for n in TOP_N}
        return cls(recall, mfr(found) if found else float("nan"), len(ranks), scenario, found,
                   len(ranks) - len(found), system, match_mode)

    def to_json(self) -> dict:
        return {
            "system": self.system, "scenario": self.scenario, "match_mode": self.match_mode,
            "n_bugs": self.n_bugs, "n_not_found": self.n_not_found,
            "recall_at": {str(k): v for k, v in self.recall_at.items()}, "mfr": self.mfr,
            "per_bug_first_rank": self.per_bug_first_rank,
        }

    @classmethod
    def from_json(cls, obj: dict) -> EvalReport:
        return cls({int(k): v for k, v in obj["recall_at"].items()}, obj["mfr"], obj["n_bugs"], obj["scenario"],
                   list(obj["per_bug_first_rank"]), obj.get("n_not_found", 0), obj.get("system", "beep"),
                   obj.get("match_mode", TOKEN_ONLY))


def format_table(reports: list[EvalReport]) -> str:
    """Aligned plain-text table: one row per (system, scenario)."""
    header = ["system", "scenario"] + [f"Top-{n}" for n in TOP_N] + ["MFR", "bugs"]
    rows = [header]
    for r in reports:
        rows.append([r.system, r.scenario] + [f"{100 * r.recall_at[n]:.1f}%" for n in TOP_N]
                    + [f"{r.mfr:.2f}", str(r.n_bugs)])
    widths = [max(len(row[c]) for row in rows) for c in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        cells = [cell.ljust(w) if c < 2 else cell.rjust(w) for c, (cell, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def reports_to_json(reports: list[EvalReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2, sort_keys=True) + "\n"


# cross-validation


@dataclass
class FoldPlan:
    k: int
    assignments: dict[str, int]
    seed: int
    order: list[str] = field(default_factory=list)

    def folds(self, records: list[PatchRecord]):
        """Yield (fold index, train records, test records) in fold order."""
        for f in range(self.k):
            train = [r for r in records if self.assignments[r.id] != f]
            test = [r for r in records if self.assignments[r.id] == f]
            yield f, train, test


def kfold(records: list[PatchRecord], k: int = 10, seed: int = 0) -> FoldPlan:
    """Seeded shuffle, then round-robin fold assignment."""
    if len(records) < k:
        raise TooFewRecords(f"{len(records)} records cannot fill {k} folds")
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise ValueError("record ids must be unique for fold assignment")
    perm = np.random.default_rng(seed).permutation(len(records))
    assignments = {ids[int(p)]: pos % k for pos, p in enumerate(perm)}
    return FoldPlan(k, assignments, seed, [ids[int(p)] for p in perm])


# scenario helpers


def scope_line(record: PatchRecord, ast=None) -> int:
    """Line of the buggy element: the source line of the first oracle leaf."""
    ast = ast or parse(record.buggy_src)
    return ast.leaves[min(op.leaf_index for op in record.oracle)].line


def leaves_in_scope(ast, scenario: str, line: int | None) -> list[int]:
    if scenario == "method":
        return list(range(len(ast.leaves)))
    return ast.leaves_on_line(line)


# effort statistics


def _summary(values: list[int]) -> dict:
    if not values:
        return {"n": 0}
    arr = np.asarray(values, dtype=np.float64)
    q1, med, q3 = np.percentile(arr, [25, 50, 75])
    return {"n": len(values), "min": float(arr.min()), "q1": float(q1), "median": float(med),
            "q3": float(q3), "max": float(arr.max())}


def count_code_tokens(tokens) -> int:
    return sum(1 for t in tokens if not is_language_keyword(t))


def effort_stats(records: list[PatchRecord]) -> dict:
    """Non-keyword token counts per buggy method and per buggy line."""
    per_method, per_line = [], []
    for rec in records:
        ast = parse(rec.buggy_src)
        per_method.append(count_code_tokens(ast.tokens))
        if rec.oracle:
            line = scope_line(rec, ast)
            per_line.append(count_code_tokens(ast.leaves[i].token for i in ast.leaves_on_line(line)))
    return {"method": _summary(per_method), "line": _summary(per_line)}
