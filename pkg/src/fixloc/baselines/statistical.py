"""Ranking leaves by how often their node kind was the buggy element in training data."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..diff import PatchRecord
from ..errors import EmptyDataset
from ..lang import LEAF_KINDS, MethodAst, NodeKind, parse
from .features import buggy_leaves, rank_by_score

FORMAT = "fixloc-statistical-baseline"
VERSION = 1


@dataclass
class BugProbTable:
    probs: dict[NodeKind, float] = field(default_factory=dict)
    buggy: dict[NodeKind, int] = field(default_factory=dict)
    total: dict[NodeKind, int] = field(default_factory=dict)

    def prob(self, kind: NodeKind) -> float:
        return self.probs.get(kind, 0.0)

    def to_json(self) -> dict:
        return {
            "format": FORMAT, "version": VERSION,
            "probs": {k.value: v for k, v in self.probs.items()},
            "buggy": {k.value: v for k, v in self.buggy.items()},
            "total": {k.value: v for k, v in self.total.items()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> BugProbTable:
        if obj.get("format") != FORMAT or obj.get("version") != VERSION:
            raise ValueError("not a statistical-baseline document of a supported version")
        conv = lambda d: {NodeKind(k): v for k, v in d.items()}  # noqa: E731
        return cls(conv(obj["probs"]), conv(obj["buggy"]), conv(obj["total"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def fit_statistics(train: list[PatchRecord]) -> BugProbTable:
    if not train:
        raise EmptyDataset("no training records")
    buggy = {k: 0 for k in NodeKind if k in LEAF_KINDS}
    total = dict(buggy)
    for rec in train:
        ast = parse(rec.buggy_src)
        bad = buggy_leaves(rec)
        for leaf in ast.leaves:
            total[leaf.kind] += 1
            if leaf.leaf_index in bad:
                buggy[leaf.kind] += 1
    probs = {k: (buggy[k] / total[k] if total[k] else 0.0) for k in total}
    return BugProbTable(probs, buggy, total)


def statistical_scores(method: MethodAst, table: BugProbTable) -> list[float]:
    return [table.prob(leaf.kind) for leaf in method.leaves]


def rank_statistical(method: MethodAst, table: BugProbTable) -> list[int]:
    """Leaf indices, most bug-prone kind first, source order on ties."""
    return rank_by_score(statistical_scores(method, table))
