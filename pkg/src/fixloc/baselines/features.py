from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..diff import PatchRecord
from ..lang import MethodAst, NodeKind, parse, split_subtokens

FEATURE_NAMES = ("token_rank", "statement_type", "token_length", "num_subtokens")
CATEGORICAL = (False, True, False, False)
STATEMENT_CODES = {kind: i for i, kind in enumerate(NodeKind)}


@dataclass(frozen=True)
class TokenFeatures:
    token_rank: int
    statement_type: NodeKind
    token_length: int
    num_subtokens: int

    def vector(self) -> list[float]:
        return [float(self.token_rank), float(STATEMENT_CODES[self.statement_type]),
                float(self.token_length), float(self.num_subtokens)]


def token_features(ast: MethodAst) -> list[TokenFeatures]:
    return [TokenFeatures(leaf.leaf_index, ast.enclosing_statement(leaf.leaf_index), len(leaf.token),
                          max(1, len(split_subtokens(leaf.token))))
            for leaf in ast.leaves]


def feature_matrix(ast: MethodAst) -> np.ndarray:
    return np.array([f.vector() for f in token_features(ast)], dtype=np.float64).reshape(-1, len(FEATURE_NAMES))


def buggy_leaves(record: PatchRecord) -> set[int]:
    return {op.leaf_index for op in record.oracle}


def training_rows(records: list[PatchRecord]) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    for rec in records:
        ast = parse(rec.buggy_src)
        xs.append(feature_matrix(ast))
        bad = buggy_leaves(rec)
        ys.append(np.array([1.0 if i in bad else 0.0 for i in range(len(ast.leaves))]))
    return np.concatenate(xs), np.concatenate(ys)


def rank_by_score(scores) -> list[int]:
    """Leaf indices by score descending, earlier position first on ties."""
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))
