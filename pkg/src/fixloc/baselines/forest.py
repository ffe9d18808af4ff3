"""Random forest of CART trees (Gini impurity) over per-token features."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..diff import PatchRecord
from ..errors import DegenerateLabels, EmptyDataset
from ..lang import MethodAst
from .features import CATEGORICAL, feature_matrix, rank_by_score, training_rows

FORMAT = "fixloc-forest-baseline"
VERSION = 1


def gini(pos: float, n: float) -> float:
    if n == 0:
        return 0.0
    p = pos / n
    return 2.0 * p * (1.0 - p)


@dataclass
class Tree:
    """Flat node arrays. ``feature`` is -1 at leaves. Numeric nodes send x <= threshold left;
    categorical nodes send x == threshold (one category) left."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray, categorical=CATEGORICAL) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        is_cat = np.asarray(categorical, dtype=bool)
        while True:
            feat = self.feature[node]
            active = feat >= 0
            if not active.any():
                return self.value[node]
            rows = np.flatnonzero(active)
            f = feat[rows]
            x = X[rows, f]
            thr = self.threshold[node[rows]]
            go_left = np.where(is_cat[f], x == thr, x <= thr)
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])

    def to_json(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(), "value": self.value.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> Tree:
        return cls(np.array(obj["feature"], dtype=np.int64), np.array(obj["threshold"], dtype=np.float64),
                   np.array(obj["left"], dtype=np.int64), np.array(obj["right"], dtype=np.int64),
                   np.array(obj["value"], dtype=np.float64))


def best_split(x: np.ndarray, y: np.ndarray, categorical: bool):
    """(weighted child impurity, threshold) of the best split on one feature, or None."""
    n = len(y)
    if categorical:
        best = None
        total_pos = y.sum()
        for c in np.unique(x):
            inside = x == c
            nl = int(inside.sum())
            if nl == 0 or nl == n:
                continue
            pl = y[inside].sum()
            score = (nl * gini(pl, nl) + (n - nl) * gini(total_pos - pl, n - nl)) / n
            if best is None or score < best[0]:
                best = (score, float(c))
        return best
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    boundaries = np.flatnonzero(xs[1:] != xs[:-1])  # split after position b
    if boundaries.size == 0:
        return None
    cum = np.cumsum(ys)
    nl = boundaries + 1.0
    pl = cum[boundaries]
    nr = n - nl
    pr = cum[-1] - pl
    pL, pR = pl / nl, pr / nr
    score = (nl * 2 * pL * (1 - pL) + nr * 2 * pR * (1 - pR)) / n
    k = int(np.argmin(score))
    b = boundaries[k]
    return float(score[k]), float((xs[b] + xs[b + 1]) / 2.0)


def fit_tree(X: np.ndarray, y: np.ndarray, max_depth: int, rng: np.random.Generator,
             max_features: int | None = None, categorical=CATEGORICAL, min_samples_split: int = 2) -> Tree:
    n_features = X.shape[1]
    if max_features is None:
        max_features = max(1, int(np.sqrt(n_features)))
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[idx].mean()) if len(idx) else 0.0)
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yy = y[idx]
        parent = gini(yy.sum(), len(yy))
        if depth >= max_depth or len(idx) < min_samples_split or parent == 0.0:
            continue
        feats = np.sort(rng.choice(n_features, size=max_features, replace=False))
        best = None
        for f in feats:
            found = best_split(X[idx, f], yy, bool(categorical[f]))
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], int(f), found[1])
        if best is None or best[0] >= parent - 1e-12:
            continue
        _, f, thr = best
        col = X[idx, f]
        mask = (col == thr) if categorical[f] else (col <= thr)
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return Tree(np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
                np.array(right, dtype=np.int64), np.array(value))


@dataclass
class Forest:
    trees: list[Tree]
    n_trees: int
    max_depth: int
    seed: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return np.mean([t.predict(X) for t in self.trees], axis=0)

    def to_json(self) -> dict:
        return {"format": FORMAT, "version": VERSION, "n_trees": self.n_trees, "max_depth": self.max_depth,
                "seed": self.seed, "trees": [t.to_json() for t in self.trees]}

    @classmethod
    def from_json(cls, obj: dict) -> Forest:
        if obj.get("format") != FORMAT or obj.get("version") != VERSION:
            raise ValueError("not a forest-baseline document of a supported version")
        return cls([Tree.from_json(t) for t in obj["trees"]], obj["n_trees"], obj["max_depth"], obj["seed"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def fit_forest_arrays(X: np.ndarray, y: np.ndarray, n_trees: int = 100, max_depth: int = 8, seed: int = 0,
                      bootstrap: bool = True, max_features: int | None = None) -> Forest:
    if len(y) == 0:
        raise EmptyDataset("no training rows")
    if np.all(y == y[0]):
        raise DegenerateLabels("every training token has the same label")
    rng = np.random.default_rng(seed)
    trees = []
    for _ in range(n_trees):
        idx = rng.integers(0, len(y), size=len(y)) if bootstrap else np.arange(len(y))
        trees.append(fit_tree(X[idx], y[idx], max_depth, rng, max_features))
    return Forest(trees, n_trees, max_depth, seed)


def fit_forest(train: list[PatchRecord], n_trees: int = 100, max_depth: int = 8, seed: int = 0) -> Forest:
    if not train:
        raise EmptyDataset("no training records")
    X, y = training_rows(train)
    return fit_forest_arrays(X, y, n_trees, max_depth, seed)


def forest_scores(method: MethodAst, forest: Forest) -> np.ndarray:
    return forest.predict_proba(feature_matrix(method))


def rank_forest(method: MethodAst, forest: Forest) -> list[int]:
    """Leaf indices by mean predicted bugginess, source order on ties."""
    return rank_by_score(forest_scores(method, forest).tolist())
