"""Operation paths, oracle extraction from (buggy, fixed) pairs, and candidate labelling."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import OracleMissing, UnsupportedPatch
from .lang import AstPath, MethodAst, NodeKind, ast_paths, parse

MAX_EDITS = 2


class ChangeOperator(str, Enum):
    UPDATE = "UPDATE"
    DELETE = "DELETE"
    INSERT = "INSERT"

    @property
    def order(self) -> int:
        return _OP_ORDER[self]

    def __str__(self) -> str:
        return self.value


_OP_ORDER = {ChangeOperator.UPDATE: 0, ChangeOperator.DELETE: 1, ChangeOperator.INSERT: 2}
OPERATORS = tuple(ChangeOperator)


@dataclass(frozen=True)
class OperationPath:
    token: str
    path: AstPath
    operator: ChangeOperator

    @property
    def leaf_index(self) -> int:
        return self.path.leaf_index

    @property
    def kinds(self) -> tuple[NodeKind, ...]:
        return self.path.kinds

    def sort_key(self):
        return (self.path.leaf_index, self.operator.order)

    def to_json(self) -> dict:
        return {
            "token": self.token,
            "kinds": [k.value for k in self.path.kinds],
            "leaf_index": self.path.leaf_index,
            "operator": self.operator.value,
        }

    @classmethod
    def from_json(cls, obj: dict) -> OperationPath:
        path = AstPath(tuple(NodeKind(k) for k in obj["kinds"]), int(obj["leaf_index"]))
        return cls(obj["token"], path, ChangeOperator(obj["operator"]))

    def __str__(self) -> str:
        return f"<{self.token}, {self.path}, {self.operator.value}>"


@dataclass
class PatchRecord:
    id: str
    buggy_src: str
    fixed_src: str
    oracle: list[OperationPath]
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        obj = {
            "id": self.id,
            "buggy_src": self.buggy_src,
            "fixed_src": self.fixed_src,
            "oracle": [op.to_json() for op in self.oracle],
        }
        obj.update(self.meta)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> PatchRecord:
        core = {"id", "buggy_src", "fixed_src", "oracle"}
        meta = {k: v for k, v in obj.items() if k not in core}
        return cls(obj["id"], obj["buggy_src"], obj["fixed_src"],
                   [OperationPath.from_json(o) for o in obj["oracle"]], meta)


def read_records(path) -> list[PatchRecord]:
    with open(path, encoding="utf-8") as fh:
        return [PatchRecord.from_json(json.loads(line)) for line in fh if line.strip()]


def write_records(path, records) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), sort_keys=True, ensure_ascii=False) + "\n")


def enumerate_operation_paths(ast: MethodAst) -> list[OperationPath]:
    """Every leaf paired with each change operator, ordered by (leaf, operator)."""
    return [OperationPath(ast.leaves[p.leaf_index].token, p, op) for p in ast_paths(ast) for op in OPERATORS]


def operation_path_at(ast: MethodAst, leaf_index: int, operator: ChangeOperator) -> OperationPath:
    return OperationPath(ast.leaves[leaf_index].token, AstPath(ast.kinds_of(leaf_index), leaf_index), operator)


def _align(buggy: MethodAst, fixed: MethodAst):
    """Minimum-cost leaf alignment.

    Equal (leaf kind, token) pairs match for free; an update costs 1 and needs identical
    root-to-leaf kind chains; deletions and insertions cost 1 each. Returns a list of
    ("match"|"update"|"delete"|"insert", buggy_index, fixed_index) in sequence order.
    """
    b_keys = [(leaf.kind, leaf.token) for leaf in buggy.leaves]
    f_keys = [(leaf.kind, leaf.token) for leaf in fixed.leaves]
    n, m = len(b_keys), len(f_keys)
    lo = 0
    while lo < n and lo < m and b_keys[lo] == f_keys[lo]:
        lo += 1
    hi_b, hi_f = n, m
    while hi_b > lo and hi_f > lo and b_keys[hi_b - 1] == f_keys[hi_f - 1]:
        hi_b -= 1
        hi_f -= 1

    b_mid = range(lo, hi_b)
    f_mid = range(lo, hi_f)
    b_kinds = [buggy.kinds_of(i) for i in b_mid]
    f_kinds = [fixed.kinds_of(j) for j in f_mid]
    rows, cols = len(b_mid), len(f_mid)
    inf = float("inf")
    cost = [[inf] * (cols + 1) for _ in range(rows + 1)]
    for i in range(rows + 1):
        cost[i][0] = i
    for j in range(cols + 1):
        cost[0][j] = j
    for i in range(1, rows + 1):
        bi = b_keys[lo + i - 1]
        for j in range(1, cols + 1):
            fj = f_keys[lo + j - 1]
            best = min(cost[i - 1][j] + 1, cost[i][j - 1] + 1)
            if bi == fj:
                best = min(best, cost[i - 1][j - 1])
            elif b_kinds[i - 1] == f_kinds[j - 1]:
                best = min(best, cost[i - 1][j - 1] + 1)
            cost[i][j] = best

    steps = []
    i, j = rows, cols
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            bi, fj = b_keys[lo + i - 1], f_keys[lo + j - 1]
            if bi == fj and cost[i][j] == cost[i - 1][j - 1]:
                steps.append(("match", lo + i - 1, lo + j - 1))
                i, j = i - 1, j - 1
                continue
            if bi != fj and b_kinds[i - 1] == f_kinds[j - 1] and cost[i][j] == cost[i - 1][j - 1] + 1:
                steps.append(("update", lo + i - 1, lo + j - 1))
                i, j = i - 1, j - 1
                continue
        if i > 0 and cost[i][j] == cost[i - 1][j] + 1:
            steps.append(("delete", lo + i - 1, None))
            i -= 1
        else:
            steps.append(("insert", None, lo + j - 1))
            j -= 1
    steps.reverse()
    head = [("match", k, k) for k in range(lo)]
    tail = [("match", hi_b + k, hi_f + k) for k in range(n - hi_b)]
    return head + steps + tail


def _skeleton(ast: MethodAst, removed: set[int]):
    """Token-free tree shape with the given leaves dropped and emptied prefix nodes collapsed."""

    def build(node):
        if node.is_leaf:
            return None if node.leaf_index in removed else (node.kind.value,)
        kids = [s for s in (build(c) for c in node.children) if s is not None]
        if node.kind is NodeKind.PrefixExpression and len(kids) == 1:
            return kids[0]
        return (node.kind.value, node.variant, tuple(kids))

    return build(ast.root)


def extract_oracle(buggy: MethodAst | str, fixed: MethodAst | str) -> list[OperationPath]:
    """Operation paths on the buggy AST that turn it into the fixed one (at most two leaf edits)."""
    if isinstance(buggy, str):
        buggy = parse(buggy)
    if isinstance(fixed, str):
        fixed = parse(fixed)
    steps = _align(buggy, fixed)
    edits = []
    deleted, inserted = set(), set()
    last_buggy = -1
    for kind, bi, fj in steps:
        if kind == "update":
            edits.append((bi, ChangeOperator.UPDATE))
        elif kind == "delete":
            edits.append((bi, ChangeOperator.DELETE))
            deleted.add(bi)
        elif kind == "insert":
            edits.append((max(last_buggy, 0), ChangeOperator.INSERT))
            inserted.add(fj)
        if bi is not None:
            last_buggy = bi
    if not edits:
        raise UnsupportedPatch("buggy and fixed methods have identical leaves")
    if len(edits) > MAX_EDITS:
        raise UnsupportedPatch(f"patch needs {len(edits)} leaf edits (limit {MAX_EDITS})")
    if _skeleton(buggy, deleted) != _skeleton(fixed, inserted):
        raise UnsupportedPatch("patch rewrites non-leaf structure")
    oracle = sorted({operation_path_at(buggy, i, op) for i, op in edits}, key=OperationPath.sort_key)
    return oracle


def label_paths(candidates: list[OperationPath], oracle: list[OperationPath]) -> list[int]:
    """1 for candidates equal to an oracle path, else 0."""
    present = set(candidates)
    for op in oracle:
        if op not in present:
            raise OracleMissing(f"oracle path {op} is not among the candidates")
    wanted = set(oracle)
    return [int(c in wanted) for c in candidates]
