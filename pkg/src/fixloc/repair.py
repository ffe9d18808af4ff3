"""Heuristic generate-and-validate repair driven by a ranked list of operation paths."""
from __future__ import annotations

import itertools
import json
import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .diff import ChangeOperator, OperationPath
from .errors import NoCandidates, UnassessedOutcome, ValidatorFailure
from .lang import MethodAst, MiniSyntaxError, NodeKind, parse, tokenize
from .lang.symbols import declarations, is_declaring_name, is_member_name, visible_at
from .mutation import OPERATOR_CLASSES, SWAP_TYPES, operator_class

MAX_IDENTIFIERS = 5
PREFIX_INSERTS = ("!", "-")
LITERAL_INSERTS = ("true", "false", "0", "1")


class Status(str, Enum):
    Plausible = "Plausible"
    Exhausted = "Exhausted"


class Correctness(str, Enum):
    Correct = "Correct"
    Overfitting = "Overfitting"
    Unassessed = "Unassessed"


@dataclass(frozen=True)
class SourceEdit:
    start: int
    end: int
    text: str


@dataclass
class CandidatePatch:
    patched_src: str
    edits: list[tuple[OperationPath, str | None]]
    origin_ranks: list[int]

    def to_json(self) -> dict:
        return {"patched_src": self.patched_src, "origin_ranks": self.origin_ranks,
                "edits": [{"op": op.to_json(), "replacement": rep} for op, rep in self.edits]}


@dataclass
class RepairOutcome:
    status: Status
    npc: int
    patch: CandidatePatch | None = None
    correctness: Correctness = Correctness.Unassessed
    record_id: str = ""

    def to_json(self) -> dict:
        return {"id": self.record_id, "status": self.status.value, "npc": self.npc,
                "correctness": self.correctness.value,
                "patch": self.patch.to_json() if self.patch else None}


# replacement candidates


def _occurrences(ast: MethodAst, name: str) -> list[int]:
    return [leaf.leaf_index for leaf in ast.leaves if leaf.kind is NodeKind.SimpleName and leaf.token == name]


def _role(leaf) -> str:
    if is_member_name(leaf):
        return "member"
    if leaf.parent is not None and leaf.parent.kind is NodeKind.MethodDeclaration:
        return "method"
    return "variable"


def nearest_identifiers(ast: MethodAst, leaf_index: int, limit: int = MAX_IDENTIFIERS,
                        same_type_as: str | None = None, by_role: bool = True) -> list[str]:
    """In-scope identifiers ordered by token distance to ``leaf_index`` (position breaks ties).

    With ``same_type_as`` set, only names whose declared type matches are kept. A leaf whose
    name is not declared in the method (with ``by_role``) falls back to SimpleNames with the
    same syntactic role.
    """
    leaf = ast.leaves[leaf_index]
    decls = declarations(ast)
    scope = visible_at(ast, leaf_index, decls)
    own = leaf.token if leaf.kind is NodeKind.SimpleName else None
    if by_role and own is not None and own not in scope and not is_declaring_name(leaf):
        role = _role(leaf)
        pool = {other.token for other in ast.leaves
                if other.kind is NodeKind.SimpleName and other.token != own and _role(other) == role}
    else:
        wanted = same_type_as
        pool = {n for n, t in scope.items() if n != own and (wanted is None or t == wanted)}

    def distance(name):
        best = min(_occurrences(ast, name), key=lambda j: (abs(j - leaf_index), j))
        return abs(best - leaf_index), best

    return sorted(pool, key=lambda n: (*distance(n), n))[:limit]


def candidate_tokens(op: OperationPath, ast: MethodAst) -> list[str]:
    """Ordered replacement (UPDATE) or insertion (INSERT) tokens for one operation path."""
    leaf = ast.leaves[op.leaf_index]
    if op.operator is ChangeOperator.UPDATE:
        token = leaf.token
        cls = operator_class(token) if leaf.kind is NodeKind.Operator else None
        if cls:
            return [t for t in cls if t != token]
        if leaf.kind is NodeKind.BooleanLiteral:
            return ["false" if token == "true" else "true"]
        if leaf.kind is NodeKind.TypeName and token in SWAP_TYPES:
            return [t for t in SWAP_TYPES if t != token]
        if leaf.kind is NodeKind.SimpleName and not is_declaring_name(leaf):
            scope = visible_at(ast, op.leaf_index)
            found = nearest_identifiers(ast, op.leaf_index, same_type_as=scope.get(token))
            if token in scope:
                # a cross-type swap is possible when the original had no same-typed neighbour
                found += [n for n in nearest_identifiers(ast, op.leaf_index) if n not in found]
            if found:
                return found
        raise NoCandidates(f"no replacement heuristic for {leaf.kind.value} {token!r}")
    if op.operator is ChangeOperator.INSERT:
        near = nearest_identifiers(ast, op.leaf_index, by_role=False)
        return list(PREFIX_INSERTS) + near + list(LITERAL_INSERTS)
    raise NoCandidates("DELETE takes no replacement token")


# source edits


def _arguments(node):
    return node.children[2:] if node.variant == "." else node.children[1:]


def delete_edit(ast: MethodAst, leaf_index: int) -> SourceEdit:
    leaf = ast.leaves[leaf_index]
    parent = leaf.parent
    if parent is not None and parent.kind is NodeKind.MethodInvocation and leaf in _arguments(parent):
        args = _arguments(parent)
        k = args.index(leaf)
        if len(args) == 1:
            return SourceEdit(leaf.start, leaf.end, "")
        if k < len(args) - 1:
            return SourceEdit(leaf.start, args[k + 1].start, "")
        return SourceEdit(args[k - 1].end, leaf.end, "")
    return SourceEdit(leaf.start, leaf.end, "")


def update_edit(ast: MethodAst, leaf_index: int, token: str) -> SourceEdit:
    leaf = ast.leaves[leaf_index]
    return SourceEdit(leaf.start, leaf.end, token)


def insert_edits(ast: MethodAst, anchor: int, token: str) -> list[SourceEdit]:
    """Placements of ``token`` just after leaf ``anchor``: as a prefix of the next operand, or as
    a call argument next to it."""
    leaf = ast.leaves[anchor]
    nxt = ast.leaves[anchor + 1] if anchor + 1 < len(ast.leaves) else None
    src = ast.source
    out = []
    if token in PREFIX_INSERTS:
        if nxt is not None:
            out.append(SourceEdit(nxt.start, nxt.start, token))
        return out
    out.append(SourceEdit(leaf.end, leaf.end, f", {token}"))
    rest = src[leaf.end:]
    stripped = rest.lstrip()
    if stripped.startswith("("):
        paren = leaf.end + (len(rest) - len(stripped)) + 1
        after = src[paren:].lstrip()
        out.append(SourceEdit(paren, paren, token if after.startswith(")") else f"{token}, "))
    return out


def apply_edits(src: str, edits: list[SourceEdit]) -> str | None:
    """Apply non-overlapping edits right to left; None when two edits overlap."""
    ordered = sorted(edits, key=lambda e: (e.start, e.end), reverse=True)
    for later, earlier in zip(ordered, ordered[1:]):
        if earlier.end > later.start or (earlier.start == later.start):
            return None
    for e in ordered:
        src = src[:e.start] + e.text + src[e.end:]
    return src


def _options(op: OperationPath, ast: MethodAst) -> list[tuple[str | None, SourceEdit]]:
    """(replacement, edit) alternatives for one operation path, in trial order."""
    if op.operator is ChangeOperator.DELETE:
        return [(None, delete_edit(ast, op.leaf_index))]
    tokens = candidate_tokens(op, ast)
    if op.operator is ChangeOperator.UPDATE:
        return [(t, update_edit(ast, op.leaf_index, t)) for t in tokens]
    return [(t, e) for t in tokens for e in insert_edits(ast, op.leaf_index, t)]


# scheduling and search


def schedule(pred, width: int = 20):
    """Singles in rank order, then rank pairs (i, j), i < j, lexicographically; 1-based ranks."""
    n = min(width, len(pred))
    for i in range(1, n + 1):
        yield (i,)
    yield from itertools.combinations(range(1, n + 1), 2)


class OracleValidator:
    """Passes iff the candidate's lexical token sequence equals the ground-truth fix."""

    assesses = True

    def __init__(self, fixed_src: str):
        self.expected = [t.text for t in tokenize(fixed_src)]

    def __call__(self, patched_src: str) -> bool:
        try:
            return [t.text for t in tokenize(patched_src)] == self.expected
        except MiniSyntaxError:
            return False


class CommandValidator:
    """Runs a shell-style command with {patched} replaced by a temp file path; exit 0 passes."""

    assesses = False

    def __init__(self, command: str, timeout: float | None = None, suffix: str = ".mj"):
        if "{patched}" not in command:
            raise ValidatorFailure("command must contain the {patched} placeholder")
        self.command = command
        self.timeout = timeout
        self.suffix = suffix

    def __call__(self, patched_src: str) -> bool:
        fd, path = tempfile.mkstemp(suffix=self.suffix, prefix="fixloc-candidate-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(patched_src)
            argv = [part.replace("{patched}", path) for part in shlex.split(self.command)]
            try:
                done = subprocess.run(argv, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
                                      timeout=self.timeout, check=False)
            except (FileNotFoundError, PermissionError) as exc:
                raise ValidatorFailure(f"cannot run validation command: {exc}") from exc
            except subprocess.TimeoutExpired:
                return False
            return done.returncode == 0
        finally:
            Path(path).unlink(missing_ok=True)


def generate_and_validate(method_src: str, pred, validator, width: int = 20) -> RepairOutcome:
    """Walk the schedule, validating each parseable candidate until one passes."""
    ast = parse(method_src)
    entries = pred.ops if hasattr(pred, "ops") else list(pred)
    options: dict[int, list | None] = {}

    def opts(rank):
        if rank not in options:
            try:
                options[rank] = _options(entries[rank - 1], ast)
            except NoCandidates:
                options[rank] = None
        return options[rank]

    npc = 0
    tried: set[str] = set()
    for ranks in schedule(entries, width):
        per_path = [opts(r) for r in ranks]
        if any(p is None or not p for p in per_path):
            continue
        for combo in itertools.product(*per_path):
            patched = apply_edits(method_src, [edit for _, edit in combo])
            if patched is None or patched in tried:
                continue
            tried.add(patched)
            try:
                parse(patched)
            except MiniSyntaxError:
                continue
            npc += 1
            if validator(patched):
                patch = CandidatePatch(patched, [(entries[r - 1], rep) for r, (rep, _) in zip(ranks, combo)],
                                       list(ranks))
                correctness = Correctness.Correct if getattr(validator, "assesses", False) else Correctness.Unassessed
                return RepairOutcome(Status.Plausible, npc, patch, correctness)
    return RepairOutcome(Status.Exhausted, npc, None, Correctness.Unassessed)


def correctness_ratio(outcomes: list[RepairOutcome]) -> float | None:
    """Correct / plausible; None (n/a) when nothing was plausible."""
    plausible = [o for o in outcomes if o.status is Status.Plausible]
    if not plausible:
        return None
    if any(o.correctness is Correctness.Unassessed for o in plausible):
        raise UnassessedOutcome("plausible patches need a Correct/Overfitting label")
    return sum(o.correctness is Correctness.Correct for o in plausible) / len(plausible)


def write_outcomes(path, outcomes: list[RepairOutcome]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for o in outcomes:
            fh.write(json.dumps(o.to_json(), sort_keys=True) + "\n")


__all__ = [
    "OPERATOR_CLASSES", "SWAP_TYPES", "CandidatePatch", "CommandValidator", "Correctness", "OracleValidator",
    "RepairOutcome", "SourceEdit", "Status", "apply_edits", "candidate_tokens", "correctness_ratio",
    "delete_edit", "generate_and_validate", "insert_edits", "nearest_identifiers", "oracle_ranking", "schedule",
    "update_edit", "write_outcomes",
]


def oracle_ranking(method_src: str, oracle: list[OperationPath]):
    """A RankedPrediction with the oracle paths on top, the rest in (leaf, operator) order."""
    from .diff import enumerate_operation_paths
    from .model import RankedPrediction

    cands = enumerate_operation_paths(parse(method_src))
    wanted = set(oracle)
    return RankedPrediction.from_scores(cands, [10.0 if c in wanted else 0.0 for c in cands])
