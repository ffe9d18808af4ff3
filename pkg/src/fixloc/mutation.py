"""Single-token bug injection into correct methods, with the fix recorded as the oracle."""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import __version__
from .diff import ChangeOperator, OperationPath, PatchRecord, operation_path_at, write_records
from .errors import InfeasibleMix, NoEligibleLeaf
from .lang import MethodAst, MiniSyntaxError, Node, NodeKind, parse
from .lang.symbols import declarations, variable_uses, visible_at
from .seeding import derive_seed

GRAMMAR_VERSION = "1"

OPERATOR_CLASSES = (
    ("==", "!=", "<", "<=", ">", ">="),
    ("+", "-", "*", "/", "%"),
    ("&&", "||"),
    ("&", "|"),
)
SWAP_TYPES = ("int", "long", "float", "double", "boolean", "char")
BOOLEAN_CONTEXTS = ("&&", "||")


class MutationKind(str, Enum):
    OperatorSwap = "OperatorSwap"
    BooleanFlip = "BooleanFlip"
    TypeSwap = "TypeSwap"
    IdentifierSwap = "IdentifierSwap"
    TokenDelete = "TokenDelete"   # the fix re-inserts the token
    TokenInsert = "TokenInsert"   # the fix deletes the token

    @property
    def fix_operator(self) -> ChangeOperator:
        if self is MutationKind.TokenDelete:
            return ChangeOperator.INSERT
        if self is MutationKind.TokenInsert:
            return ChangeOperator.DELETE
        return ChangeOperator.UPDATE


ALL_KINDS = tuple(MutationKind)
UPDATE_KINDS = (MutationKind.OperatorSwap, MutationKind.BooleanFlip, MutationKind.TypeSwap,
                MutationKind.IdentifierSwap)


class MutantRecord(PatchRecord):
    """A PatchRecord whose meta carries ``mutation_kind`` and ``seed``."""

    @property
    def mutation_kind(self) -> MutationKind:
        return MutationKind(self.meta["mutation_kind"])

    @property
    def seed(self) -> int:
        return int(self.meta["seed"])


def operator_class(token: str) -> tuple[str, ...] | None:
    for cls in OPERATOR_CLASSES:
        if token in cls:
            return cls
    return None


@dataclass(frozen=True)
class Edit:
    """Replace source[start:end] with ``text``; the fix is ``operator`` at buggy leaf ``leaf``."""

    start: int
    end: int
    text: str
    leaf: int
    operator: ChangeOperator

    def apply(self, src: str) -> str:
        return src[:self.start] + self.text + src[self.end:]


def _shape(node: Node):
    if node.is_leaf:
        return node.kind.value
    return (node.kind.value, node.variant, tuple(_shape(c) for c in node.children))


def _key(ast: MethodAst, i: int):
    leaf = ast.leaves[i]
    return leaf.kind, leaf.token


def _unambiguous(ast: MethodAst, i: int, key) -> bool:
    """No neighbour of position ``i`` carries the same (kind, token) as the inserted/removed leaf."""
    for j in (i - 1, i):
        if 0 <= j < len(ast.leaves) and _key(ast, j) == key:
            return False
    return True


def _first_leaf(node: Node) -> Node:
    while not node.is_leaf:
        node = node.children[0]
    return node


def _leaves_before(ast: MethodAst, offset: int) -> int:
    return sum(1 for leaf in ast.leaves if leaf.start < offset)


# site enumeration: each returns a list of alternative edit lists (one list per site)


def _operator_swaps(ast):
    sites = []
    for leaf in ast.leaves:
        if leaf.kind is NodeKind.Operator and leaf.parent.kind is NodeKind.InfixExpression:
            cls = operator_class(leaf.token)
            if cls:
                sites.append([Edit(leaf.start, leaf.end, t, leaf.leaf_index, ChangeOperator.UPDATE)
                              for t in cls if t != leaf.token])
    return sites


def _boolean_flips(ast):
    return [[Edit(leaf.start, leaf.end, "false" if leaf.token == "true" else "true", leaf.leaf_index,
                  ChangeOperator.UPDATE)]
            for leaf in ast.leaves if leaf.kind is NodeKind.BooleanLiteral]


def _type_swaps(ast):
    return [[Edit(leaf.start, leaf.end, t, leaf.leaf_index, ChangeOperator.UPDATE)
             for t in SWAP_TYPES if t != leaf.token]
            for leaf in ast.leaves if leaf.kind is NodeKind.TypeName and leaf.token in SWAP_TYPES]


def _identifier_swaps(ast):
    decls = declarations(ast)
    sites = []
    for i in variable_uses(ast, decls):
        leaf = ast.leaves[i]
        scope = visible_at(ast, i, decls)
        own = scope[leaf.token]
        others = [n for n in scope if n != leaf.token]
        same = [n for n in others if scope[n] == own]
        pool = same or others
        if pool:
            sites.append([Edit(leaf.start, leaf.end, n, i, ChangeOperator.UPDATE) for n in pool])
    return sites


def _operand_context(node: Node) -> str | None:
    """'!' or '-' for operands where a prefix operator may be inserted, else None."""
    parent = node.parent
    if parent is None:
        return None
    if parent.kind is NodeKind.InfixExpression:
        op = parent.children[1].token
        if op in BOOLEAN_CONTEXTS:
            return "!"
        if op in ("+", "-", "*", "/", "%", "<", "<=", ">", ">="):
            return "-"
        return None
    if parent.kind in (NodeKind.IfStatement, NodeKind.WhileStatement) and parent.children[0] is node:
        return "!"
    return None


def _token_inserts(ast):
    sites = []
    operand_kinds = (NodeKind.SimpleName, NodeKind.NumberLiteral, NodeKind.BooleanLiteral,
                     NodeKind.MethodInvocation, NodeKind.FieldAccess, NodeKind.ParenthesizedExpression)
    for node in ast.root.walk():
        if node.kind not in operand_kinds or (node.is_leaf and node.parent.kind is NodeKind.MethodInvocation
                                              and node is node.parent.children[0]):
            continue
        op = _operand_context(node)
        if op is None:
            continue
        pos = _first_leaf(node).leaf_index
        if _unambiguous(ast, pos, (NodeKind.Operator, op)):
            sites.append([Edit(node.start, node.start, op, pos, ChangeOperator.DELETE)])
    decls = declarations(ast)
    for node in ast.root.walk():
        if node.kind is not NodeKind.MethodInvocation:
            continue
        args = node.children[2:] if node.variant == "." else node.children[1:]
        first_leaf = _first_leaf(node).leaf_index
        scope = visible_at(ast, first_leaf, decls)
        extras = [(NodeKind.SimpleName, n) for n in scope] + [(NodeKind.NumberLiteral, "0")]
        edits = []
        for p in range(len(args) + 1):
            if p < len(args):
                offset, fmt = args[p].start, "{}, "
            elif args:
                offset, fmt = args[-1].end, ", {}"
            else:
                offset, fmt = node.end - 1, "{}"
            pos = _leaves_before(ast, offset)
            for kind, token in extras:
                if _unambiguous(ast, pos, (kind, token)):
                    edits.append(Edit(offset, offset, fmt.format(token), pos, ChangeOperator.DELETE))
        if edits:
            sites.append(edits)
    return sites


def _token_deletes(ast):
    sites = []
    for node in ast.root.walk():
        if node.kind is NodeKind.PrefixExpression:
            op = node.children[0]
            i = op.leaf_index
            if not _neighbour_clash(ast, i):
                sites.append([Edit(op.start, op.end, "", max(i - 1, 0), ChangeOperator.INSERT)])
        elif node.kind is NodeKind.MethodInvocation:
            args = node.children[2:] if node.variant == "." else node.children[1:]
            for k, arg in enumerate(args):
                if not arg.is_leaf or _neighbour_clash(ast, arg.leaf_index):
                    continue
                if len(args) == 1:
                    start, end = arg.start, arg.end
                elif k < len(args) - 1:
                    start, end = arg.start, args[k + 1].start
                else:
                    start, end = args[k - 1].end, arg.end
                sites.append([Edit(start, end, "", max(arg.leaf_index - 1, 0), ChangeOperator.INSERT)])
    return sites


def _neighbour_clash(ast: MethodAst, i: int) -> bool:
    key = _key(ast, i)
    return any(0 <= j < len(ast.leaves) and _key(ast, j) == key for j in (i - 1, i + 1))


SITE_FINDERS = {
    MutationKind.OperatorSwap: _operator_swaps,
    MutationKind.BooleanFlip: _boolean_flips,
    MutationKind.TypeSwap: _type_swaps,
    MutationKind.IdentifierSwap: _identifier_swaps,
    MutationKind.TokenInsert: _token_inserts,
    MutationKind.TokenDelete: _token_deletes,
}


def eligible_kinds(ast: MethodAst) -> list[MutationKind]:
    return [k for k in ALL_KINDS if SITE_FINDERS[k](ast)]


def _expected_tokens(ast: MethodAst, edit: Edit) -> list[str]:
    tokens = list(ast.tokens)
    if edit.operator is ChangeOperator.UPDATE:
        tokens[edit.leaf] = edit.text
    elif edit.operator is ChangeOperator.DELETE:
        tokens.insert(edit.leaf, edit.text.strip(", "))
    else:
        removed = next(leaf.leaf_index for leaf in ast.leaves if edit.start <= leaf.start < edit.end)
        del tokens[removed]
    return tokens


def _try_edit(ast: MethodAst, edit: Edit) -> MethodAst | None:
    """Parse the mutated source and confirm the edit did exactly what it claims."""
    try:
        buggy = parse(edit.apply(ast.source))
    except MiniSyntaxError:
        return None
    if buggy.tokens != _expected_tokens(ast, edit):
        return None
    if edit.operator is ChangeOperator.UPDATE and _shape(buggy.root) != _shape(ast.root):
        return None
    return buggy


def _apply_random(ast: MethodAst, kind: MutationKind, rng: np.random.Generator, exclude=()):
    sites = [s for s in SITE_FINDERS[kind](ast) if s[0].leaf not in exclude]
    while sites:
        site = sites.pop(int(rng.integers(len(sites))))
        options = list(site)
        while options:
            edit = options.pop(int(rng.integers(len(options))))
            buggy = _try_edit(ast, edit)
            if buggy is not None:
                return edit, buggy
    raise NoEligibleLeaf(f"no leaf eligible for {kind.value}")


def mutate(method_src: str, kind: MutationKind | str | None, seed: int, paired: bool = False) -> MutantRecord:
    """Inject one bug (two with ``paired``) into a correct method; ``kind=None`` or "Any" picks one."""
    fixed = parse(method_src)
    rng = np.random.default_rng(seed)
    if kind in (None, "Any"):
        kinds = eligible_kinds(fixed)
        if not kinds:
            raise NoEligibleLeaf("method has no mutable leaf")
        kind = kinds[int(rng.integers(len(kinds)))]
    kind = MutationKind(kind)
    edit, buggy = _apply_random(fixed, kind, rng)
    oracle = [operation_path_at(buggy, edit.leaf, edit.operator)]
    if paired:
        if kind not in UPDATE_KINDS:
            raise NoEligibleLeaf("paired mutation needs an UPDATE-style first edit")
        second = None
        for k2 in UPDATE_KINDS:
            try:
                second, buggy2 = _apply_random(buggy, k2, rng, exclude={edit.leaf - 1, edit.leaf, edit.leaf + 1})
                break
            except NoEligibleLeaf:
                continue
        if second is None:
            raise NoEligibleLeaf("no second leaf for a paired mutation")
        buggy = buggy2
        oracle = sorted([operation_path_at(buggy, edit.leaf, edit.operator),
                         operation_path_at(buggy, second.leaf, second.operator)], key=OperationPath.sort_key)
    meta = {"mutation_kind": kind.value, "seed": int(seed)}
    return MutantRecord(f"mutant-{seed}", buggy.source, method_src, oracle, meta)


def normalise_mix(mix) -> dict[MutationKind, float]:
    if isinstance(mix, dict):
        items = {MutationKind(k): float(v) for k, v in mix.items()}
    else:
        items = {MutationKind(k): 1.0 for k in mix}
    total = sum(items.values())
    if total <= 0 or any(v < 0 for v in items.values()):
        raise InfeasibleMix("mix weights must be non-negative with a positive sum")
    return {k: v / total for k, v in items.items() if v > 0}


def quotas(n: int, mix: dict[MutationKind, float]) -> dict[MutationKind, int]:
    """Largest-remainder apportionment of ``n`` records over the mix."""
    raw = {k: n * w for k, w in mix.items()}
    counts = {k: int(np.floor(v)) for k, v in raw.items()}
    left = n - sum(counts.values())
    order = sorted(raw, key=lambda k: (-(raw[k] - counts[k]), ALL_KINDS.index(k)))
    for k in order[:left]:
        counts[k] += 1
    return counts


def generate_corpus(seed_methods: list[str], n: int, mix, seed: int, paired: bool = False,
                    max_attempts: int = 200) -> list[MutantRecord]:
    if n < 1:
        raise ValueError("n must be at least 1")
    weights = normalise_mix(mix)
    counts = quotas(n, weights)
    asts = [parse(src) for src in seed_methods]
    eligible = {k: [i for i, ast in enumerate(asts) if SITE_FINDERS[k](ast)] for k in weights}
    for k, idx in eligible.items():
        if counts[k] and not idx:
            raise InfeasibleMix(f"no seed method is eligible for {k.value}")
    plan = [k for k in ALL_KINDS if k in counts for _ in range(counts[k])]
    order = np.random.default_rng(derive_seed(seed, "corpus-order")).permutation(len(plan))
    pick = np.random.default_rng(derive_seed(seed, "corpus-seeds"))
    records, seen = [], set()
    for idx, p in enumerate(order):
        kind = plan[p]
        for attempt in range(max_attempts):
            src = seed_methods[eligible[kind][int(pick.integers(len(eligible[kind])))]]
            rec_seed = derive_seed(seed, f"record:{idx}:{attempt}") % (2 ** 31)
            try:
                rec = mutate(src, kind, rec_seed, paired=paired)
            except NoEligibleLeaf:
                continue
            pair = (rec.buggy_src, rec.fixed_src)
            if pair in seen:
                continue
            seen.add(pair)
            rec.id = f"mut-{idx:05d}"
            records.append(rec)
            break
        else:
            raise InfeasibleMix(f"could not produce a fresh {kind.value} mutant after {max_attempts} attempts")
    return records


def write_corpus(path, records: list[MutantRecord], seed: int, mix, n_seeds: int) -> Path:
    """Write JSONL plus a manifest next to it; returns the manifest path."""
    path = Path(path)
    write_records(path, records)
    counts = {}
    for rec in records:
        counts[rec.meta["mutation_kind"]] = counts.get(rec.meta["mutation_kind"], 0) + 1
    manifest = {
        "seed": seed, "n": len(records), "n_seed_methods": n_seeds,
        "mix": {k.value: w for k, w in normalise_mix(mix).items()},
        "counts": dict(sorted(counts.items())), "grammar_version": GRAMMAR_VERSION,
        "tool_version": __version__,
    }
    out = path.with_name(path.name + ".manifest.json")
    out.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out
