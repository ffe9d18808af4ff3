from __future__ import annotations

from dataclasses import dataclass, field

from ..diff import OPERATORS, ChangeOperator
from ..lang import NodeKind, split_subtokens, truncate_kinds

UNK = "<unk>"


@dataclass
class Vocab:
    """Index maps for sub-tokens (or whole tokens), node kinds, operators and whole paths.

    Index 0 of every learned map is UNK.
    """

    subtokens: dict[str, int] = field(default_factory=lambda: {UNK: 0})
    kinds: dict[str, int] = field(default_factory=lambda: {UNK: 0, **{k.value: i + 1 for i, k in enumerate(NodeKind)}})
    operators: dict[str, int] = field(default_factory=lambda: {op.value: i for i, op in enumerate(OPERATORS)})
    paths: dict[str, int] = field(default_factory=lambda: {UNK: 0})
    split_tokens: bool = True

    def token_units(self, token: str) -> list[str]:
        return split_subtokens(token) if self.split_tokens else [token]

    def token_ids(self, token: str) -> list[int]:
        return [self.subtokens.get(u, 0) for u in self.token_units(token)]

    def kind_ids(self, kinds) -> list[int]:
        return [self.kinds.get(k.value if isinstance(k, NodeKind) else k, 0) for k in kinds]

    def operator_id(self, op: ChangeOperator) -> int:
        return self.operators[op.value]

    @staticmethod
    def path_key(kinds) -> str:
        return "/".join(k.value if isinstance(k, NodeKind) else k for k in kinds)

    def path_id(self, kinds) -> int:
        return self.paths.get(self.path_key(kinds), 0)

    def to_json(self) -> dict:
        return {
            "subtokens": self.subtokens, "kinds": self.kinds, "operators": self.operators,
            "paths": self.paths, "split_tokens": self.split_tokens,
        }

    @classmethod
    def from_json(cls, obj: dict) -> Vocab:
        return cls(dict(obj["subtokens"]), dict(obj["kinds"]), dict(obj["operators"]),
                   dict(obj["paths"]), bool(obj["split_tokens"]))


def build_vocab(asts, split_tokens: bool = True, max_l: int | None = None) -> Vocab:
    """Collect sub-tokens and truncated path keys from the given methods, in first-seen order."""
    vocab = Vocab(split_tokens=split_tokens)
    for ast in asts:
        for leaf in ast.leaves:
            for unit in vocab.token_units(leaf.token):
                vocab.subtokens.setdefault(unit, len(vocab.subtokens))
            kinds = ast.kinds_of(leaf.leaf_index)
            if max_l is not None:
                kinds = truncate_kinds(kinds, max_l)
            vocab.paths.setdefault(Vocab.path_key(kinds), len(vocab.paths))
    return vocab
