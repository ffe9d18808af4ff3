from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, load_checkpoint, save_checkpoint
from ..diff import OperationPath, enumerate_operation_paths
from ..errors import CheckpointError, EmptyScope
from ..lang import MethodAst, parse
from .hparams import HyperParams
from .network import BeepParams, RankedPrediction, raw_scores
from .vocab import Vocab

WHOLE_METHOD = "method"


def scoped_candidates(ast: MethodAst, scope=WHOLE_METHOD) -> list[OperationPath]:
    """Operation paths for in-scope leaves; ``scope`` is "method" or a 1-based line number."""
    cands = enumerate_operation_paths(ast)
    if scope in (None, WHOLE_METHOD):
        return cands
    line = int(scope)
    wanted = set(ast.leaves_on_line(line))
    if not wanted:
        raise EmptyScope(f"no leaf starts on line {line}")
    return [c for c in cands if c.leaf_index in wanted]


def windows(n: int, size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def predict_candidates(cand_lists: list[list[OperationPath]], params: BeepParams, vocab: Vocab,
                       batch_size: int | None = None) -> list[RankedPrediction]:
    """Rank several candidate lists. Lists longer than max_k are scored in max_k windows whose raw
    scores are merged before a single softmax per list."""
    hp = params.hp
    batch_size = batch_size or hp.batch_size
    pieces = []  # (list index, lo, hi)
    for li, cands in enumerate(cand_lists):
        if not cands:
            raise EmptyScope("nothing to rank")
        pieces.extend((li, lo, hi) for lo, hi in windows(len(cands), hp.max_k))
    u_parts: list[list] = [[] for _ in cand_lists]
    for start in range(0, len(pieces), batch_size):
        group = pieces[start:start + batch_size]
        us = raw_scores([cand_lists[li][lo:hi] for li, lo, hi in group], params, vocab)
        for (li, _, _), u in zip(group, us):
            u_parts[li].append(u)
    return [RankedPrediction.from_scores(c, np.concatenate(parts)) for c, parts in zip(cand_lists, u_parts)]


def predict_ranked(method_src: str, params: BeepParams, vocab: Vocab, scope=WHOLE_METHOD) -> RankedPrediction:
    ast = parse(method_src)
    return predict_candidates([scoped_candidates(ast, scope)], params, vocab)[0]


def save_model(path, params: BeepParams, vocab: Vocab, extra: dict | None = None) -> None:
    meta = {"format": "fixloc-beep", "hparams": params.hp.to_dict(), "vocab": vocab.to_json()}
    if extra:
        meta["extra"] = extra
    save_checkpoint(path, params.arrays(), meta)


def load_model(path) -> tuple[BeepParams, Vocab]:
    arrays, meta = load_checkpoint(path)
    if meta.get("format") != "fixloc-beep":
        raise CheckpointError(f"{path}: not a model checkpoint")
    hp = HyperParams.from_dict(meta["hparams"])
    tensors = {k: Tensor(v, requires_grad=True, name=k) for k, v in arrays.items()}
    return BeepParams(tensors, hp), Vocab.from_json(meta["vocab"])
