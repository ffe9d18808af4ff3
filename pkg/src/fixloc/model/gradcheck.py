"""Full-model finite-difference check at toy sizes."""
from __future__ import annotations

import numpy as np

from ..autodiff import gradient_check
from ..diff import enumerate_operation_paths
from ..lang import parse
from .hparams import HyperParams
from .network import BeepParams, batch_loss, encode_batch, probabilities, scores
from .vocab import build_vocab

TOY_METHODS = (
    "int addUp(int leftValue, int right_value) { return leftValue + right_value; }",
    "boolean isReady(int count) { if (!done) { return count >= 0; } return false; }",
    "void reset(Counter c) { c.value = 0; c.notifyAll(1, true); }",
)


def model_gradcheck(dims: int = 4, seed: int = 0, k: int = 6, max_l: int = 6, h: float = 1e-5,
                    **flags) -> dict[str, float]:
    """Relative error per parameter tensor for the summed loss over a small padded batch."""
    rng = np.random.default_rng(seed)
    hp = HyperParams.toy(dims, max_l=max_l, max_k=k, **flags)
    asts = [parse(src) for src in TOY_METHODS]
    vocab = build_vocab(asts, split_tokens=not hp.no_token_split, max_l=max_l)
    params = BeepParams.init(hp, vocab, rng)
    lists = []
    for ast in asts:
        cands = enumerate_operation_paths(ast)
        pick = np.sort(rng.choice(len(cands), size=int(rng.integers(2, k + 1)), replace=False))
        lists.append([cands[i] for i in pick])
    batch = encode_batch(lists, vocab, hp)
    labels = np.zeros(batch.mask.shape)
    for b, cands in enumerate(lists):
        labels[int(rng.integers(len(cands))), b] = 1.0

    def loss_fn():
        return batch_loss(probabilities(scores(params.tensors, batch, hp), batch), labels, batch.mask)

    return gradient_check(loss_fn, params.tensors, h)
