from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import AdamState, adam_step, backward
from ..diff import OperationPath, PatchRecord, enumerate_operation_paths, label_paths
from ..errors import EmptyDataset
from ..lang import parse
from ..seeding import rng_for
from .hparams import HyperParams
from .network import BeepParams, batch_loss, encode_batch, probabilities, scores
from .vocab import Vocab, build_vocab


@dataclass
class Example:
    """One record prepared for training: all candidates in (leaf, operator) order plus 0/1 labels."""

    record_id: str
    candidates: list[OperationPath]
    labels: np.ndarray


@dataclass
class EpochStats:
    epoch: int
    mean_loss: float
    train_recall1: float


@dataclass
class TrainingLog:
    epochs: list[EpochStats] = field(default_factory=list)

    @property
    def losses(self) -> list[float]:
        return [e.mean_loss for e in self.epochs]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["epoch", "mean_loss", "train_recall1"])
            for e in self.epochs:
                writer.writerow([e.epoch, repr(e.mean_loss), repr(e.train_recall1)])


def prepare_examples(records: list[PatchRecord]) -> tuple[list[Example], list]:
    examples, asts = [], []
    for rec in records:
        ast = parse(rec.buggy_src)
        cands = enumerate_operation_paths(ast)
        examples.append(Example(rec.id, cands, np.asarray(label_paths(cands, rec.oracle), dtype=np.float64)))
        asts.append(ast)
    return examples, asts


def cap_candidates(ex: Example, max_k: int, rng: np.random.Generator) -> list[int]:
    """Indices kept for one training step: everything, or all positives plus sampled negatives."""
    n = len(ex.candidates)
    if n <= max_k:
        return list(range(n))
    pos = np.flatnonzero(ex.labels > 0)
    neg = np.flatnonzero(ex.labels == 0)
    room = max(max_k - pos.size, 0)
    picked = rng.choice(neg, size=min(room, neg.size), replace=False)
    return sorted(int(i) for i in np.concatenate([pos, picked]))


def _batches(examples: list[Example], size: int, rng: np.random.Generator, pool: int = 8) -> list[list[int]]:
    """Shuffled mini-batches; within pools of ``pool`` batches, records of similar length are
    grouped to cut padding."""
    order = rng.permutation(len(examples))
    batches = []
    step = size * pool
    for lo in range(0, len(order), step):
        group = sorted(order[lo:lo + step], key=lambda i: (len(examples[i].candidates), i))
        batches.extend([int(i) for i in group[k:k + size]] for k in range(0, len(group), size))
    return [batches[i] for i in rng.permutation(len(batches))]


def train(records: list[PatchRecord], hp: HyperParams, seed: int, vocab: Vocab | None = None,
          log_fn=None) -> tuple[BeepParams, Vocab, TrainingLog]:
    """Mini-batch Adam on summed cross-entropy; returns parameters, vocabulary and per-epoch log."""
    if not records:
        raise EmptyDataset("training set is empty")
    examples, asts = prepare_examples(records)
    if vocab is None:
        vocab = build_vocab(asts, split_tokens=not hp.no_token_split, max_l=hp.max_l)
    params = BeepParams.init(hp, vocab, rng_for(seed, "init"))
    state = AdamState(lr=hp.lr)
    order_rng = rng_for(seed, "shuffle")
    sample_rng = rng_for(seed, "negatives")
    log = TrainingLog()
    for epoch in range(1, hp.epochs + 1):
        total_loss, hits = 0.0, 0
        for batch_ids in _batches(examples, hp.batch_size, order_rng):
            chunk = [examples[i] for i in batch_ids]
            kept = [cap_candidates(ex, hp.max_k, sample_rng) for ex in chunk]
            cand_lists = [[ex.candidates[i] for i in idx] for ex, idx in zip(chunk, kept)]
            batch = encode_batch(cand_lists, vocab, hp)
            labels = np.zeros(batch.mask.shape)
            for b, (ex, idx) in enumerate(zip(chunk, kept)):
                labels[:len(idx), b] = ex.labels[idx]
            P = probabilities(scores(params.tensors, batch, hp), batch)
            loss = batch_loss(P, labels, batch.mask)
            grads = backward(loss, params.tensors)
            adam_step(state, params.tensors, grads)
            total_loss += float(loss.data)
            top = np.argmax(np.where(batch.mask > 0, P.data, -1.0), axis=0)
            hits += int(np.sum(labels[top, np.arange(len(chunk))] > 0))
        stats = EpochStats(epoch, total_loss / len(examples), hits / len(examples))
        log.epochs.append(stats)
        if log_fn is not None:
            log_fn(stats)
    return params, vocab, log
