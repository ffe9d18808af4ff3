"""The pointer network over operation paths.

Shapes use K for operation-path positions (time axis of the encoder/decoder), B for
methods in a batch, and U for unique tokens or unique paths in a batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..autodiff import Tensor, lstm
from ..autodiff import ops as T
from ..diff import OperationPath
from ..errors import LengthMismatch, TooManyPaths
from ..lang import truncate_kinds
from .hparams import HyperParams
from .vocab import Vocab

PROB_FLOOR = 1e-7


def init_params(hp: HyperParams, vocab: Vocab, rng: np.random.Generator) -> dict[str, Tensor]:
    """Freshly initialised parameter set, keyed by name in a fixed order."""

    def uniform(shape, bound):
        return rng.uniform(-bound, bound, size=shape)

    def lstm_weights(width, hidden):
        bound = 1.0 / np.sqrt(hidden)
        return uniform((width + hidden, 4 * hidden), bound), uniform((4 * hidden,), bound)

    shapes = {}
    shapes["E_t"] = rng.normal(0.0, 0.1, size=(len(vocab.subtokens), hp.d_t))
    shapes["E_o"] = rng.normal(0.0, 0.1, size=(len(vocab.operators), hp.d_o))
    if hp.whole_path_embedding:
        shapes["E_paths"] = rng.normal(0.0, 0.1, size=(len(vocab.paths), 2 * hp.d_p))
    else:
        shapes["E_p"] = rng.normal(0.0, 0.1, size=(len(vocab.kinds), hp.d_p))
        shapes["path_fw_W"], shapes["path_fw_b"] = lstm_weights(hp.d_p, hp.d_p)
        shapes["path_bw_W"], shapes["path_bw_b"] = lstm_weights(hp.d_p, hp.d_p)
    if not hp.no_fc_layer:
        shapes["W_in"] = uniform((hp.fused_width, hp.d_hidden), np.sqrt(6.0 / (hp.fused_width + hp.d_hidden)))
    shapes["enc_W"], shapes["enc_b"] = lstm_weights(hp.encoder_input_width, hp.d_hidden)
    shapes["dec_W"], shapes["dec_b"] = lstm_weights(hp.d_hidden, hp.d_hidden)
    bound = np.sqrt(3.0 / hp.d_hidden)
    shapes["W1"] = uniform((hp.d_hidden, hp.d_hidden), bound)
    shapes["W2"] = uniform((hp.d_hidden, hp.d_hidden), bound)
    shapes["v"] = uniform((hp.d_hidden,), bound)
    return {name: Tensor(value, requires_grad=True, name=name) for name, value in shapes.items()}


@dataclass
class Batch:
    """Index arrays for one padded batch of candidate lists."""

    tok_units: np.ndarray     # (U_t, S) unit ids per unique token
    tok_mask: np.ndarray      # (U_t, S)
    path_fw: np.ndarray       # (U_p, L) kind ids root->leaf, right padded
    path_bw: np.ndarray       # (U_p, L) kind ids leaf->root, right padded
    path_mask: np.ndarray     # (U_p, L)
    path_ids: np.ndarray      # (U_p,) whole-path ids
    tok_row: np.ndarray       # (K, B)
    path_row: np.ndarray      # (K, B)
    op_id: np.ndarray         # (K, B)
    mask: np.ndarray          # (K, B) 1.0 on real positions
    lengths: list[int]


def encode_batch(cand_lists: list[list[OperationPath]], vocab: Vocab, hp: HyperParams) -> Batch:
    K = max(len(c) for c in cand_lists)
    B = len(cand_lists)
    tok_index: dict[str, int] = {}
    path_index: dict[tuple, int] = {}
    tok_row = np.zeros((K, B), dtype=np.int64)
    path_row = np.zeros((K, B), dtype=np.int64)
    op_id = np.zeros((K, B), dtype=np.int64)
    mask = np.zeros((K, B))
    for b, cands in enumerate(cand_lists):
        for k, op in enumerate(cands):
            tok_row[k, b] = tok_index.setdefault(op.token, len(tok_index))
            path_row[k, b] = path_index.setdefault(truncate_kinds(op.path.kinds, hp.max_l), len(path_index))
            op_id[k, b] = vocab.operator_id(op.operator)
            mask[k, b] = 1.0

    units = [vocab.token_ids(tok) for tok in tok_index]
    S = max(len(u) for u in units)
    tok_units = np.zeros((len(units), S), dtype=np.int64)
    tok_mask = np.zeros((len(units), S))
    for r, u in enumerate(units):
        tok_units[r, :len(u)] = u
        tok_mask[r, :len(u)] = 1.0

    paths = list(path_index)
    L = max(len(p) for p in paths)
    path_fw = np.zeros((len(paths), L), dtype=np.int64)
    path_bw = np.zeros((len(paths), L), dtype=np.int64)
    path_mask = np.zeros((len(paths), L))
    for r, kinds in enumerate(paths):
        ids = vocab.kind_ids(kinds)
        path_fw[r, :len(ids)] = ids
        path_bw[r, :len(ids)] = ids[::-1]
        path_mask[r, :len(ids)] = 1.0
    path_ids = np.array([vocab.path_id(p) for p in paths], dtype=np.int64)
    return Batch(tok_units, tok_mask, path_fw, path_bw, path_mask, path_ids,
                 tok_row, path_row, op_id, mask, [len(c) for c in cand_lists])


def _final_hidden(states: Tensor, hidden: int) -> Tensor:
    return states[-1, :, :hidden]


def path_vectors(params: dict[str, Tensor], batch: Batch, hp: HyperParams) -> Tensor:
    """V_p for every unique path: final forward and backward LSTM states, concatenated."""
    if hp.whole_path_embedding:
        return T.take(params["E_paths"], batch.path_ids)
    H = hp.d_p
    xs_fw = T.take(params["E_p"], batch.path_fw.T)      # (L, U_p, d_p)
    xs_bw = T.take(params["E_p"], batch.path_bw.T)
    m = batch.path_mask.T
    fw = lstm(xs_fw, m, params["path_fw_W"], params["path_fw_b"])
    bw = lstm(xs_bw, m, params["path_bw_W"], params["path_bw_b"])
    return T.concat([_final_hidden(fw, H), _final_hidden(bw, H)], axis=1)


def token_vectors(params: dict[str, Tensor], batch: Batch) -> Tensor:
    """V_t for every unique token: sum of its unit embeddings."""
    rows = T.take(params["E_t"], batch.tok_units)             # (U_t, S, d_t)
    return T.sum(rows * batch.tok_mask[:, :, None], axis=1)


def scores(params: dict[str, Tensor], batch: Batch, hp: HyperParams) -> Tensor:
    """Raw pointer scores u, shape (K, B); padded positions hold arbitrary values."""
    K, B = batch.mask.shape
    Vt = T.take(token_vectors(params, batch), batch.tok_row.reshape(-1))
    Vp = T.take(path_vectors(params, batch, hp), batch.path_row.reshape(-1))
    Vo = T.take(params["E_o"], batch.op_id.reshape(-1))
    X = T.concat([Vt, Vp, Vo], axis=1)
    z = X if hp.no_fc_layer else T.tanh(X @ params["W_in"])
    z = T.reshape(z, (K, B, hp.encoder_input_width))
    H = hp.d_hidden
    enc = lstm(z, batch.mask, params["enc_W"], params["enc_b"])
    e = enc[:, :, :H]
    dec = lstm(e, batch.mask, params["dec_W"], params["dec_b"], enc[-1, :, :H], enc[-1, :, H:])
    d = dec[:, :, :H]
    att = T.tanh(e @ params["W1"] + d @ params["W2"])
    return att @ params["v"]


def probabilities(u: Tensor, batch: Batch) -> Tensor:
    return T.softmax(u, axis=0, mask=batch.mask)


def batch_loss(P: Tensor, labels: np.ndarray, mask: np.ndarray) -> Tensor:
    """Summed binary cross-entropy over real positions, probabilities clamped away from 0 and 1."""
    Pc = T.clip(P, PROB_FLOOR, 1.0 - PROB_FLOOR)
    ll = labels * T.log(Pc) + (1.0 - labels) * T.log(1.0 - Pc)
    return -T.sum(ll * mask)


def loss_value(probs, labels) -> float:
    """Scalar cross-entropy for one method's probability vector and 0/1 labels."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if probs.shape != labels.shape:
        raise LengthMismatch(f"{probs.size} probabilities vs {labels.size} labels")
    p = np.clip(probs, PROB_FLOOR, 1.0 - PROB_FLOOR)
    return float(-np.sum(labels * np.log(p) + (1.0 - labels) * np.log(1.0 - p)))


@dataclass(frozen=True)
class RankedEntry:
    op: OperationPath
    probability: float
    score: float


@dataclass
class RankedPrediction:
    """Candidates sorted by probability (descending), ties by (leaf, operator)."""

    entries: list[RankedEntry]
    candidates: list[OperationPath]
    probs: np.ndarray  # aligned with ``candidates``

    @classmethod
    def from_scores(cls, candidates: list[OperationPath], u: np.ndarray) -> RankedPrediction:
        u = np.asarray(u, dtype=np.float64)
        p = np.exp(u - u.max())
        p /= math.fsum(p)  # exact sum, so the result does not depend on candidate order
        order = sorted(range(len(candidates)), key=lambda i: (-p[i], candidates[i].sort_key()))
        entries = [RankedEntry(candidates[i], float(p[i]), float(u[i])) for i in order]
        return cls(entries, list(candidates), p)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def ops(self) -> list[OperationPath]:
        return [e.op for e in self.entries]


@dataclass
class BeepParams:
    """Named parameter tensors plus the hyper-parameters that shaped them."""

    tensors: dict[str, Tensor]
    hp: HyperParams

    @classmethod
    def init(cls, hp: HyperParams, vocab: Vocab, rng: np.random.Generator) -> BeepParams:
        return cls(init_params(hp, vocab, rng), hp)

    def zeros(self) -> BeepParams:
        return BeepParams({k: Tensor(np.zeros_like(t.data), requires_grad=True, name=k)
                           for k, t in self.tensors.items()}, self.hp)

    def arrays(self) -> dict[str, np.ndarray]:
        return {k: t.data for k, t in self.tensors.items()}


def canonical_order(paths: list[OperationPath]) -> list[int]:
    """Positions of ``paths`` sorted by (leaf, operator); the encoder always reads this order."""
    return sorted(range(len(paths)), key=lambda i: paths[i].sort_key())


def raw_scores(cand_lists: list[list[OperationPath]], params: BeepParams, vocab: Vocab) -> list[np.ndarray]:
    """Raw u per candidate for several lists (each at most max_k long), aligned with the input order."""
    orders = [canonical_order(c) for c in cand_lists]
    batch = encode_batch([[c[i] for i in o] for c, o in zip(cand_lists, orders)], vocab, params.hp)
    u = scores(params.tensors, batch, params.hp).data
    out = []
    for b, order in enumerate(orders):
        col = np.empty(len(order))
        col[order] = u[:len(order), b]
        out.append(col)
    return out


def forward(paths: list[OperationPath], params: BeepParams, vocab: Vocab) -> RankedPrediction:
    """Score one method's candidate list (at most max_k paths)."""
    if not paths:
        raise ValueError("forward needs at least one operation path")
    if len(paths) > params.hp.max_k:
        raise TooManyPaths(f"{len(paths)} operation paths exceed max_k={params.hp.max_k}")
    return RankedPrediction.from_scores(paths, raw_scores([paths], params, vocab)[0])


def loss(pred: RankedPrediction, labels) -> float:
    """Cross-entropy of a prediction; ``labels`` align with ``pred.candidates``."""
    return loss_value(pred.probs, labels)
