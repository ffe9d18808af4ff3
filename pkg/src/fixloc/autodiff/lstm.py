"""Single-layer LSTM over a padded, time-major batch.

Gate layout along the last axis of ``W`` and ``b`` is (input, forget, cell, output).
Masked steps carry the previous state through unchanged, so the state at the last
time step is each sequence's final state regardless of its length.
"""
import numpy as np

from ..errors import ShapeMismatch
from . import tensor as T
from .tensor import Tensor, _accumulate, _result, _sigmoid, as_tensor


def _check(x, mask, h0, c0, W, b):
    steps, batch, width = x.shape
    hidden = b.shape[0] // 4
    if W.shape != (width + hidden, 4 * hidden) or b.shape != (4 * hidden,):
        raise ShapeMismatch(f"lstm: W {W.shape} / b {b.shape} do not fit input width {width}")
    if mask.shape != (steps, batch):
        raise ShapeMismatch(f"lstm: mask {mask.shape} does not match input {x.shape[:2]}")
    for s in (h0, c0):
        if s is not None and s.shape != (batch, hidden):
            raise ShapeMismatch(f"lstm: initial state {s.shape} != {(batch, hidden)}")
    return steps, batch, width, hidden


def lstm(x, mask, W, b, h0=None, c0=None) -> Tensor:
    """Run the recurrence; returns S of shape (T, N, 2H) with S[t] = [h_t, c_t]."""
    x, W, b = as_tensor(x), as_tensor(W), as_tensor(b)
    h0 = as_tensor(h0) if h0 is not None else None
    c0 = as_tensor(c0) if c0 is not None else None
    mask = np.asarray(mask, dtype=np.float64)
    steps, batch, width, H = _check(x, mask, h0, c0, W, b)

    h_prev = h0.data if h0 is not None else np.zeros((batch, H))
    c_prev = c0.data if c0 is not None else np.zeros((batch, H))
    Wx, Wh = W.data[:width], W.data[width:]
    xw = x.data.reshape(steps * batch, width) @ Wx
    xw = xw.reshape(steps, batch, 4 * H) + b.data
    out = np.empty((steps, batch, 2 * H))
    gates = np.empty((steps, batch, 4 * H))   # i, f, g, o after their nonlinearities
    h_before = np.empty((steps, batch, H))
    c_before = np.empty((steps, batch, H))
    tanh_c = np.empty((steps, batch, H))
    for t in range(steps):
        h_before[t] = h_prev
        c_before[t] = c_prev
        a = xw[t] + h_prev @ Wh
        s = gates[t]
        s[:] = _sigmoid(a)
        s[:, 2 * H:3 * H] = np.tanh(a[:, 2 * H:3 * H])
        c_new = s[:, H:2 * H] * c_prev + s[:, :H] * s[:, 2 * H:3 * H]
        tc = np.tanh(c_new)
        tanh_c[t] = tc
        m = mask[t][:, None]
        h_prev = h_prev + m * (s[:, 3 * H:] * tc - h_prev)
        c_prev = c_prev + m * (c_new - c_prev)
        out[t, :, :H] = h_prev
        out[t, :, H:] = c_prev

    def back(grad):
        # local derivatives for every step at once; da = dc_new * d_c + dh_new * d_h
        i, f, g, o = (gates[..., k * H:(k + 1) * H] for k in range(4))
        d_c = np.empty((steps, batch, 4, H))
        d_c[:, :, 0] = g * i * (1.0 - i)
        d_c[:, :, 1] = c_before * f * (1.0 - f)
        d_c[:, :, 2] = i * (1.0 - g * g)
        d_c[:, :, 3] = 0.0
        d_o = tanh_c * o * (1.0 - o)
        d_tc = o * (1.0 - tanh_c * tanh_c)
        dh_next = np.zeros((batch, H))
        dc_next = np.zeros((batch, H))
        da_all = np.empty((steps, batch, 4, H))
        WhT = Wh.T
        for t in reversed(range(steps)):
            m = mask[t][:, None]
            dh = grad[t, :, :H] + dh_next
            dc = grad[t, :, H:] + dc_next
            dh_new = m * dh
            mdc = m * dc
            dc_new = mdc + dh_new * d_tc[t]
            da = da_all[t]
            np.multiply(dc_new[:, None, :], d_c[t], out=da)
            da[:, 3] = dh_new * d_o[t]
            dh_next = da.reshape(batch, 4 * H) @ WhT + (dh - dh_new)
            dc_next = dc_new * f[t] + (dc - mdc)
        flat = da_all.reshape(steps * batch, 4 * H)
        dWx = x.data.reshape(steps * batch, width).T @ flat
        dWh = h_before.reshape(steps * batch, H).T @ flat
        if x.requires_grad:
            _accumulate(x, (flat @ Wx.T).reshape(x.shape))
        _accumulate(W, np.concatenate([dWx, dWh], axis=0))
        _accumulate(b, flat.sum(axis=0))
        if h0 is not None:
            _accumulate(h0, dh_next)
        if c0 is not None:
            _accumulate(c0, dc_next)

    parents = [x, W, b] + [s for s in (h0, c0) if s is not None]
    return _result(out, parents, back, "lstm")


def lstm_reference(x, mask, W, b, h0=None, c0=None) -> Tensor:
    """Same recurrence composed from primitive ops; slow, used to cross-check ``lstm``."""
    x, W, b = as_tensor(x), as_tensor(W), as_tensor(b)
    mask = np.asarray(mask, dtype=np.float64)
    steps, batch, width, H = _check(x, mask, h0, c0, W, b)
    h = as_tensor(h0) if h0 is not None else Tensor(np.zeros((batch, H)))
    c = as_tensor(c0) if c0 is not None else Tensor(np.zeros((batch, H)))
    states = []
    for t in range(steps):
        a = T.matmul(T.concat([x[t], h], axis=1), W) + b
        i = T.sigmoid(a[:, :H])
        f = T.sigmoid(a[:, H:2 * H])
        g = T.tanh(a[:, 2 * H:3 * H])
        o = T.sigmoid(a[:, 3 * H:])
        c_new = f * c + i * g
        h_new = o * T.tanh(c_new)
        m = mask[t][:, None]
        h = m * h_new + (1.0 - m) * h
        c = m * c_new + (1.0 - m) * c
        states.append(T.reshape(T.concat([h, c], axis=1), (1, batch, 2 * H)))
    return T.concat(states, axis=0)
