import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from fixloc.autodiff import (
    AdamState, Tensor, adam_step, backward, gradient_check, load_checkpoint, lstm, lstm_reference, ops,
    save_checkpoint,
)
from fixloc.errors import CheckpointError, NonFiniteGradient, NonScalarLoss, ShapeMismatch


def param(rng, *shape, name=None):
    return Tensor(rng.normal(size=shape), requires_grad=True, name=name)


def test_forward_values():
    np.testing.assert_allclose(ops.softmax(Tensor(np.zeros(3))).data, [1 / 3] * 3)
    assert ops.tanh(Tensor(0.0)).data == 0.0
    np.testing.assert_array_equal((Tensor(np.ones((2, 3))) @ Tensor(np.ones((3, 1)))).data, [[3.0], [3.0]])
    np.testing.assert_allclose(ops.sigmoid(Tensor(np.array([-800.0, 0.0, 800.0]))).data, [0.0, 0.5, 1.0])


def test_shape_mismatch_names_both_shapes():
    with pytest.raises(ShapeMismatch, match=r"\(2, 3\).*\(2, 3\)"):
        Tensor(np.ones((2, 3))) @ Tensor(np.ones((2, 3)))
    with pytest.raises(ShapeMismatch):
        Tensor(np.ones(3)) + Tensor(np.ones(4))


def test_simple_gradients():
    p = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)
    np.testing.assert_array_equal(backward(ops.sum(p), {"p": p})["p"], np.ones(3))
    np.testing.assert_array_equal(backward(ops.sum(p * p), {"p": p})["p"], 2 * p.data)


def test_unreachable_parameter_gets_zero_gradient():
    p, q = Tensor(np.ones(2), requires_grad=True), Tensor(np.ones((2, 2)), requires_grad=True)
    grads = backward(ops.sum(p), {"p": p, "q": q})
    np.testing.assert_array_equal(grads["q"], np.zeros((2, 2)))


def test_non_scalar_loss():
    with pytest.raises(NonScalarLoss):
        backward(Tensor(np.ones(2), requires_grad=True))


def test_shared_subexpression_accumulates():
    p = Tensor(np.array(3.0), requires_grad=True)
    y = p * p
    assert backward(y * y + y, {"p": p})["p"] == pytest.approx(4 * 27 + 6)


PRIMITIVES = {
    "add": lambda a, b: ops.add(a, b),
    "mul": lambda a, b: ops.mul(a, b),
    "matmul": lambda a, b: ops.matmul(a, ops.reshape(b, (3, 4))),
    "tanh": lambda a, b: ops.tanh(a) * b,
    "sigmoid": lambda a, b: ops.sigmoid(a) * b,
    "log": lambda a, b: ops.log(ops.sigmoid(a)) * b,
    "softmax": lambda a, b: ops.softmax(a, axis=0) * b,
    "masked_softmax": lambda a, b: ops.softmax(a, axis=0, mask=np.array([[1, 1, 1, 0]] * 3).T == 1) * b,
    "concat": lambda a, b: ops.concat([a, b], axis=1),
    "getitem": lambda a, b: a[1:3] * b[:2],
    "take": lambda a, b: ops.take(a, np.array([0, 2, 2, 3])) * b,
    "sum_axis": lambda a, b: ops.sum(a * b, axis=0, keepdims=True),
    "clip": lambda a, b: ops.clip(a, -0.5, 0.5) * b,
    "neg_sub": lambda a, b: (-a) - b,
}


@pytest.mark.parametrize("name", sorted(PRIMITIVES))
def test_primitive_gradients(name):
    rng = np.random.default_rng(len(name))
    a, b = param(rng, 4, 3), param(rng, 4, 3)
    if name == "clip":
        a.data += np.sign(a.data) * 0.05  # keep away from the kinks
    fn = PRIMITIVES[name]
    weights = None

    def loss():
        nonlocal weights
        out = fn(a, b)
        if weights is None:
            weights = np.random.default_rng(1).normal(size=out.shape)
        return ops.sum(out * Tensor(weights))

    errors = gradient_check(loss, {"a": a, "b": b})
    assert max(errors.values()) < 1e-6, errors


def test_random_three_layer_graph():
    rng = np.random.default_rng(0)
    x = Tensor(rng.normal(size=(5, 4)))
    params = {"W1": param(rng, 4, 6), "b1": param(rng, 6), "W2": param(rng, 6, 6), "W3": param(rng, 6, 1)}

    def loss():
        h = ops.tanh(x @ params["W1"] + params["b1"])
        h = ops.sigmoid(h @ params["W2"])
        p = ops.softmax(h @ params["W3"], axis=0)
        return -ops.sum(ops.log(p))

    errors = gradient_check(loss, params)
    assert max(errors.values()) < 1e-4


def test_lstm_matches_reference_and_gradcheck():
    rng = np.random.default_rng(4)
    T, B, D, H = 5, 3, 4, 3
    x = param(rng, T, B, D)
    mask = np.ones((T, B))
    mask[3:, 1] = 0
    mask[1:, 2] = 0
    W, b = param(rng, D + H, 4 * H), param(rng, 4 * H)
    h0, c0 = param(rng, B, H), param(rng, B, H)
    fast = lstm(x, mask, W, b, h0, c0)
    slow = lstm_reference(x, mask, W, b, h0, c0)
    np.testing.assert_allclose(fast.data, slow.data, atol=1e-14)
    weights = Tensor(rng.normal(size=fast.shape))

    def loss():
        return ops.sum(lstm(x, mask, W, b, h0, c0) * weights)

    errors = gradient_check(loss, {"x": x, "W": W, "b": b, "h0": h0, "c0": c0})
    assert max(errors.values()) < 1e-6
    # padded steps keep the previous state
    np.testing.assert_array_equal(fast.data[4, 1], fast.data[2, 1])


@settings(max_examples=40, deadline=None)
@given(hnp.arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 4)),
                  elements=st.floats(-50, 50, allow_nan=False)))
def test_softmax_is_a_distribution(x):
    p = ops.softmax(Tensor(x), axis=0).data
    assert np.all(p >= 0)
    np.testing.assert_allclose(p.sum(axis=0), 1.0, atol=1e-9)


def test_adam_zero_gradient_keeps_parameters():
    p = {"w": Tensor(np.array([1.0, 2.0]), requires_grad=True)}
    state = adam_step(AdamState(), p, {"w": np.zeros(2)})
    np.testing.assert_array_equal(p["w"].data, [1.0, 2.0])
    assert state.step == 1


def test_adam_first_step_by_hand():
    # m = 0.1, v = 0.001; bias correction gives m_hat = v_hat = 1
    p = {"w": Tensor(np.array(0.5), requires_grad=True)}
    adam_step(AdamState(lr=0.001), p, {"w": np.array(1.0)})
    assert p["w"].data == pytest.approx(0.5 - 0.001 / (1.0 + 1e-8), abs=1e-15)


def test_adam_moves_against_constant_gradient():
    p = {"w": Tensor(np.array([0.0, 0.0]), requires_grad=True)}
    state = AdamState(lr=0.01)
    for _ in range(50):
        adam_step(state, p, {"w": np.array([2.0, -0.5])})
    assert p["w"].data[0] < 0 < p["w"].data[1]
    assert state.step == 50


def test_adam_rejects_non_finite():
    p = {"w": Tensor(np.zeros(2), requires_grad=True)}
    with pytest.raises(NonFiniteGradient):
        adam_step(AdamState(), p, {"w": np.array([np.nan, 0.0])})


def test_training_is_bit_deterministic():
    def run():
        rng = np.random.default_rng(9)
        x = Tensor(rng.normal(size=(8, 3)))
        params = {"W": param(rng, 3, 2)}
        state = AdamState()
        for _ in range(20):
            loss = ops.sum(ops.tanh(x @ params["W"]) * ops.tanh(x @ params["W"]))
            adam_step(state, params, backward(loss, params))
        return params["W"].data.tobytes()

    assert run() == run()


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    tensors = {"a": rng.normal(size=(3, 4)), "b": rng.normal(size=(2,)), "s": np.array(1.5)}
    path = tmp_path / "m.ckpt"
    save_checkpoint(path, tensors, {"hp": {"d": 4}})
    back, meta = load_checkpoint(path)
    assert meta == {"hp": {"d": 4}}
    for name, arr in tensors.items():
        np.testing.assert_array_equal(back[name], arr)
    first = path.read_bytes()
    save_checkpoint(path, tensors, {"hp": {"d": 4}})
    assert path.read_bytes() == first
    assert first[:8] == b"FXLCKPT\x00"


def test_checkpoint_errors(tmp_path):
    path = tmp_path / "m.ckpt"
    save_checkpoint(path, {"a": np.ones(4)}, {})
    blob = path.read_bytes()
    (tmp_path / "bad.ckpt").write_bytes(b"NOTACKPT" + blob[8:])
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "bad.ckpt")
    (tmp_path / "short.ckpt").write_bytes(blob[:-8])
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "short.ckpt")
