import numpy as np

from .tensor import Tensor, backward


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Norm-based relative error ||a - n|| / (||a|| + ||n||); 0 when both vanish."""
    denom = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if denom < 1e-12:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / denom)


def gradient_check(loss_fn, params: dict[str, Tensor], h: float = 1e-5) -> dict[str, float]:
    """Compare backprop gradients of ``loss_fn()`` against central differences.

    Returns the relative error per parameter tensor.
    """
    analytic = backward(loss_fn(), params)
    errors = {}
    for name, p in params.items():
        numeric = np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        num_flat = numeric.reshape(-1)
        for k in range(flat.size):
            saved = flat[k]
            flat[k] = saved + h
            up = float(loss_fn().data)
            flat[k] = saved - h
            down = float(loss_fn().data)
            flat[k] = saved
            num_flat[k] = (up - down) / (2 * h)
        errors[name] = relative_error(analytic[name], numeric)
    return errors
