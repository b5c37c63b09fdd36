"""Finite-difference checking of analytic gradients (64-bit)."""
import numpy as np

from enhancer.autodiff.graph import grad
from enhancer.autodiff.tensor import Tensor, no_grad, precision
from enhancer.autodiff import functions as F


def _scalarize(output, projection):
    if output.size == 1:
        return F.reshape(output, ())
    return F.sum(F.mul(output, projection))


def grad_check(fn, inputs, eps=1e-6, seed=0):
    """Max over every input element of |analytic - numeric| / max(1, |numeric|).

    `fn` maps tensors to a tensor; non-scalar outputs are reduced with a fixed
    random projection so every output element takes part.
    """
    if not 1e-7 <= eps <= 1e-4:
        raise ValueError(f"eps must lie in [1e-7, 1e-4], got {eps}")
    rng = np.random.default_rng(seed)
    with precision('float64'):
        arrays = [np.array(x, dtype=np.float64) for x in inputs]
        leaves = [Tensor(a, requires_grad=True) for a in arrays]
        output = fn(*leaves)
        projection = Tensor(rng.standard_normal(output.shape))
        analytic = [g.data for g in grad(_scalarize(output, projection), leaves)]

        def evaluate(values):
            with no_grad():
                return _scalarize(fn(*[Tensor(v) for v in values]), projection).item()

        worst = 0.0
        for i, array in enumerate(arrays):
            flat = array.reshape(-1)
            for j in range(flat.size):
                original = flat[j]
                flat[j] = original + eps
                plus = evaluate(arrays)
                flat[j] = original - eps
                minus = evaluate(arrays)
                flat[j] = original
                numeric = (plus - minus) / (2 * eps)
                error = abs(analytic[i].reshape(-1)[j] - numeric) / max(1.0, abs(numeric))
                worst = max(worst, error)
    return worst
