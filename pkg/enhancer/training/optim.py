"""Bias-corrected Adam over named parameter arrays."""
import logging

import attrs
import numpy as np

from enhancer.exceptions import NonFiniteError, ShapeError

logger = logging.getLogger(__name__)


@attrs.define
class AdamState:
    """Step counter plus first and second moment estimates, keyed like the parameters."""
    t: int = 0
    m: dict = attrs.Factory(dict)
    v: dict = attrs.Factory(dict)


def adam_step(params, grads, state: AdamState, lr, beta1=0.5, beta2=0.9, eps=1e-8):
    """One Adam update of every array in `params` (dict name -> ndarray).

    Returns the updated params and state; the inputs are left untouched.
    """
    if set(params) != set(grads):
        raise ShapeError(f"params and grads name different tensors: {sorted(set(params) ^ set(grads))}")
    t = state.t + 1
    bc1 = 1.0 - beta1 ** t
    bc2 = 1.0 - beta2 ** t
    new_params, new_m, new_v = {}, {}, {}
    for name, value in params.items():
        g = np.asarray(grads[name])
        if g.shape != value.shape:
            raise ShapeError(f"gradient of '{name}' has shape {g.shape}, parameter {value.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient for '{name}'")
        m = state.m.get(name, np.zeros_like(value))
        v = state.v.get(name, np.zeros_like(value))
        if m.shape != value.shape or v.shape != value.shape:
            raise ShapeError(f"optimizer state of '{name}' does not match parameter shape {value.shape}")
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * (g * g)
        update = (lr / bc1) * m / (np.sqrt(v / bc2) + eps)
        new_params[name] = (value - update).astype(value.dtype, copy=False)
        new_m[name] = m.astype(value.dtype, copy=False)
        new_v[name] = v.astype(value.dtype, copy=False)
    return new_params, AdamState(t=t, m=new_m, v=new_v)


class Adam:
    """Applies `adam_step` to the parameters of a module, reading their `grad` buffers.

    A parameter whose buffer is empty takes a zero gradient for the step.
    """

    def __init__(self, named_params, lr, beta1=0.5, beta2=0.9, eps=1e-8):
        self.params = dict(named_params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState()

    def zero_grad(self):
        for param in self.params.values():
            param.grad = None

    def step(self):
        values = {name: p.data for name, p in self.params.items()}
        grads = {name: p.grad if p.grad is not None else np.zeros_like(p.data) for name, p in self.params.items()}
        updated, self.state = adam_step(values, grads, self.state, self.lr, self.beta1, self.beta2, self.eps)
        for name, param in self.params.items():
            param.data = updated[name]

    def state_dict(self):
        return {'t': self.state.t, 'm': dict(self.state.m), 'v': dict(self.state.v)}

    def load_state_dict(self, state):
        for key in ('m', 'v'):
            unknown = sorted(set(state[key]) - set(self.params))
            if unknown:
                raise ShapeError(f"optimizer state names unknown parameters: {unknown}")
        self.state = AdamState(t=int(state['t']), m=dict(state['m']), v=dict(state['v']))
