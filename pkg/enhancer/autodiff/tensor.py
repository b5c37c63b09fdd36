"""Tensor and the graph node base class of the reverse-mode engine.

Backward rules of every op are written with Tensor ops themselves, so a gradient
can be built as a graph (``create_graph=True``) and differentiated again. That is
what the zero-centered gradient penalties need.
"""
import contextlib
import logging
import threading

import numpy as np

from enhancer.exceptions import NonFiniteError

logger = logging.getLogger(__name__)

_DTYPES = {
    'float32': np.float32,
    'float64': np.float64,
}


class _EngineState(threading.local):
    def __init__(self):
        self.grad_enabled = True
        self.dtype = np.float32


_state = _EngineState()

# process-wide so that evaluation and loader threads follow the command setting
_check_nonfinite = True


def default_dtype():
    return _state.dtype


@contextlib.contextmanager
def precision(name):
    """Create new tensors in `name` precision ('float32' or 'float64') inside the block."""
    if name not in _DTYPES:
        raise ValueError(f"unknown precision '{name}', expected one of {sorted(_DTYPES)}")
    previous = _state.dtype
    _state.dtype = _DTYPES[name]
    try:
        yield
    finally:
        _state.dtype = previous


@contextlib.contextmanager
def no_grad():
    """Run ops without recording graph nodes."""
    previous = _state.grad_enabled
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


@contextlib.contextmanager
def enable_grad():
    previous = _state.grad_enabled
    _state.grad_enabled = True
    try:
        yield
    finally:
        _state.grad_enabled = previous


def is_grad_enabled():
    return _state.grad_enabled


def set_check_nonfinite(enabled):
    """Switch the NaN/Inf policy on forward outputs and gradients. Returns the previous value."""
    global _check_nonfinite
    previous = _check_nonfinite
    _check_nonfinite = bool(enabled)
    return previous


def check_nonfinite_enabled():
    return _check_nonfinite


class Tensor:
    """Dense real array that can take part in a differentiation graph.

    Tensors produced by ops are never mutated. Leaves (parameters, inputs) own a
    `grad` buffer that `backward` accumulates into.
    """

    def __init__(self, data, requires_grad=False, dtype=None, _node=None):
        if isinstance(data, Tensor):
            data = data.data
        self.data = np.asarray(data, dtype=dtype or _state.dtype)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.node = _node
        self.name = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def is_leaf(self):
        return self.node is None

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def detach(self):
        return Tensor(self.data, requires_grad=False, dtype=self.data.dtype)

    def zero_grad(self):
        self.grad = None

    def backward(self, inputs=None):
        from enhancer.autodiff.graph import backward
        backward(self, inputs=inputs)

    # arithmetic
    def __add__(self, other):
        return F.add(self, other)

    def __radd__(self, other):
        return F.add(other, self)

    def __sub__(self, other):
        return F.sub(self, other)

    def __rsub__(self, other):
        return F.sub(other, self)

    def __mul__(self, other):
        return F.mul(self, other)

    def __rmul__(self, other):
        return F.mul(other, self)

    def __truediv__(self, other):
        return F.div(self, other)

    def __rtruediv__(self, other):
        return F.div(other, self)

    def __neg__(self):
        return F.neg(self)

    def sum(self, axis=None, keepdims=False):
        return F.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return F.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return F.reshape(self, shape)

    def permute(self, *axes):
        return F.permute(self, axes)

    def square(self):
        return F.square(self)

    def sqrt(self):
        return F.sqrt(self)

    def abs(self):
        return F.abs(self)

    def relu(self):
        return F.relu(self)

    def log10(self):
        return F.log10(self)

    def __repr__(self):
        grad = ', requires_grad=True' if self.requires_grad else ''
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{grad})"


def as_tensor(value, dtype=None):
    if isinstance(value, Tensor):
        return value
    return Tensor(value, dtype=dtype)


class Function:
    """One recorded op: its inputs plus whatever forward saved for backward.

    Subclasses implement `forward` on numpy arrays and `backward` with Tensor ops,
    returning one gradient (or None) per input.
    `needs_input_grad` flags the inputs a backward sweep wants a gradient for.
    """

    def __init__(self, *inputs):
        self.inputs = inputs
        self.needs_input_grad = tuple(t.requires_grad for t in inputs)

    def forward(self, *arrays):
        raise NotImplementedError(f"{type(self).__name__}.forward")

    def backward(self, grad):
        raise NotImplementedError(f"{type(self).__name__}.backward")

    @classmethod
    def apply(cls, *inputs, **kwargs):
        inputs = tuple(as_tensor(t) for t in inputs)
        fn = cls(*inputs)
        out = fn.forward(*(t.data for t in inputs), **kwargs)
        if _check_nonfinite and not np.all(np.isfinite(out)):
            raise NonFiniteError(f"{cls.__name__} produced non-finite values (output shape {np.shape(out)})")
        requires_grad = _state.grad_enabled and any(t.requires_grad for t in inputs)
        return Tensor(out, requires_grad=requires_grad, dtype=np.asarray(out).dtype,
                      _node=fn if requires_grad else None)


# The op module needs Tensor and Function, so it is bound after both exist.
from enhancer.autodiff import functions as F  # noqa: E402
