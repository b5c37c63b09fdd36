"""Differentiable ops.

Primitive ops subclass `Function`; their backward rules are compositions of other
primitive ops, so every gradient is itself differentiable. Layer-level ops
(conv1d, linear, instance_norm, prelu) are compositions of primitives.
"""
import logging
import math

import numpy as np

from enhancer.autodiff.tensor import Function, Tensor, as_tensor
from enhancer.exceptions import DomainError, ShapeError

logger = logging.getLogger(__name__)

_LN10 = math.log(10.0)


def _constant(array, like):
    return Tensor(array, dtype=like.dtype)


def sum_to(grad, shape):
    """Reduce a broadcast gradient back to `shape`."""
    if grad.shape == tuple(shape):
        return grad
    return SumTo.apply(grad, shape=tuple(shape))


def broadcast_to(tensor, shape):
    if tensor.shape == tuple(shape):
        return tensor
    return BroadcastTo.apply(tensor, shape=tuple(shape))


class SumTo(Function):
    def forward(self, a, shape):
        self.in_shape = a.shape
        self.shape = shape
        lead = a.ndim - len(shape)
        out = a.sum(axis=tuple(range(lead)), dtype=np.float64) if lead else a.astype(np.float64)
        axes = tuple(i for i, n in enumerate(shape) if n == 1 and out.shape[i] != 1)
        if axes:
            out = out.sum(axis=axes, keepdims=True)
        return out.reshape(shape).astype(a.dtype)

    def backward(self, grad):
        return (broadcast_to(grad, self.in_shape),)


class BroadcastTo(Function):
    def forward(self, a, shape):
        self.in_shape = a.shape
        try:
            return np.ascontiguousarray(np.broadcast_to(a, shape))
        except ValueError as exc:
            raise ShapeError(f"cannot broadcast {a.shape} to {shape}") from exc

    def backward(self, grad):
        return (sum_to(grad, self.in_shape),)


def _broadcast_shape(a, b):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise ShapeError(f"shapes {a.shape} and {b.shape} do not broadcast") from exc


class Add(Function):
    def forward(self, a, b):
        _broadcast_shape(*self.inputs)
        return a + b

    def backward(self, grad):
        a, b = self.inputs
        return sum_to(grad, a.shape), sum_to(grad, b.shape)


class Sub(Function):
    def forward(self, a, b):
        _broadcast_shape(*self.inputs)
        return a - b

    def backward(self, grad):
        a, b = self.inputs
        return sum_to(grad, a.shape), sum_to(neg(grad), b.shape)


class Mul(Function):
    def forward(self, a, b):
        _broadcast_shape(*self.inputs)
        return a * b

    def backward(self, grad):
        a, b = self.inputs
        ga = sum_to(mul(grad, b), a.shape) if self.needs_input_grad[0] else None
        gb = sum_to(mul(grad, a), b.shape) if self.needs_input_grad[1] else None
        return ga, gb


class Div(Function):
    def forward(self, a, b):
        _broadcast_shape(*self.inputs)
        return a / b

    def backward(self, grad):
        a, b = self.inputs
        ga = sum_to(div(grad, b), a.shape) if self.needs_input_grad[0] else None
        gb = sum_to(neg(div(mul(grad, a), mul(b, b))), b.shape) if self.needs_input_grad[1] else None
        return ga, gb


class Neg(Function):
    def forward(self, a):
        return -a

    def backward(self, grad):
        return (neg(grad),)


class Square(Function):
    def forward(self, a):
        return a * a

    def backward(self, grad):
        (a,) = self.inputs
        return (mul(grad, mul(a, 2.0)),)


class Sqrt(Function):
    def forward(self, a):
        if np.any(a < 0):
            raise DomainError("sqrt of negative values")
        return np.sqrt(a)

    def backward(self, grad):
        (a,) = self.inputs
        return (div(grad, mul(sqrt(a), 2.0)),)


class Log10(Function):
    def forward(self, a):
        if np.any(a <= 0):
            raise DomainError(f"log10 needs strictly positive input, min is {a.min()}")
        return np.log10(a)

    def backward(self, grad):
        (a,) = self.inputs
        return (div(grad, mul(a, _LN10)),)


class Abs(Function):
    def forward(self, a):
        return np.abs(a)

    def backward(self, grad):
        (a,) = self.inputs
        return (mul(grad, _constant(np.sign(a.data), a)),)


class Relu(Function):
    def forward(self, a):
        return np.maximum(a, 0)

    def backward(self, grad):
        (a,) = self.inputs
        return (mul(grad, _constant((a.data > 0).astype(a.dtype), a)),)


class Sum(Function):
    # reductions accumulate in float64 whatever the tensor precision
    def forward(self, a, axis, keepdims):
        self.in_shape = a.shape
        self.axis = axis
        self.keepdims = keepdims
        return np.asarray(np.sum(a, axis=axis, keepdims=keepdims, dtype=np.float64), dtype=a.dtype)

    def backward(self, grad):
        if self.axis is None:
            kept = (1,) * len(self.in_shape)
        else:
            axes = self.axis if isinstance(self.axis, tuple) else (self.axis,)
            axes = {ax % len(self.in_shape) for ax in axes}
            kept = tuple(1 if i in axes else n for i, n in enumerate(self.in_shape))
        return (broadcast_to(reshape(grad, kept), self.in_shape),)


class Reshape(Function):
    def forward(self, a, shape):
        self.in_shape = a.shape
        try:
            return a.reshape(shape)
        except ValueError as exc:
            raise ShapeError(f"cannot reshape {a.shape} into {shape}") from exc

    def backward(self, grad):
        return (reshape(grad, self.in_shape),)


class Permute(Function):
    def forward(self, a, axes):
        if sorted(axes) != list(range(a.ndim)):
            raise ShapeError(f"axes {axes} are not a permutation for shape {a.shape}")
        self.axes = tuple(axes)
        return np.ascontiguousarray(np.transpose(a, self.axes))

    def backward(self, grad):
        return (permute(grad, tuple(np.argsort(self.axes))),)


class PadAxis(Function):
    def forward(self, a, axis, before, after):
        self.axis = axis % a.ndim
        self.before = before
        self.length = a.shape[self.axis]
        widths = [(0, 0)] * a.ndim
        widths[self.axis] = (before, after)
        return np.pad(a, widths)

    def backward(self, grad):
        return (slice_axis(grad, self.axis, self.before, self.before + self.length),)


class SliceAxis(Function):
    def forward(self, a, axis, start, stop):
        self.axis = axis % a.ndim
        self.start = start
        self.after = a.shape[self.axis] - stop
        index = [slice(None)] * a.ndim
        index[self.axis] = slice(start, stop)
        return np.ascontiguousarray(a[tuple(index)])

    def backward(self, grad):
        return (pad_axis(grad, self.axis, self.start, self.after),)


class Concat(Function):
    def forward(self, *arrays, axis):
        self.axis = axis % arrays[0].ndim
        self.bounds = np.cumsum([0] + [a.shape[self.axis] for a in arrays])
        try:
            return np.concatenate(arrays, axis=self.axis)
        except ValueError as exc:
            raise ShapeError(f"cannot concatenate shapes {[a.shape for a in arrays]}") from exc

    def backward(self, grad):
        return tuple(
            slice_axis(grad, self.axis, int(start), int(stop))
            for start, stop in zip(self.bounds[:-1], self.bounds[1:])
        )


class Unfold(Function):
    """Gather along the last axis: (..., L) -> (..., T, K) with out[..., t, k] = x[..., index[t, k]]."""

    def forward(self, a, index):
        self.index = index
        self.length = a.shape[-1]
        return a[..., index]

    def backward(self, grad):
        return (fold(grad, self.index, self.length),)


class Fold(Function):
    """Scatter-add along the last axis, the adjoint of Unfold.

    Every column index[:, k] must hold distinct positions.
    """

    def forward(self, a, index, length):
        self.index = index
        out = np.zeros(a.shape[:-2] + (length,), dtype=a.dtype)
        for k in range(index.shape[1]):
            out[..., index[:, k]] += a[..., :, k]
        return out

    def backward(self, grad):
        return (unfold(grad, self.index),)


def _parse_einsum(spec):
    operands, out = spec.replace(' ', '').split('->')
    a_sub, b_sub = operands.split(',')
    for name, sub, others in ((a_sub, a_sub, b_sub + out), (b_sub, b_sub, a_sub + out)):
        if len(set(sub)) != len(sub):
            raise ShapeError(f"repeated index in einsum operand '{name}'")
        missing = [c for c in sub if c not in others]
        if missing:
            raise ShapeError(f"einsum index {missing} of '{name}' is summed away alone; not supported")
    return a_sub, b_sub, out


class Einsum(Function):
    """Two-operand einsum without diagonal or lone-summed indices."""

    def forward(self, a, b, spec):
        self.subs = _parse_einsum(spec)
        try:
            return np.einsum(spec, a, b, optimize=True)
        except ValueError as exc:
            raise ShapeError(f"einsum '{spec}' does not fit shapes {a.shape} and {b.shape}") from exc

    def backward(self, grad):
        a, b = self.inputs
        a_sub, b_sub, out = self.subs
        ga = einsum(f"{out},{b_sub}->{a_sub}", grad, b) if self.needs_input_grad[0] else None
        gb = einsum(f"{a_sub},{out}->{b_sub}", a, grad) if self.needs_input_grad[1] else None
        return ga, gb


# primitive wrappers

def add(a, b):
    return Add.apply(a, b)


def sub(a, b):
    return Sub.apply(a, b)


def mul(a, b):
    return Mul.apply(a, b)


def div(a, b):
    return Div.apply(a, b)


def neg(a):
    return Neg.apply(a)


def square(a):
    return Square.apply(a)


def sqrt(a):
    return Sqrt.apply(a)


def log10(a):
    return Log10.apply(a)


def abs(a):  # noqa: A001
    return Abs.apply(a)


def relu(a):
    return Relu.apply(a)


def _normalize_axis(axis, ndim):
    if axis is None:
        return None
    if isinstance(axis, (tuple, list)):
        return tuple(ax % ndim for ax in axis)
    return axis % ndim


def sum(a, axis=None, keepdims=False):  # noqa: A001
    a = as_tensor(a)
    return Sum.apply(a, axis=_normalize_axis(axis, a.ndim), keepdims=keepdims)


def mean(a, axis=None, keepdims=False):
    a = as_tensor(a)
    axis = _normalize_axis(axis, a.ndim)
    if axis is None:
        count = a.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        count = int(np.prod([a.shape[ax] for ax in axes]))
    if count == 0:
        raise ShapeError(f"mean over an empty axis of shape {a.shape}")
    return mul(sum(a, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(a, shape):
    return Reshape.apply(a, shape=tuple(shape))


def permute(a, axes):
    return Permute.apply(a, axes=tuple(axes))


def pad_axis(a, axis, before, after):
    if before == 0 and after == 0:
        return as_tensor(a)
    return PadAxis.apply(a, axis=axis, before=before, after=after)


def slice_axis(a, axis, start, stop):
    return SliceAxis.apply(a, axis=axis, start=start, stop=stop)


def concat(tensors, axis):
    return Concat.apply(*tensors, axis=axis)


def unfold(a, index):
    return Unfold.apply(a, index=index)


def fold(a, index, length):
    return Fold.apply(a, index=index, length=length)


def einsum(spec, a, b):
    return Einsum.apply(a, b, spec=spec)


# layer-level ops

def conv_output_length(length, kernel_size, stride=1, dilation=1, padding=0):
    return (length + 2 * padding - dilation * (kernel_size - 1) - 1) // stride + 1


def frame_index(num_frames, kernel_size, stride=1, dilation=1):
    """Positions read by each output frame: index[t, k] = t * stride + k * dilation."""
    return (np.arange(num_frames)[:, None] * stride + np.arange(kernel_size)[None, :] * dilation).astype(np.intp)


def conv1d(x, weight, bias=None, stride=1, dilation=1, padding=0, groups=1):
    """1-D convolution (cross-correlation) over (B, C_in, L) or (C_in, L) input.

    `groups == C_in` is the depthwise case.
    """
    x = as_tensor(x)
    weight = as_tensor(weight)
    unbatched = x.ndim == 2
    if unbatched:
        x = reshape(x, (1,) + x.shape)
    if x.ndim != 3 or weight.ndim != 3:
        raise ShapeError(f"conv1d expects input (B, C, L) and weight (C_out, C_in/groups, K), "
                         f"got input {x.shape} and weight {weight.shape}")
    if stride < 1 or dilation < 1 or groups < 1 or padding < 0:
        raise ShapeError(f"conv1d needs stride, dilation, groups >= 1 and padding >= 0, "
                         f"got stride={stride} dilation={dilation} groups={groups} padding={padding}")
    batch, c_in, length = x.shape
    c_out, c_group, kernel = weight.shape
    if c_in % groups or c_out % groups or c_group != c_in // groups:
        raise ShapeError(f"conv1d shape mismatch: input {x.shape} and weight {weight.shape} with groups={groups}")
    if bias is not None and tuple(bias.shape) != (c_out,):
        raise ShapeError(f"conv1d bias shape {bias.shape} does not match {c_out} output channels")
    l_out = conv_output_length(length, kernel, stride, dilation, padding)
    if l_out < 1:
        raise ShapeError(f"conv1d input length {length} is too short for kernel {kernel}, "
                         f"dilation {dilation}, padding {padding}")

    x = pad_axis(x, -1, padding, padding)
    if kernel == 1 and groups == 1:
        if stride > 1:
            index = frame_index(l_out, 1, stride)
            x = reshape(unfold(x, index), (batch, c_in, l_out))
        out = einsum('bcl,oc->bol', x, reshape(weight, (c_out, c_in)))
    else:
        cols = unfold(x, frame_index(l_out, kernel, stride, dilation))
        cols = reshape(cols, (batch, groups, c_group, l_out, kernel))
        w = reshape(weight, (groups, c_out // groups, c_group, kernel))
        out = reshape(einsum('bgclk,gock->bgol', cols, w), (batch, c_out, l_out))
    if bias is not None:
        out = add(out, reshape(bias, (1, c_out, 1)))
    if unbatched:
        out = reshape(out, (c_out, l_out))
    return out


def linear(x, weight, bias=None):
    """Affine map over the trailing axis."""
    x = as_tensor(x)
    f_out, f_in = weight.shape
    if x.shape[-1] != f_in:
        raise ShapeError(f"linear expects trailing extent {f_in}, got input {x.shape} with weight {weight.shape}")
    lead = x.shape[:-1]
    rows = int(np.prod(lead)) if lead else 1
    out = einsum('ni,oi->no', reshape(x, (rows, f_in)), weight)
    if bias is not None:
        out = add(out, reshape(bias, (1, f_out)))
    return reshape(out, lead + (f_out,))


def instance_norm(x, gain, shift, eps=1e-5):
    """Normalize every channel of every item over its time axis, then apply gain/shift."""
    x = as_tensor(x)
    if eps <= 0:
        raise ValueError("instance_norm eps must be positive")
    channels = x.shape[-2]
    if tuple(gain.shape) != (channels,) or tuple(shift.shape) != (channels,):
        raise ShapeError(f"instance_norm gain/shift {gain.shape}/{shift.shape} do not match input {x.shape}")
    centered = sub(x, mean(x, axis=-1, keepdims=True))
    variance = mean(square(centered), axis=-1, keepdims=True)
    normed = div(centered, sqrt(add(variance, eps)))
    return add(mul(normed, reshape(gain, (channels, 1))), reshape(shift, (channels, 1)))


def prelu(x, alpha):
    """x where x >= 0, alpha * x elsewhere; alpha is a scalar or one slope per channel (axis -2)."""
    x = as_tensor(x)
    alpha = as_tensor(alpha)
    if alpha.size == 1:
        slope = reshape(alpha, ())
    elif x.ndim >= 2 and tuple(alpha.shape) == (x.shape[-2],):
        slope = reshape(alpha, (alpha.size, 1))
    else:
        raise ShapeError(f"prelu slopes {alpha.shape} do not broadcast over input {x.shape}")
    return sub(relu(x), mul(slope, relu(neg(x))))
