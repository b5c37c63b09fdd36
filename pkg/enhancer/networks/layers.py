"""Parameter containers and the layers both networks are built from."""
import logging
import math

import numpy as np

from enhancer.autodiff import Tensor, functions as F
from enhancer.exceptions import ShapeError

logger = logging.getLogger(__name__)


class Parameter(Tensor):
    """Trainable leaf tensor. The optimizer replaces its `data` in place of mutation."""

    def __init__(self, data, dtype=None):
        super().__init__(data, requires_grad=True, dtype=dtype)


class Module:
    """Registers Parameters and sub-Modules assigned as attributes under hierarchical names."""

    def __init__(self):
        object.__setattr__(self, '_parameters', {})
        object.__setattr__(self, '_modules', {})

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._parameters[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def named_modules(self, prefix=''):
        yield prefix, self
        for name, module in self._modules.items():
            yield from module.named_modules(f"{prefix}.{name}" if prefix else name)

    def named_parameters(self, prefix=''):
        for name, param in self._parameters.items():
            full = f"{prefix}.{name}" if prefix else name
            param.name = full
            yield full, param
        for name, module in self._modules.items():
            yield from module.named_parameters(f"{prefix}.{name}" if prefix else name)

    def parameters(self):
        return [param for _, param in self.named_parameters()]

    def zero_grad(self):
        for param in self.parameters():
            param.grad = None

    def num_parameters(self):
        return sum(param.size for param in self.parameters())

    def state_dict(self):
        return {name: param.data.copy() for name, param in self.named_parameters()}

    def load_state_dict(self, state):
        own = dict(self.named_parameters())
        missing = sorted(set(own) - set(state))
        unexpected = sorted(set(state) - set(own))
        if missing or unexpected:
            raise ShapeError(f"state does not match module: missing {missing}, unexpected {unexpected}")
        for name, param in own.items():
            value = np.asarray(state[name])
            if value.shape != param.shape:
                raise ShapeError(f"parameter '{name}' has shape {param.shape}, state holds {value.shape}")
            param.data = value.astype(param.dtype, copy=True)


class ModuleList(Module):
    def __init__(self, modules=()):
        super().__init__()
        object.__setattr__(self, '_items', [])
        for module in modules:
            self.append(module)

    def append(self, module):
        self._modules[str(len(self._items))] = module
        self._items.append(module)

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __getitem__(self, index):
        return self._items[index]


def _uniform_fan_in(rng, shape, fan_in):
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Conv1d(Module):
    def __init__(self, in_channels, out_channels, kernel_size, rng, stride=1, dilation=1, padding=0, groups=1):
        super().__init__()
        self.stride = stride
        self.dilation = dilation
        self.padding = padding
        self.groups = groups
        fan_in = (in_channels // groups) * kernel_size
        self.weight = Parameter(_uniform_fan_in(rng, (out_channels, in_channels // groups, kernel_size), fan_in))
        self.bias = Parameter(np.zeros(out_channels))

    def forward(self, x):
        return F.conv1d(x, self.weight, self.bias, stride=self.stride, dilation=self.dilation,
                        padding=self.padding, groups=self.groups)


class Linear(Module):
    def __init__(self, in_features, out_features, rng):
        super().__init__()
        self.weight = Parameter(_uniform_fan_in(rng, (out_features, in_features), in_features))
        self.bias = Parameter(np.zeros(out_features))

    def forward(self, x):
        return F.linear(x, self.weight, self.bias)


class InstanceNorm1d(Module):
    def __init__(self, channels, eps=1e-5):
        super().__init__()
        self.eps = eps
        # cleared by introspection.linearize to measure the pure convolution topology
        self.enabled = True
        self.gain = Parameter(np.ones(channels))
        self.shift = Parameter(np.zeros(channels))

    def forward(self, x):
        if not self.enabled:
            return x
        return F.instance_norm(x, self.gain, self.shift, eps=self.eps)


class PReLU(Module):
    def __init__(self, num_parameters=1, init=0.25):
        super().__init__()
        self.alpha = Parameter(np.full(num_parameters, init))

    def forward(self, x):
        return F.prelu(x, self.alpha)


class DepthwiseSeparableConv(Module):
    """Per-channel (depthwise) convolution followed by a 1x1 channel-mixing (pointwise) convolution."""

    def __init__(self, in_channels, out_channels, kernel_size, rng, stride=1, dilation=1, padding=0):
        super().__init__()
        self.depthwise = Conv1d(in_channels, in_channels, kernel_size, rng, stride=stride,
                                dilation=dilation, padding=padding, groups=in_channels)
        self.pointwise = Conv1d(in_channels, out_channels, 1, rng)

    def forward(self, x):
        return self.pointwise(self.depthwise(x))


class DilatedBlock(Module):
    """1x1 conv -> IN/PReLU -> dilated depthwise conv -> IN/PReLU -> 1x1 conv, plus the block input."""

    def __init__(self, channels, hidden, kernel_size, dilation, rng, eps=1e-5):
        super().__init__()
        self.in_conv = Conv1d(channels, hidden, 1, rng)
        self.in_norm = InstanceNorm1d(hidden, eps)
        self.in_act = PReLU()
        # "same" length: symmetric padding keeps the frame count through every block
        self.depthwise = Conv1d(hidden, hidden, kernel_size, rng, dilation=dilation,
                                padding=dilation * (kernel_size - 1) // 2, groups=hidden)
        self.mid_norm = InstanceNorm1d(hidden, eps)
        self.mid_act = PReLU()
        self.out_conv = Conv1d(hidden, channels, 1, rng)

    def forward(self, x):
        y = self.in_act(self.in_norm(self.in_conv(x)))
        y = self.mid_act(self.mid_norm(self.depthwise(y)))
        return F.add(x, self.out_conv(y))
