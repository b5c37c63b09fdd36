"""Depthwise-separable critic scoring a candidate waveform conditioned on the noisy one."""
import logging

import numpy as np

from enhancer.autodiff import functions as F, Tensor
from enhancer.exceptions import ConfigError, ShapeError
from enhancer.networks.config import DiscriminatorConfig
from enhancer.networks.layers import (
    Conv1d,
    DepthwiseSeparableConv,
    InstanceNorm1d,
    Linear,
    Module,
    ModuleList,
    PReLU,
)

logger = logging.getLogger(__name__)


class CriticLayer(Module):
    def __init__(self, in_channels, out_channels, cfg: DiscriminatorConfig, rng):
        super().__init__()
        self.conv = DepthwiseSeparableConv(in_channels, out_channels, cfg.kernel, rng,
                                           stride=cfg.stride, padding=(cfg.kernel - 1) // 2)
        self.norm = InstanceNorm1d(out_channels, cfg.in_eps)
        self.act = PReLU()

    def forward(self, x):
        return self.act(self.norm(self.conv(x)))


class Discriminator(Module):
    """Unbounded critic: no terminal sigmoid, one real score per batch item."""

    def __init__(self, cfg: DiscriminatorConfig, frame_len, rng):
        super().__init__()
        self.cfg = cfg
        self.frame_len = frame_len
        widths = (2,) + tuple(cfg.channels)
        self.layers = ModuleList(
            CriticLayer(c_in, c_out, cfg, rng) for c_in, c_out in zip(widths[:-1], widths[1:])
        )
        self.projection = Conv1d(widths[-1], 1, 1, rng)
        self.out_length = cfg.output_length(frame_len)
        self.head = Linear(self.out_length, 1, rng)

    def forward(self, reference, conditioned_on, trace=None):
        reference = reference if isinstance(reference, Tensor) else Tensor(reference)
        conditioned_on = conditioned_on if isinstance(conditioned_on, Tensor) else Tensor(conditioned_on)
        if reference.shape != conditioned_on.shape:
            raise ShapeError(f"critic inputs differ in shape: {reference.shape} vs {conditioned_on.shape}")
        if reference.ndim != 2 or reference.shape[1] != self.frame_len:
            raise ShapeError(f"critic expects (B, {self.frame_len}) inputs, got {reference.shape}")
        batch = reference.shape[0]
        x = F.concat([F.reshape(reference, (batch, 1, self.frame_len)),
                      F.reshape(conditioned_on, (batch, 1, self.frame_len))], axis=1)
        for index, layer in enumerate(self.layers):
            x = layer(x)
            if trace is not None:
                trace[f"layer{index + 1}"] = x
        x = F.reshape(self.projection(x), (batch, self.out_length))
        return F.reshape(self.head(x), (batch,))


def build_discriminator(cfg: DiscriminatorConfig, frame_len: int, seed: int) -> Discriminator:
    problems = cfg.violations(frame_len)
    if problems:
        raise ConfigError('invalid discriminator configuration',
                          {f"discriminator.{field}": msgs for field, msgs in problems.items()})
    return Discriminator(cfg, frame_len, np.random.default_rng(seed))
