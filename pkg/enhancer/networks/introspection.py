"""Shape ledger, parameter counts and receptive field of the networks."""
import logging

import attrs
import numpy as np

from enhancer.autodiff import Tensor, no_grad, precision
from enhancer.networks.config import GeneratorConfig
from enhancer.networks.layers import InstanceNorm1d, PReLU

logger = logging.getLogger(__name__)

# parameter count of the published model, in parameters
REFERENCE_PARAMETER_COUNT = 5.12e6


@attrs.frozen
class ParameterCount:
    total: int
    per_module: dict

    def within(self, reference=REFERENCE_PARAMETER_COUNT, tolerance=0.10):
        return abs(self.total - reference) <= tolerance * reference


@attrs.frozen
class ReceptiveField:
    frames: int
    samples: int


def count_parameters(model, depth=1):
    """Element count of every registered tensor, grouped by the first `depth` name components."""
    per_module = {}
    for name, param in model.named_parameters():
        group = '.'.join(name.split('.')[:depth])
        per_module[group] = per_module.get(group, 0) + param.size
    return ParameterCount(total=sum(per_module.values()), per_module=per_module)


def receptive_field(cfg: GeneratorConfig) -> ReceptiveField:
    """Centered span of the TDCN stack: half of it lies in the past, half in the future."""
    frames = 1 + cfg.num_tdcn * sum((cfg.block_kernel - 1) * d for d in cfg.dilations())
    return ReceptiveField(frames=frames, samples=(frames - 1) * cfg.enc_stride + cfg.enc_kernel)


def stage_shapes(cfg: GeneratorConfig, batch=1):
    """Expected (stage, shape) ledger of the generator forward pass."""
    frames = cfg.num_frames
    return [
        ('input', (batch, cfg.frame_len)),
        ('encoder', (batch, cfg.enc_channels, frames)),
        ('bottleneck', (batch, cfg.bottleneck_channels, frames)),
        ('tdcn', (batch, cfg.bottleneck_channels, frames)),
        ('mask', (batch, cfg.masked_channels, frames)),
        ('masked', (batch, cfg.masked_channels, frames)),
        ('decoder_frames', (batch, frames, cfg.enc_kernel)),
        ('output', (batch, cfg.frame_len)),
    ]


def linearize(module):
    """Make the block stack linear: PReLU slopes 1, instance norms bypassed."""
    for _, sub in module.named_modules():
        if isinstance(sub, PReLU):
            sub.alpha.data = np.ones_like(sub.alpha.data)
        elif isinstance(sub, InstanceNorm1d):
            sub.enabled = False
    return module


def measure_receptive_field(generator, tolerance=1e-9):
    """Frames of TDCN output that change when a single input frame is perturbed.

    Only meaningful once the generator went through `linearize`.
    """
    cfg = generator.cfg
    expected = receptive_field(cfg).frames
    length = 2 * expected + 1
    centre = length // 2
    rng = np.random.default_rng(0)
    with precision('float64'), no_grad():
        base = rng.standard_normal((1, cfg.bottleneck_channels, length))
        bumped = base.copy()
        bumped[:, :, centre] += 1.0
        outputs = []
        for features in (base, bumped):
            x = Tensor(features)
            for block in generator.blocks:
                x = block(x)
            outputs.append(x.data)
    changed = np.flatnonzero(np.abs(outputs[1] - outputs[0]).max(axis=1)[0] > tolerance)
    return int(changed.max() - changed.min() + 1)