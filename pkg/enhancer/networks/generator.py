"""Masking generator: encoder -> temporal dilated convolutional mask estimator -> decoder."""
import logging

import numpy as np

from enhancer.autodiff import functions as F, no_grad, Tensor
from enhancer.exceptions import ConfigError, ShapeError
from enhancer.networks.config import GeneratorConfig
from enhancer.networks.layers import Conv1d, DilatedBlock, InstanceNorm1d, Linear, Module, ModuleList

logger = logging.getLogger(__name__)


class Generator(Module):
    """Maps (B, frame_len) noisy frames to (B, frame_len) enhanced frames.

    The encoder IR is multiplied by a non-negative mask estimated from it; a
    per-frame linear decoder and overlap-add at the encoder stride rebuild the
    waveform.
    """

    def __init__(self, cfg: GeneratorConfig, rng):
        super().__init__()
        self.cfg = cfg
        self.encoder = Conv1d(1, cfg.enc_channels, cfg.enc_kernel, rng, stride=cfg.enc_stride)
        self.bottleneck_norm = InstanceNorm1d(cfg.enc_channels, cfg.in_eps)
        self.bottleneck = Conv1d(cfg.enc_channels, cfg.bottleneck_channels, 1, rng)
        self.blocks = ModuleList(
            DilatedBlock(cfg.bottleneck_channels, cfg.block_hidden, cfg.block_kernel, dilation, rng, cfg.in_eps)
            for _ in range(cfg.num_tdcn)
            for dilation in cfg.dilations()
        )
        self.mask_head = Conv1d(cfg.bottleneck_channels, cfg.masked_channels, 1, rng)
        self.decoder = Linear(cfg.masked_channels, cfg.enc_kernel, rng)
        self._overlap_index = F.frame_index(cfg.num_frames, cfg.enc_kernel, cfg.enc_stride)

    def forward(self, noisy, trace=None):
        """`trace`, when a dict, receives every stage output keyed by stage name."""
        noisy = noisy if isinstance(noisy, Tensor) else Tensor(noisy)
        if noisy.ndim != 2 or noisy.shape[1] != self.cfg.frame_len:
            raise ShapeError(f"generator expects (B, {self.cfg.frame_len}) frames, got {noisy.shape}")
        batch = noisy.shape[0]

        def record(stage, tensor):
            if trace is not None:
                trace[stage] = tensor
            return tensor

        ir = record('encoder', F.relu(self.encoder(F.reshape(noisy, (batch, 1, self.cfg.frame_len)))))
        features = record('bottleneck', self.bottleneck(self.bottleneck_norm(ir)))
        for block in self.blocks:
            features = block(features)
        record('tdcn', features)
        mask = record('mask', F.relu(self.mask_head(features)))
        target = ir if self.cfg.mask_target == 'encoder' else record('bottleneck_target', features)
        masked = record('masked', F.mul(mask, target))
        frames = record('decoder_frames', self.decoder(F.permute(masked, (0, 2, 1))))
        return record('output', F.fold(frames, self._overlap_index, self.cfg.frame_len))

    def enhance_frames(self, frames):
        """Inference on a numpy (B, frame_len) batch; returns a numpy array."""
        with no_grad():
            return self.forward(Tensor(np.asarray(frames))).data


def build_generator(cfg: GeneratorConfig, seed: int) -> Generator:
    problems = cfg.violations()
    if problems:
        raise ConfigError('invalid generator configuration',
                          {f"model.{field}": msgs for field, msgs in problems.items()})
    generator = Generator(cfg, np.random.default_rng(seed))
    logger.debug('built generator: %d frames x %d channels', cfg.num_frames, cfg.enc_channels)
    return generator
