"""Small configurations and corpora shared by the test modules."""
import attrs

from enhancer.audio.synth import synth_corpus
from enhancer.losses import LossWeights
from enhancer.networks.config import DiscriminatorConfig, GeneratorConfig
from enhancer.training.config import TrainConfig

FRAME_LEN = 512

MICRO_MODEL = GeneratorConfig(
    frame_len=FRAME_LEN, enc_channels=16, enc_kernel=16, enc_stride=8, bottleneck_channels=8,
    block_hidden=16, block_kernel=3, num_tdcn=1, blocks_per_tdcn=2,
)
MICRO_CRITIC = DiscriminatorConfig(channels=(4, 8, 8))

# the desk-scale smoke configuration of config/tiny.yaml
TINY_MODEL = GeneratorConfig(
    frame_len=4096, enc_channels=64, enc_kernel=32, enc_stride=16, bottleneck_channels=32,
    block_hidden=64, block_kernel=3, num_tdcn=2, blocks_per_tdcn=4,
)


def micro_config(**training):
    defaults = dict(epochs=1, batch_size=4, seed=0, checkpoint_every=2, log_every=1)
    defaults.update(training)
    weights = defaults.pop('weights', LossWeights())
    return TrainConfig(model=MICRO_MODEL, discriminator=MICRO_CRITIC, weights=weights, **defaults)


def micro_corpus(n_clips=4, seed=0, split='train'):
    return synth_corpus(n_clips, seed, split=split, frame_len=FRAME_LEN)


def with_training(cfg, **changes):
    return attrs.evolve(cfg, **changes)
