"""Run configuration: every knob of a training run in one frozen record."""
import hashlib
import json

import attrs

from enhancer.exceptions import ConfigError
from enhancer.losses import LossWeights
from enhancer.networks.config import DiscriminatorConfig, GeneratorConfig


@attrs.frozen
class TrainConfig:
    epochs: int = 100
    batch_size: int = 16
    lr_disc: float = 3e-4
    lr_gen: float = 2e-4
    adam_beta1: float = 0.5
    adam_beta2: float = 0.9
    adam_eps: float = 1e-8
    disc_steps_per_gen_step: int = 1
    seed: int = 0
    checkpoint_every: int = 1000
    # None: half a frame, the same sliding window as enhancement
    frame_shift: int | None = None
    pre_emphasis: float = 0.95
    max_gen_steps: int | None = None
    log_every: int = 50
    weights: LossWeights = attrs.field(factory=LossWeights)
    model: GeneratorConfig = attrs.field(factory=GeneratorConfig)
    discriminator: DiscriminatorConfig = attrs.field(factory=DiscriminatorConfig)

    @property
    def effective_frame_shift(self):
        return self.frame_shift if self.frame_shift is not None else self.model.frame_len // 2

    def violations(self):
        problems = {}

        def complain(field, message):
            problems.setdefault(f"training.{field}", []).append(message)

        if self.epochs < 0:
            complain('epochs', 'must be >= 0')
        if self.batch_size < 1:
            complain('batch_size', 'must be >= 1')
        for field in ('lr_disc', 'lr_gen', 'adam_eps'):
            if getattr(self, field) <= 0:
                complain(field, 'must be > 0')
        for field in ('adam_beta1', 'adam_beta2'):
            if not 0.0 <= getattr(self, field) < 1.0:
                complain(field, 'must lie in [0, 1)')
        for field in ('disc_steps_per_gen_step', 'checkpoint_every', 'log_every'):
            if getattr(self, field) < 1:
                complain(field, 'must be >= 1')
        if self.max_gen_steps is not None and self.max_gen_steps < 0:
            complain('max_gen_steps', 'must be >= 0')
        if not 0.0 <= self.pre_emphasis < 1.0:
            complain('pre_emphasis', 'must lie in [0, 1)')
        if self.frame_shift is not None and not 1 <= self.frame_shift <= self.model.frame_len:
            complain('frame_shift', f'must lie in [1, frame_len={self.model.frame_len}]')
        for field, msgs in self.weights.violations().items():
            problems[f"weights.{field}"] = msgs
        for field, msgs in self.model.violations().items():
            problems[f"model.{field}"] = msgs
        for field, msgs in self.discriminator.violations(self.model.frame_len).items():
            problems[f"discriminator.{field}"] = msgs
        return problems

    def validate(self):
        problems = self.violations()
        if problems:
            raise ConfigError('invalid run configuration', problems)
        return self

    def to_dict(self):
        """Sectioned plain-data rendering, the same layout as the YAML config files."""
        training = attrs.asdict(self, filter=lambda a, _: a.name not in ('weights', 'model', 'discriminator'))
        discriminator = attrs.asdict(self.discriminator)
        discriminator['channels'] = list(discriminator['channels'])
        return {
            'model': attrs.asdict(self.model),
            'discriminator': discriminator,
            'weights': attrs.asdict(self.weights),
            'training': training,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                model=GeneratorConfig(**data.get('model', {})),
                discriminator=DiscriminatorConfig(**data.get('discriminator', {})),
                weights=LossWeights(**data.get('weights', {})),
                **data.get('training', {}),
            )
        except TypeError as exc:
            raise ConfigError(f"unknown configuration field ({exc})") from exc

    def canonical_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))

    def digest(self):
        """Hex SHA-256 of the canonical JSON rendering."""
        return hashlib.sha256(self.canonical_json().encode('utf-8')).hexdigest()

    def with_penalty(self, penalty_mode):
        return attrs.evolve(self, weights=attrs.evolve(self.weights, penalty_mode=penalty_mode))

    def with_seed(self, seed):
        return attrs.evolve(self, seed=seed)
