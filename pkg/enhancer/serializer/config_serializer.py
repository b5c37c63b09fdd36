from collections.abc import Mapping
from pathlib import Path

import yaml
from rest_framework import serializers

from enhancer.exceptions import ConfigError, DataError
from enhancer.losses import DISC_PENALTIES, PENALTY_MODES
from enhancer.networks.config import MASK_TARGETS, DiscriminatorConfig, GeneratorConfig
from enhancer.training.config import TrainConfig

SECTIONS = ('model', 'discriminator', 'weights', 'training')


class StrictSerializer(serializers.Serializer):
    """Сериализатор, который сообщает о неизвестных ключах вместе с остальными ошибками"""

    def to_internal_value(self, data):
        errors = {}
        if isinstance(data, Mapping):
            errors = {key: ['unknown field'] for key in sorted(set(data) - set(self.fields))}
        try:
            value = super().to_internal_value(data)
        except serializers.ValidationError as exc:
            errors.update(exc.detail)
            raise serializers.ValidationError(errors)
        if errors:
            raise serializers.ValidationError(errors)
        return value


class GeneratorConfigSerializer(StrictSerializer):
    frame_len = serializers.IntegerField(min_value=1, default=16384)
    enc_channels = serializers.IntegerField(min_value=1, default=512)
    enc_kernel = serializers.IntegerField(min_value=1, default=32)
    enc_stride = serializers.IntegerField(min_value=1, default=16)
    bottleneck_channels = serializers.IntegerField(min_value=1, default=128)
    block_hidden = serializers.IntegerField(min_value=1, default=512)
    block_kernel = serializers.IntegerField(min_value=1, default=3)
    num_tdcn = serializers.IntegerField(min_value=1, default=4)
    blocks_per_tdcn = serializers.IntegerField(min_value=1, default=8)
    in_eps = serializers.FloatField(min_value=0, default=1e-5)
    mask_target = serializers.ChoiceField(choices=MASK_TARGETS, default='encoder')

    def validate(self, data):
        # frame divisibility and kernel parity
        problems = GeneratorConfig(**data).violations()
        if problems:
            raise serializers.ValidationError(problems)
        return data


class DiscriminatorConfigSerializer(StrictSerializer):
    channels = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1,
                                     default=lambda: list(DiscriminatorConfig().channels))
    kernel = serializers.IntegerField(min_value=1, default=3)
    stride = serializers.IntegerField(min_value=1, default=2)
    in_eps = serializers.FloatField(min_value=0, default=1e-5)


class LossWeightsSerializer(StrictSerializer):
    lambda_snr = serializers.FloatField(min_value=0, default=10.0)
    lambda_l1 = serializers.FloatField(min_value=0, default=100.0)
    gamma = serializers.FloatField(min_value=0, default=10.0)
    lambda_gp = serializers.FloatField(min_value=0, default=10.0)
    penalty_mode = serializers.ChoiceField(choices=PENALTY_MODES, default='snr')
    disc_penalty = serializers.ChoiceField(choices=DISC_PENALTIES, default='r1r2')


class TrainingSerializer(StrictSerializer):
    epochs = serializers.IntegerField(min_value=0, default=100)
    batch_size = serializers.IntegerField(min_value=1, default=16)
    lr_disc = serializers.FloatField(default=3e-4)
    lr_gen = serializers.FloatField(default=2e-4)
    adam_beta1 = serializers.FloatField(min_value=0, max_value=0.999999, default=0.5)
    adam_beta2 = serializers.FloatField(min_value=0, max_value=0.999999, default=0.9)
    adam_eps = serializers.FloatField(default=1e-8)
    disc_steps_per_gen_step = serializers.IntegerField(min_value=1, default=1)
    seed = serializers.IntegerField(min_value=0, default=0)
    checkpoint_every = serializers.IntegerField(min_value=1, default=1000)
    frame_shift = serializers.IntegerField(min_value=1, allow_null=True, default=None)
    pre_emphasis = serializers.FloatField(min_value=0, max_value=0.999999, default=0.95)
    max_gen_steps = serializers.IntegerField(min_value=0, allow_null=True, default=None)
    log_every = serializers.IntegerField(min_value=1, default=50)

    def _positive(self, value):
        if value <= 0:
            raise serializers.ValidationError('must be > 0')
        return value

    validate_lr_disc = validate_lr_gen = validate_adam_eps = _positive


class TrainConfigSerializer(StrictSerializer):
    """Сериализатор полного конфига запуска (все секции YAML)"""
    model = GeneratorConfigSerializer(required=False)
    discriminator = DiscriminatorConfigSerializer(required=False)
    weights = LossWeightsSerializer(required=False)
    training = TrainingSerializer(required=False)

    def validate(self, data):
        # cross-section constraints, reported under their section prefix
        config = TrainConfig.from_dict({section: dict(data.get(section, {})) for section in SECTIONS})
        problems = {key: msgs for key, msgs in config.violations().items()
                    if key.startswith(('discriminator.', 'training.frame_shift'))}
        if problems:
            raise serializers.ValidationError(problems)
        return data

    def to_config(self):
        return TrainConfig.from_dict({section: dict(self.validated_data.get(section, {})) for section in SECTIONS})


def flatten_errors(detail, prefix=''):
    """DRF error tree -> {'section.field': [messages]}."""
    flat = {}
    if isinstance(detail, Mapping):
        for key, value in detail.items():
            flat.update(flatten_errors(value, f"{prefix}.{key}" if prefix else str(key)))
    elif isinstance(detail, list) and detail and all(isinstance(item, Mapping) for item in detail):
        for index, item in enumerate(detail):
            flat.update(flatten_errors(item, f"{prefix}[{index}]"))
    elif isinstance(detail, list):
        flat[prefix] = [str(item) for item in detail]
    else:
        flat[prefix] = [str(detail)]
    return flat


def config_from_mapping(document, source='<config>'):
    if document is None:
        document = {}
    if not isinstance(document, Mapping):
        raise ConfigError(f"{source}: top level must be a mapping with sections {', '.join(SECTIONS)}")
    serializer = TrainConfigSerializer(data=document)
    if not serializer.is_valid():
        raise ConfigError(f"{source}: invalid configuration", flatten_errors(serializer.errors))
    return serializer.to_config()


def load_config(path):
    """Read, validate and convert a YAML run configuration. Every violation is reported at once."""
    path = Path(path)
    try:
        document = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror or exc})") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from exc
    return config_from_mapping(document, str(path))


def dump_config(config: TrainConfig, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(yaml.safe_dump(config.to_dict(), sort_keys=False))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    return path
