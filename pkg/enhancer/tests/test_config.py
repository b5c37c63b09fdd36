import tempfile
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase

from enhancer.exceptions import ConfigError, DataError
from enhancer.networks import DiscriminatorConfig, GeneratorConfig
from enhancer.serializer.config_serializer import config_from_mapping, dump_config, load_config
from enhancer.training import TrainConfig
from enhancer.tests.fixtures import TINY_MODEL

CONFIG_DIR = Path(settings.BASE_DIR) / 'config'


class ConfigFileTests(SimpleTestCase):

    def test_defaults_file_matches_built_in_defaults(self):
        cfg = load_config(CONFIG_DIR / 'defaults.yaml')
        self.assertEqual(cfg, TrainConfig())
        self.assertEqual(cfg.lr_disc, 3e-4)
        self.assertEqual(cfg.lr_gen, 2e-4)
        self.assertEqual(cfg.weights.lambda_snr, 10.0)
        self.assertEqual(cfg.weights.lambda_l1, 100.0)
        self.assertEqual(cfg.discriminator.channels, (16, 32, 32, 64, 128, 128, 256, 512, 1024))
        self.assertEqual(cfg.effective_frame_shift, 8192)

    def test_tiny_file(self):
        cfg = load_config(CONFIG_DIR / 'tiny.yaml')
        self.assertEqual(cfg.model, TINY_MODEL)
        self.assertEqual(cfg.max_gen_steps, 500)
        self.assertEqual(cfg.batch_size, 8)

    def test_missing_sections_take_defaults(self):
        cfg = config_from_mapping({'training': {'seed': 3}})
        self.assertEqual(cfg, TrainConfig(seed=3))
        self.assertEqual(config_from_mapping(None), TrainConfig())

    def test_dump_then_load(self):
        cfg = TrainConfig(model=TINY_MODEL, discriminator=DiscriminatorConfig(channels=(8, 16)), seed=5)
        with tempfile.TemporaryDirectory() as tmp:
            path = dump_config(cfg, Path(tmp) / 'nested' / 'run.yaml')
            self.assertEqual(load_config(path), cfg)


class ConfigErrorTests(SimpleTestCase):

    def assertViolations(self, document, expected):
        with self.assertRaises(ConfigError) as caught:
            config_from_mapping(document)
        self.assertEqual(set(caught.exception.violations), expected)
        self.assertEqual(caught.exception.exit_code, 2)

    def test_every_violation_reported_at_once(self):
        self.assertViolations(
            {
                'model': {'frame_len': 1000, 'block_kernel': 4},
                'weights': {'penalty_mode': 'mse', 'gamma': -1},
                'training': {'batch_size': 0, 'lr_gen': 0, 'dropout': 0.1},
            },
            {'model.frame_len', 'model.block_kernel', 'weights.penalty_mode', 'weights.gamma',
             'training.batch_size', 'training.lr_gen', 'training.dropout'},
        )

    def test_unknown_section(self):
        self.assertViolations({'optimizer': {'lr': 1}}, {'optimizer'})

    def test_cross_section_checks(self):
        self.assertViolations(
            {'model': {'frame_len': 512, 'enc_kernel': 16, 'enc_stride': 8},
             'discriminator': {'kernel': 4}, 'training': {'frame_shift': 1024}},
            {'discriminator.kernel', 'training.frame_shift'},
        )

    def test_top_level_must_be_mapping(self):
        with self.assertRaises(ConfigError):
            config_from_mapping([1, 2, 3])

    def test_unreadable_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ConfigError):
                load_config(Path(tmp) / 'absent.yaml')
            broken = Path(tmp) / 'broken.yaml'
            broken.write_text('model: [unclosed\n')
            with self.assertRaises(ConfigError):
                load_config(broken)

    def test_dump_into_unwritable_place(self):
        with tempfile.TemporaryDirectory() as tmp:
            blocker = Path(tmp) / 'file'
            blocker.write_text('')
            with self.assertRaises(DataError):
                dump_config(TrainConfig(), blocker / 'run.yaml')


class PenaltyOverrideTests(SimpleTestCase):

    def test_override_only_touches_penalty_mode(self):
        cfg = load_config(CONFIG_DIR / 'defaults.yaml')
        override = cfg.with_penalty('l1')
        self.assertEqual(override.weights.penalty_mode, 'l1')
        self.assertEqual(override.model, GeneratorConfig())
        self.assertEqual(override.weights.lambda_l1, cfg.weights.lambda_l1)
