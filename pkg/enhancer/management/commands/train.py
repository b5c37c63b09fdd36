from pathlib import Path

from django.conf import settings

from enhancer.audio.corpus import load_corpus
from enhancer.losses import PENALTY_MODES
from enhancer.management.base import EnhancerCommand
from enhancer.serializer.config_serializer import dump_config, load_config
from enhancer.training.trainer import LOG_NAME, train


class Command(EnhancerCommand):
    help = 'Train generator and critic on a paired corpus'

    def add_arguments(self, parser):
        parser.add_argument('--config', default=None, help='YAML run configuration (default: TDCGAN_DEFAULT_CONFIG)')
        parser.add_argument('--data', required=True, help='Corpus directory (clean/, noisy/)')
        parser.add_argument('--out', required=True, help='Run directory for checkpoints and the loss log')
        parser.add_argument('--penalty', choices=PENALTY_MODES, default=None,
                            help='Override weights.penalty_mode')
        parser.add_argument('--seed', type=int, default=None, help='Override training.seed')
        parser.add_argument('--resume', default=None, help='Checkpoint to continue from')
        parser.add_argument('--strict', action='store_true', help='Byte-comparable loss log (wall_ms = 0)')

    def run(self, **options):
        config_path = Path(options['config'] or settings.TDCGAN['DEFAULT_CONFIG'])
        cfg = load_config(config_path)
        if options['penalty']:
            cfg = cfg.with_penalty(options['penalty'])
        if options['seed'] is not None:
            cfg = cfg.with_seed(options['seed'])
        out = Path(options['out'])
        self.manifest_dir = out
        self.record(config_path=config_path, config=cfg, seed=cfg.seed)
        corpus = load_corpus(options['data'], workers=settings.TDCGAN['WORKERS'])
        self.stdout.write(f"config {cfg.digest()[:12]}: {len(corpus)} pairs, penalty {cfg.weights.penalty_mode}")
        dump_config(cfg, out / 'config.yaml')
        result = train(cfg, corpus, out_dir=out, resume=options['resume'], strict=options['strict'])
        self.record(config_file=out / 'config.yaml', loss_log=out / LOG_NAME, final=result.final_checkpoint,
                    **{f"checkpoint_{i}": path for i, path in enumerate(result.checkpoints)})
        self.stdout.write(self.style.SUCCESS(
            f"trained {result.step} steps; final checkpoint {result.final_checkpoint}"))
