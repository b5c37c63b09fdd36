import json
from pathlib import Path

from django.conf import settings

from enhancer.audio.corpus import load_corpus
from enhancer.exceptions import ConfigError, DataError
from enhancer.management.base import EnhancerCommand, parse_int_list
from enhancer.metrics.comparison import compare_penalties
from enhancer.models import EvaluationRecord
from enhancer.serializer.config_serializer import load_config


class Command(EnhancerCommand):
    help = 'Train SNR-penalty and L1-penalty models per seed and compare their scores'

    def add_arguments(self, parser):
        parser.add_argument('--config', default=None, help='YAML run configuration (default: TDCGAN_DEFAULT_CONFIG)')
        parser.add_argument('--data', required=True, help='Training corpus directory')
        parser.add_argument('--eval-data', default=None, help='Evaluation corpus (default: the training corpus)')
        parser.add_argument('--seeds', type=parse_int_list, default=[0, 1, 2], help='Comma-separated seeds')
        parser.add_argument('--report', required=True, help='JSON comparison report path')

    def run(self, **options):
        if not options['seeds']:
            raise ConfigError('invalid arguments', {'seeds': ['needs at least one seed']})
        config_path = Path(options['config'] or settings.TDCGAN['DEFAULT_CONFIG'])
        cfg = load_config(config_path)
        report_path = Path(options['report'])
        self.manifest_dir = report_path.parent
        self.record(config_path=config_path, config=cfg, seed=options['seeds'][0])
        workers = settings.TDCGAN['WORKERS']
        corpus = load_corpus(options['data'], workers=workers)
        eval_corpus = load_corpus(options['eval_data'], workers=workers) if options['eval_data'] else None

        comparison = compare_penalties(cfg, corpus, options['seeds'], eval_corpus=eval_corpus, workers=workers)
        try:
            report_path.parent.mkdir(parents=True, exist_ok=True)
            report_path.write_text(json.dumps(comparison.to_dict(), indent=2))
        except OSError as exc:
            raise DataError(f"{report_path}: {exc.strerror or exc}") from exc
        for run in comparison.runs:
            EvaluationRecord.from_report(self.manifest, run.snr, report_path, seed=run.seed)
            EvaluationRecord.from_report(self.manifest, run.l1, report_path, seed=run.seed)
            self.stdout.write(f"seed {run.seed}: segSNR snr {run.snr.mean('segsnr_out'):.2f} dB, "
                              f"l1 {run.l1.mean('segsnr_out'):.2f} dB, delta {run.deltas['segsnr_out']:+.2f}")
        self.record(report=report_path)
        verdict = 'holds' if comparison.direction_holds else 'does not hold'
        self.stdout.write(self.style.SUCCESS(
            f"SNR-mode segSNR >= L1-mode segSNR {verdict} on all seeds; report written to {report_path}"))
