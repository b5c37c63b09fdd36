from pathlib import Path

from django.conf import settings

from enhancer.audio.corpus import load_corpus
from enhancer.management.base import EnhancerCommand
from enhancer.metrics.evaluation import Enhancer, evaluate_corpus, write_report_csv, write_report_json
from enhancer.models import EvaluationRecord


def identity(frames):
    return frames


class Command(EnhancerCommand):
    help = 'Score a checkpoint on a paired corpus (global SNR and segSNR, before and after)'

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--model', help='Checkpoint file')
        source.add_argument('--identity', action='store_true',
                            help='Score the unprocessed noisy input through the same pipeline')
        parser.add_argument('--data', required=True, help='Corpus directory')
        parser.add_argument('--report', required=True, help='JSON report path; the CSV goes next to it')

    def run(self, **options):
        report_path = Path(options['report'])
        self.manifest_dir = report_path.parent
        cfg = None
        if options['identity']:
            model = identity
        else:
            model = Enhancer.from_checkpoint(options['model'])
            cfg = model.config
            self.record(config=cfg, seed=cfg.seed, model=options['model'])
        corpus = load_corpus(options['data'], workers=settings.TDCGAN['WORKERS'])
        report = evaluate_corpus(model, corpus, cfg, workers=settings.TDCGAN['WORKERS'])
        json_path = write_report_json(report, report_path)
        csv_path = write_report_csv(report, report_path.with_suffix('.csv'))
        self.record(report_json=json_path, report_csv=csv_path)
        EvaluationRecord.from_report(self.manifest, report, json_path, seed=cfg.seed if cfg else None)
        means = report.means
        self.stdout.write(f"{len(report.clips)} clips: SNR {means['snr_in']:.2f} -> {means['snr_out']:.2f} dB, "
                          f"segSNR {means['segsnr_in']:.2f} -> {means['segsnr_out']:.2f} dB")
        self.stdout.write(self.style.SUCCESS(f"report written to {json_path} and {csv_path}"))
