import logging
from pathlib import Path

from enhancer.audio.wav import read_wav, write_wav
from enhancer.exceptions import DataError
from enhancer.metrics.evaluation import Enhancer, enhance_clip
from enhancer.management.base import EnhancerCommand

logger = logging.getLogger(__name__)


class Command(EnhancerCommand):
    help = 'Enhance a WAV file or every WAV file of a directory with a trained checkpoint'

    def add_arguments(self, parser):
        parser.add_argument('--model', required=True, help='Checkpoint file')
        parser.add_argument('--in', dest='source', required=True, help='WAV file or directory')
        parser.add_argument('--out', required=True, help='WAV file or directory')
        parser.add_argument('--continue-on-error', action='store_true',
                            help='Keep going past unreadable files of a directory')

    def run(self, **options):
        source, target = Path(options['source']), Path(options['out'])
        enhancer = Enhancer.from_checkpoint(options['model'])
        cfg = enhancer.config
        self.record(config=cfg, seed=cfg.seed, model=options['model'])
        if source.is_dir():
            jobs = [(path, target / path.name) for path in sorted(source.glob('*.wav'))]
            if not jobs:
                raise DataError(f"no .wav files in {source}")
            self.manifest_dir = target
        elif source.is_file():
            jobs = [(source, target)]
            self.manifest_dir = target.parent
        else:
            raise DataError(f"input not found: {source}")

        failures = []
        for src, dst in jobs:
            try:
                clip = read_wav(src)
                enhanced = enhance_clip(enhancer, clip, cfg.model.frame_len, cfg.effective_frame_shift,
                                        cfg.pre_emphasis)
                write_wav(enhanced, dst)
            except DataError as exc:
                if not options['continue_on_error'] or len(jobs) == 1:
                    raise
                logger.warning('skipping %s: %s', src, exc)
                failures.append(f"{src}: {exc}")
                continue
            self.stdout.write(f"{src} -> {dst} ({len(clip)} samples)")
        self.record(output=target, failed=len(failures))
        if failures:
            raise DataError(f"{len(failures)} of {len(jobs)} files failed:\n  " + "\n  ".join(failures))
        self.stdout.write(self.style.SUCCESS(f"enhanced {len(jobs)} file(s) into {target}"))
