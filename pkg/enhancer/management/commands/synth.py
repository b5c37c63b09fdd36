from pathlib import Path

from enhancer.audio.corpus import save_corpus
from enhancer.audio.dsp import FRAME_LEN
from enhancer.audio.synth import synth_corpus
from enhancer.exceptions import ConfigError
from enhancer.management.base import EnhancerCommand, parse_float_list


class Command(EnhancerCommand):
    help = 'Generate a synthetic paired (clean, noisy) corpus'

    def add_arguments(self, parser):
        parser.add_argument('--out', required=True, help='Corpus directory to create')
        parser.add_argument('--clips', type=int, default=32, help='Number of paired clips')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--snr', type=parse_float_list, default=None,
                            help='Comma-separated SNR levels in dB (default: the split levels)')
        parser.add_argument('--split', choices=('train', 'test'), default='train')
        parser.add_argument('--frame-len', type=int, default=FRAME_LEN,
                            help='Clips last between one and two frames')

    def run(self, **options):
        if options['clips'] < 1:
            raise ConfigError('invalid synth arguments', {'clips': [f"must be >= 1, got {options['clips']}"]})
        if options['snr'] is not None and not options['snr']:
            raise ConfigError('invalid synth arguments', {'snr': ['needs at least one level']})
        out = Path(options['out'])
        self.manifest_dir = out
        self.record(seed=options['seed'])
        pairs = synth_corpus(options['clips'], options['seed'], snr_levels=options['snr'],
                             split=options['split'], frame_len=options['frame_len'])
        save_corpus(pairs, out)
        self.record(corpus=out, manifest=out / 'manifest.json')
        levels = sorted({pair.snr_db for pair in pairs})
        self.stdout.write(self.style.SUCCESS(
            f"{len(pairs)} {options['split']} pairs written to {out} (SNR levels {levels} dB)"))
