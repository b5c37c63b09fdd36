import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.db import connection
from django.test import TestCase, TransactionTestCase

from enhancer.audio import load_corpus, read_wav
from enhancer.models import EvaluationRecord, RunManifest
from enhancer.serializer.config_serializer import dump_config
from enhancer.tests.fixtures import FRAME_LEN, micro_config


def run(*args):
    out = StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


class CommandTestCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def synth(self, name='corpus', clips=4, *extra):
        path = self.dir / name
        run('synth', '--out', str(path), '--clips', str(clips), '--frame-len', str(FRAME_LEN), *extra)
        return path


class SynthCommandTests(CommandTestCase):

    def test_writes_requested_levels(self):
        path = self.synth('corpus', 4, '--snr', '0,15')
        corpus = load_corpus(path)
        self.assertEqual(len(corpus), 4)
        self.assertEqual({pair.snr_db for pair in corpus}, {0.0, 15.0})
        self.assertTrue((path / 'run_manifest.json').exists())
        manifest = RunManifest.objects.get(command='synth')
        self.assertEqual(manifest.status, RunManifest.Status.SUCCEEDED)
        self.assertEqual(manifest.exit_code, 0)

    def test_same_seed_same_bytes(self):
        first = self.synth('a', 2)
        second = self.synth('b', 2)
        for name in ('clean', 'noisy'):
            for wav in sorted((first / name).glob('*.wav')):
                self.assertEqual(wav.read_bytes(), (second / name / wav.name).read_bytes())

    def test_zero_clips_is_a_usage_error(self):
        with self.assertRaises(CommandError) as caught:
            self.synth('empty', 0)
        self.assertEqual(caught.exception.returncode, 2)
        manifest = RunManifest.objects.get(command='synth')
        self.assertEqual(manifest.status, RunManifest.Status.FAILED)
        self.assertEqual(manifest.exit_code, 2)


class InspectCommandTests(CommandTestCase):

    def test_default_configuration(self):
        output = run('inspect')
        self.assertIn('receptive field: 2041 frames / 32672 samples', output)
        self.assertIn('generator parameters: 4511968', output)
        self.assertIn('discriminator parameters: 728643', output)
        self.assertIn('total parameters: 5240611 (within 10% of 5.12e+06)', output)

    def test_invalid_configuration(self):
        path = self.dir / 'bad.yaml'
        path.write_text('model:\n  block_kernel: 4\n')
        with self.assertRaises(CommandError) as caught:
            run('inspect', '--config', str(path))
        self.assertEqual(caught.exception.returncode, 2)
        self.assertIn('model.block_kernel', str(caught.exception))


class TrainingCommandTests(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.config = dump_config(micro_config(batch_size=2, checkpoint_every=2), self.dir / 'micro.yaml')

    def test_missing_corpus_is_a_data_error(self):
        missing = self.dir / 'nowhere'
        with self.assertRaises(CommandError) as caught:
            run('train', '--config', str(self.config), '--data', str(missing), '--out', str(self.dir / 'run'))
        self.assertEqual(caught.exception.returncode, 3)
        self.assertIn(str(missing), str(caught.exception))

    def test_train_enhance_evaluate(self):
        corpus = self.synth()
        run_dir = self.dir / 'run'
        run('train', '--config', str(self.config), '--data', str(corpus), '--out', str(run_dir), '--strict')
        final = run_dir / 'final.tdcg'
        self.assertTrue(final.exists())
        self.assertTrue((run_dir / 'loss_log.csv').exists())
        self.assertTrue((run_dir / 'config.yaml').exists())
        train_run = RunManifest.objects.get(command='train')
        self.assertEqual(train_run.config_digest, micro_config(batch_size=2, checkpoint_every=2).digest())
        self.assertEqual(train_run.artifacts['final'], str(final))
        self.assertEqual(json.loads((run_dir / 'run_manifest.json').read_text())['status'], 'succeeded')

        enhanced = self.dir / 'enhanced'
        run('enhance', '--model', str(final), '--in', str(corpus / 'noisy'), '--out', str(enhanced))
        for source in sorted((corpus / 'noisy').glob('*.wav')):
            self.assertEqual(len(read_wav(enhanced / source.name)), len(read_wav(source)))

        report = self.dir / 'eval' / 'model.json'
        run('evaluate', '--model', str(final), '--data', str(corpus), '--report', str(report))
        data = json.loads(report.read_text())
        self.assertEqual(len(data['clips']), 4)
        self.assertEqual(data['penalty_mode'], 'snr')
        self.assertTrue(report.with_suffix('.csv').exists())
        record = EvaluationRecord.objects.get()
        self.assertEqual(record.clips, 4)
        self.assertEqual(record.config_digest, train_run.config_digest)

    def test_enhance_single_file_and_bad_input(self):
        corpus = self.synth(clips=1)
        run_dir = self.dir / 'run'
        config = dump_config(micro_config(epochs=0), self.dir / 'zero.yaml')
        run('train', '--config', str(config), '--data', str(corpus), '--out', str(run_dir))
        source = next((corpus / 'noisy').glob('*.wav'))
        target = self.dir / 'single' / 'out.wav'
        run('enhance', '--model', str(run_dir / 'final.tdcg'), '--in', str(source), '--out', str(target))
        self.assertEqual(len(read_wav(target)), len(read_wav(source)))

        broken = self.dir / 'broken'
        broken.mkdir()
        (broken / 'a.wav').write_bytes(b'not audio')
        (broken / 'b.wav').write_bytes(source.read_bytes())
        with self.assertRaises(CommandError) as caught:
            run('enhance', '--model', str(run_dir / 'final.tdcg'), '--in', str(broken),
                '--out', str(self.dir / 'partial'), '--continue-on-error')
        self.assertEqual(caught.exception.returncode, 3)
        self.assertTrue((self.dir / 'partial' / 'b.wav').exists())


class EvaluateCommandTests(CommandTestCase):

    def test_identity_baseline(self):
        corpus = self.synth('corpus', 2, '--snr', '5')
        report = self.dir / 'identity.json'
        output = run('evaluate', '--identity', '--data', str(corpus), '--report', str(report))
        self.assertIn('2 clips', output)
        means = json.loads(report.read_text())['means']
        self.assertAlmostEqual(means['snr_in'], 5.0, places=2)
        self.assertAlmostEqual(means['snr_out'], means['snr_in'], places=3)
        record = EvaluationRecord.objects.get()
        self.assertEqual(record.run.command, 'evaluate')
        self.assertIsNone(record.seed)

    def test_model_and_identity_exclude_each_other(self):
        with self.assertRaises(CommandError):
            run('evaluate', '--identity', '--model', 'x.tdcg', '--data', 'd', '--report', 'r.json')


class MissingLedgerTests(TransactionTestCase):

    def setUp(self):
        with connection.schema_editor() as editor:
            editor.delete_model(RunManifest)
        self.addCleanup(self._restore_ledger)

    def _restore_ledger(self):
        with connection.schema_editor() as editor:
            editor.create_model(RunManifest)

    def test_commands_ask_for_migrate(self):
        with self.assertRaises(CommandError) as caught:
            run('inspect')
        self.assertEqual(caught.exception.returncode, 2)
        self.assertIn('manage.py migrate', str(caught.exception))
