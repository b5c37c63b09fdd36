import csv
import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from enhancer.audio import AudioClip, PairedClip, frame_signal, pre_emphasis
from enhancer.exceptions import DataError
from enhancer.metrics import (
    CSV_COLUMNS,
    ClipScore,
    Enhancer,
    EvalReport,
    compare_penalties,
    enhance_clip,
    evaluate_corpus,
    global_snr,
    score_clip,
    seg_snr,
    write_report_csv,
    write_report_json,
)
from enhancer.networks import build_generator
from enhancer.training import Trainer, prepare_training_frames, save_checkpoint
from enhancer.tests.fixtures import FRAME_LEN, MICRO_MODEL, micro_config, micro_corpus


def identity(frames):
    return frames


def silence(frames):
    return np.zeros_like(frames)


class GlobalSnrTests(SimpleTestCase):

    def test_oracles(self):
        clean = np.random.default_rng(0).standard_normal(1000)
        self.assertEqual(global_snr(clean, clean), 100.0)
        self.assertAlmostEqual(global_snr(clean, np.zeros(1000)), 0.0, places=12)
        self.assertAlmostEqual(global_snr(np.ones(100), np.full(100, 1.1)), 20.0, places=9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        clean = rng.standard_normal(500)
        estimate = clean + 0.3 * rng.standard_normal(500)
        self.assertAlmostEqual(global_snr(3.0 * clean, 3.0 * estimate), global_snr(clean, estimate), places=9)

    def test_moving_towards_clean_never_lowers_score(self):
        rng = np.random.default_rng(4)
        clean = rng.standard_normal(800)
        start = clean + rng.standard_normal(800)
        scores = [global_snr(clean, t * clean + (1 - t) * start) for t in np.linspace(0.0, 1.0, 11)]
        for earlier, later in zip(scores, scores[1:]):
            self.assertGreaterEqual(later, earlier)
        self.assertEqual(scores[-1], 100.0)

    def test_invalid_inputs(self):
        with self.assertRaises(DataError):
            global_snr(np.zeros(10), np.ones(10))
        with self.assertRaises(DataError):
            global_snr(np.ones(10), np.ones(11))


class SegmentalSnrTests(SimpleTestCase):

    def test_clamped_extremes(self):
        clean = np.random.default_rng(2).standard_normal(2048)
        self.assertEqual(seg_snr(clean, clean), 35.0)
        self.assertEqual(seg_snr(clean, -9.0 * clean), -10.0)

    def test_constant_ratio_per_frame(self):
        # 3 full frames at 10 dB; the 100-sample tail is ignored
        clean = np.ones(3 * 512 + 100)
        estimate = clean + math.sqrt(0.1)
        estimate[-100:] = 50.0
        self.assertAlmostEqual(seg_snr(clean, estimate), 10.0, places=9)

    def test_silent_frames_are_skipped(self):
        clean = np.concatenate([np.zeros(512), np.ones(512)])
        estimate = clean + math.sqrt(0.1)
        self.assertAlmostEqual(seg_snr(clean, estimate), 10.0, places=9)

    def test_unscorable_signals(self):
        with self.assertRaises(DataError):
            seg_snr(np.zeros(1024), np.ones(1024))
        with self.assertRaises(DataError):
            seg_snr(np.ones(511), np.ones(511))


class EnhancementChainTests(SimpleTestCase):

    def setUp(self):
        self.corpus = micro_corpus(3)

    def test_identity_model_returns_input(self):
        clip = self.corpus[0].noisy
        out = enhance_clip(identity, clip, frame_len=FRAME_LEN)
        self.assertEqual(len(out), len(clip))
        np.testing.assert_allclose(out.samples, clip.samples, atol=1e-9)

    def test_identity_scores_match_input(self):
        score = score_clip(identity, self.corpus[1], frame_len=FRAME_LEN)
        self.assertAlmostEqual(score.snr_out, score.snr_in, places=6)
        self.assertAlmostEqual(score.segsnr_out, score.segsnr_in, places=6)
        self.assertAlmostEqual(score.snr_in, self.corpus[1].snr_db, places=6)

    def test_oracle_model_hits_the_caps(self):
        pair = self.corpus[2]
        target = frame_signal(pair.clean.with_samples(pre_emphasis(pair.clean.samples)), FRAME_LEN, FRAME_LEN // 2)
        score = score_clip(lambda frames: target.frames, pair, frame_len=FRAME_LEN)
        self.assertEqual(score.segsnr_out, 35.0)
        self.assertGreater(score.snr_out, 90.0)

    def test_silent_model_scores_zero(self):
        score = score_clip(silence, self.corpus[0], frame_len=FRAME_LEN)
        self.assertAlmostEqual(score.snr_out, 0.0, places=9)
        self.assertAlmostEqual(score.segsnr_out, 0.0, places=9)

    def test_mismatched_pair(self):
        pair = PairedClip(id='bad', clean=AudioClip(samples=np.ones(600)), noisy=AudioClip(samples=np.ones(601)))
        with self.assertRaises(DataError):
            score_clip(identity, pair, frame_len=FRAME_LEN)

    def test_model_must_keep_frame_shape(self):
        with self.assertRaises(DataError):
            enhance_clip(lambda frames: frames[:, :10], self.corpus[0].noisy, frame_len=FRAME_LEN)

    def test_enhancer_batches_frames(self):
        generator = build_generator(MICRO_MODEL, 0)
        frames = np.random.default_rng(3).standard_normal((5, FRAME_LEN)) * 0.1
        out = Enhancer(generator, batch_size=2)(frames)
        self.assertEqual(out.dtype, np.float64)
        np.testing.assert_allclose(out, generator.enhance_frames(frames), rtol=1e-5, atol=1e-6)

    def test_enhancer_from_checkpoint(self):
        cfg = micro_config()
        clean, noisy = prepare_training_frames(self.corpus, FRAME_LEN, FRAME_LEN // 2)
        trainer = Trainer(cfg, clean, noisy, strict=True)
        trainer.train_step()
        with tempfile.TemporaryDirectory() as tmp:
            model = Enhancer.from_checkpoint(save_checkpoint(trainer.state(), Path(tmp) / 'm.tdcg'))
        self.assertEqual(model.config, cfg)
        frames = noisy[:2]
        np.testing.assert_array_equal(model(frames), trainer.generator.enhance_frames(frames).astype(np.float64))


class ReportTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_rows_sorted_whatever_the_worker_count(self):
        corpus = micro_corpus(4)
        cfg = micro_config()
        single = evaluate_corpus(identity, list(reversed(corpus)), cfg)
        pooled = evaluate_corpus(identity, corpus, cfg, workers=3)
        self.assertEqual([c.id for c in single.clips], sorted(p.id for p in corpus))
        self.assertEqual(single.clips, pooled.clips)
        self.assertEqual(single.config_digest, cfg.digest())
        self.assertEqual(single.penalty_mode, 'snr')

    def test_means_and_files(self):
        report = EvalReport(clips=[ClipScore('b', 1.0, 3.0, 0.0, 2.0), ClipScore('a', 3.0, 5.0, 2.0, 6.0)])
        self.assertEqual(report.means, {'snr_in': 2.0, 'snr_out': 4.0, 'segsnr_in': 1.0, 'segsnr_out': 4.0})
        data = json.loads(write_report_json(report, self.dir / 'r.json').read_text())
        self.assertEqual(data['means']['segsnr_out'], 4.0)
        self.assertEqual([c['id'] for c in data['clips']], ['b', 'a'])
        with write_report_csv(report, self.dir / 'r.csv').open(newline='') as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(tuple(rows[0]), CSV_COLUMNS)
        self.assertEqual(rows[1], ['b', '1.000000', '3.000000', '0.000000', '2.000000'])

    def test_empty_report_means(self):
        self.assertTrue(math.isnan(EvalReport(clips=[]).mean('snr_out')))


class PenaltyComparisonTests(SimpleTestCase):

    def test_untrained_runs_agree(self):
        comparison = compare_penalties(micro_config(epochs=0), micro_corpus(2), seeds=[0, 1])
        self.assertEqual([run.seed for run in comparison.runs], [0, 1])
        for run in comparison.runs:
            self.assertEqual(run.snr.penalty_mode, 'snr')
            self.assertEqual(run.l1.penalty_mode, 'l1')
            self.assertEqual(run.snr.clips, run.l1.clips)
        self.assertEqual(set(comparison.mean_deltas.values()), {0.0})
        self.assertTrue(comparison.direction_holds)
        self.assertEqual(comparison.to_dict()['seeds'], [0, 1])

    def test_needs_a_seed(self):
        with self.assertRaises(ValueError):
            compare_penalties(micro_config(), micro_corpus(1), seeds=[])
