"""Corpus evaluation: the full enhancement chain per clip, then SNR and segSNR scoring."""
import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import attrs
import numpy as np

from enhancer.audio.clip import AudioClip
from enhancer.audio.dsp import FRAME_LEN, PRE_EMPHASIS, de_emphasis, frame_signal, overlap_add_average, pre_emphasis
from enhancer.exceptions import DataError
from enhancer.metrics.snr import global_snr, seg_snr
from enhancer.networks import build_generator
from enhancer.training.checkpoint import load_checkpoint

logger = logging.getLogger(__name__)

CSV_COLUMNS = ('id', 'snr_in', 'snr_out', 'segsnr_in', 'segsnr_out')


@attrs.frozen
class ClipScore:
    id: str
    snr_in: float
    snr_out: float
    segsnr_in: float
    segsnr_out: float


@attrs.frozen
class EvalReport:
    clips: tuple = attrs.field(converter=tuple)
    config_digest: str = ''
    penalty_mode: str = ''

    def mean(self, metric):
        if not self.clips:
            return float('nan')
        return float(np.mean([getattr(clip, metric) for clip in self.clips]))

    @property
    def means(self):
        return {metric: self.mean(metric) for metric in CSV_COLUMNS[1:]}

    def to_dict(self):
        return {
            'config_digest': self.config_digest,
            'penalty_mode': self.penalty_mode,
            'means': self.means,
            'clips': [attrs.asdict(clip) for clip in self.clips],
        }


class Enhancer:
    """Frame-batch callable around a generator: (N, frame_len) array in, same shape out."""

    def __init__(self, generator, batch_size=16):
        self.generator = generator
        self.batch_size = batch_size
        self.frame_len = generator.cfg.frame_len
        self.config = None

    @classmethod
    def from_checkpoint(cls, path, batch_size=16):
        state = load_checkpoint(path)
        generator = build_generator(state.config.model, state.config.seed)
        generator.load_state_dict(state.generator)
        enhancer = cls(generator, batch_size)
        enhancer.config = state.config
        return enhancer

    def __call__(self, frames):
        frames = np.asarray(frames)
        out = [self.generator.enhance_frames(frames[start:start + self.batch_size])
               for start in range(0, frames.shape[0], self.batch_size)]
        return np.concatenate(out).astype(np.float64)


def enhance_clip(model, clip: AudioClip, frame_len=FRAME_LEN, shift=None, coefficient=PRE_EMPHASIS) -> AudioClip:
    """Pre-emphasis, framing, per-frame model, overlap-add averaging, de-emphasis.

    The output has exactly as many samples as the input.
    """
    shift = shift or frame_len // 2
    emphasized = clip.with_samples(pre_emphasis(clip.samples, coefficient))
    frame_set = frame_signal(emphasized, frame_len, shift)
    enhanced_frames = np.asarray(model(frame_set.frames), dtype=np.float64)
    if enhanced_frames.shape != frame_set.frames.shape:
        raise DataError(f"model returned frames of shape {enhanced_frames.shape} for {frame_set.frames.shape}")
    rebuilt = overlap_add_average(attrs.evolve(frame_set, frames=enhanced_frames))
    return clip.with_samples(de_emphasis(rebuilt.samples, coefficient))


def score_clip(model, pair, frame_len=FRAME_LEN, shift=None, coefficient=PRE_EMPHASIS) -> ClipScore:
    if len(pair.clean) != len(pair.noisy):
        raise DataError(f"pair '{pair.id}': clean has {len(pair.clean)} samples, noisy {len(pair.noisy)}")
    enhanced = enhance_clip(model, pair.noisy, frame_len, shift, coefficient)
    return ClipScore(
        id=pair.id,
        snr_in=global_snr(pair.clean, pair.noisy),
        snr_out=global_snr(pair.clean, enhanced),
        segsnr_in=seg_snr(pair.clean, pair.noisy),
        segsnr_out=seg_snr(pair.clean, enhanced),
    )


def evaluate_corpus(model, corpus, cfg=None, workers=1) -> EvalReport:
    """Score every pair; rows come back sorted by clip id whatever the worker count.

    `cfg` (a TrainConfig) supplies frame length, frame shift and the emphasis
    coefficient, plus the digest and penalty mode recorded in the report.
    """
    if cfg is not None:
        frame_len, shift, coefficient = cfg.model.frame_len, cfg.effective_frame_shift, cfg.pre_emphasis
        digest, mode = cfg.digest(), cfg.weights.penalty_mode
    else:
        frame_len, shift, coefficient = FRAME_LEN, None, PRE_EMPHASIS
        digest, mode = '', ''
    pairs = sorted(corpus, key=lambda p: p.id)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        clips = list(pool.map(lambda pair: score_clip(model, pair, frame_len, shift, coefficient), pairs))
    report = EvalReport(clips=clips, config_digest=digest, penalty_mode=mode)
    logger.info('evaluated %d clips: segSNR %.2f -> %.2f dB, SNR %.2f -> %.2f dB', len(clips),
                report.mean('segsnr_in'), report.mean('segsnr_out'), report.mean('snr_in'), report.mean('snr_out'))
    return report


def write_report_json(report: EvalReport, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report.to_dict(), indent=2))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    return path


def write_report_csv(report: EvalReport, path):
    """One row per clip under the header id,snr_in,snr_out,segsnr_in,segsnr_out."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open('w', newline='') as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_COLUMNS)
            for clip in report.clips:
                writer.writerow([clip.id] + [f"{getattr(clip, column):.6f}" for column in CSV_COLUMNS[1:]])
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    return path
