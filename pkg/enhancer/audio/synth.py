"""Synthetic paired (clean, noisy) corpus.

Clean clips are harmonic tone complexes with syllable-like amplitude envelopes and
a slowly drifting pitch; noises are filtered random processes. The test split uses
noise kinds and SNR levels the training split never sees.
"""
import logging

import numpy as np
from scipy.signal import butter, lfilter

from enhancer.audio.clip import DEFAULT_SAMPLE_RATE, AudioClip, PairedClip
from enhancer.audio.dsp import FRAME_LEN
from enhancer.audio.mixing import mix_at_snr

logger = logging.getLogger(__name__)

TRAIN_SNR_LEVELS = (0.0, 5.0, 10.0, 15.0)
TEST_SNR_LEVELS = (2.5, 7.5, 12.5, 17.5)
TRAIN_NOISE_KINDS = ('white', 'brown', 'lowpass', 'bandpass')
TEST_NOISE_KINDS = ('highpass', 'hum', 'pink')
PEAK_LIMIT = 0.99


def speech_surrogate(rng, length, sample_rate=DEFAULT_SAMPLE_RATE):
    t = np.arange(length) / sample_rate
    f0 = rng.uniform(90.0, 250.0)
    vibrato = 1.0 + 0.04 * np.sin(2 * np.pi * rng.uniform(0.5, 3.0) * t + rng.uniform(0, 2 * np.pi))
    phase = 2 * np.pi * np.cumsum(f0 * vibrato) / sample_rate
    harmonics = int(min(20, (0.45 * sample_rate) // f0))
    voice = np.zeros(length)
    for k in range(1, harmonics + 1):
        voice += rng.uniform(0.3, 1.0) / k * np.sin(k * phase + rng.uniform(0, 2 * np.pi))
    syllable_rate = rng.uniform(2.5, 6.0)
    envelope = np.clip(np.sin(2 * np.pi * syllable_rate * t + rng.uniform(0, 2 * np.pi)), 0.0, None) ** 2
    envelope = 0.15 + 0.85 * envelope
    clean = voice * envelope
    return 0.5 * clean / np.max(np.abs(clean))


def noise_process(kind, rng, length, sample_rate=DEFAULT_SAMPLE_RATE):
    white = rng.standard_normal(length)
    nyquist = sample_rate / 2
    if kind == 'white':
        return white
    if kind == 'brown':
        return lfilter([1.0], [1.0, -0.98], white)
    if kind == 'pink':
        # third-order 1/f approximation
        return lfilter([0.049922035, -0.095993537, 0.050612699, -0.004408786],
                       [1.0, -2.494956002, 2.017265875, -0.522189400], white)
    if kind == 'lowpass':
        b, a = butter(4, 1000.0 / nyquist)
        return lfilter(b, a, white)
    if kind == 'bandpass':
        b, a = butter(2, [300.0 / nyquist, 3000.0 / nyquist], btype='bandpass')
        return lfilter(b, a, white)
    if kind == 'highpass':
        b, a = butter(4, 2000.0 / nyquist, btype='highpass')
        return lfilter(b, a, white)
    if kind == 'hum':
        t = np.arange(length) / sample_rate
        base = rng.uniform(48.0, 62.0)
        hum = sum(np.sin(2 * np.pi * base * k * t + rng.uniform(0, 2 * np.pi)) / k for k in range(1, 6))
        return hum + 0.1 * white
    raise ValueError(f"unknown noise kind '{kind}'")


def synth_pair(index, seed, snr_db, noise_kind, frame_len=FRAME_LEN, sample_rate=DEFAULT_SAMPLE_RATE,
               prefix='clip'):
    rng = np.random.default_rng([seed, index])
    length = int(rng.integers(frame_len, 2 * frame_len + 1))
    clip_id = f"{prefix}_{index:05d}"
    clean = AudioClip(samples=speech_surrogate(rng, length, sample_rate), sample_rate=sample_rate, id=clip_id)
    noisy, _ = mix_at_snr(clean, noise_process(noise_kind, rng, length, sample_rate), snr_db)
    # one gain for both members keeps the pair's SNR
    peak = np.max(np.abs(noisy.samples))
    if peak > PEAK_LIMIT:
        scale = PEAK_LIMIT / peak
        clean = clean.with_samples(clean.samples * scale)
        noisy = noisy.with_samples(noisy.samples * scale)
    return PairedClip(id=clip_id, clean=clean, noisy=noisy, snr_db=float(snr_db),
                      noise_kind=noise_kind, seed=int(seed))


def synth_corpus(n_clips, seed, snr_levels=None, split='train', frame_len=FRAME_LEN,
                 sample_rate=DEFAULT_SAMPLE_RATE):
    """Deterministic list of paired clips, cycling through SNR levels and noise kinds."""
    if n_clips < 1:
        raise ValueError(f"n_clips must be >= 1, got {n_clips}")
    if split not in ('train', 'test'):
        raise ValueError(f"split must be 'train' or 'test', got {split!r}")
    kinds = TRAIN_NOISE_KINDS if split == 'train' else TEST_NOISE_KINDS
    if snr_levels is None:
        snr_levels = TRAIN_SNR_LEVELS if split == 'train' else TEST_SNR_LEVELS
    pairs = []
    for index in range(n_clips):
        level = snr_levels[index % len(snr_levels)]
        kind = kinds[(index // len(snr_levels)) % len(kinds)]
        pairs.append(synth_pair(index, seed, level, kind, frame_len=frame_len,
                                sample_rate=sample_rate, prefix=split))
    logger.info('synthesized %d %s pairs (seed %d, levels %s dB)', n_clips, split, seed, list(snr_levels))
    return pairs
