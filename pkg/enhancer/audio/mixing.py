"""SNR-controlled mixing of speech and noise."""
import math

import numpy as np

from enhancer.audio.clip import AudioClip
from enhancer.exceptions import DataError


def energy(x):
    x = np.asarray(x, dtype=np.float64)
    return float(np.dot(x, x))


def fit_length(noise, length):
    """Tile (or cut) noise to exactly `length` samples."""
    noise = np.asarray(noise, dtype=np.float64)
    if noise.size == 0:
        raise DataError('noise is empty')
    repeats = math.ceil(length / noise.size)
    return np.tile(noise, repeats)[:length]


def mix_at_snr(speech, noise, snr_db):
    """noisy = speech + g * noise, g chosen so that 10 log10(|speech|^2 / |g noise|^2) = snr_db.

    Returns (noisy clip, g). An infinite target gives g = 0.
    """
    speech_clip = speech if isinstance(speech, AudioClip) else AudioClip(samples=speech)
    samples = speech_clip.samples
    noise = fit_length(noise.samples if isinstance(noise, AudioClip) else noise, samples.size)
    speech_energy = energy(samples)
    noise_energy = energy(noise)
    if speech_energy <= 0:
        raise DataError(f"speech '{speech_clip.id}' has zero energy")
    if noise_energy <= 0:
        raise DataError('noise has zero energy')
    if math.isinf(snr_db) and snr_db > 0:
        gain = 0.0
    else:
        gain = math.sqrt(speech_energy / (noise_energy * 10.0 ** (snr_db / 10.0)))
    return speech_clip.with_samples(samples + gain * noise), gain
