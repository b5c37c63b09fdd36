"""Global and segmental signal-to-noise ratios."""
import math

import numpy as np

from enhancer.exceptions import DataError

SNR_CAP_DB = 100.0
SEG_FRAME = 512
SEG_CLAMP = (-10.0, 35.0)
SILENCE_ENERGY = 1e-10


def _pair(clean, estimate):
    clean = np.asarray(getattr(clean, 'samples', clean), dtype=np.float64)
    estimate = np.asarray(getattr(estimate, 'samples', estimate), dtype=np.float64)
    if clean.shape != estimate.shape:
        raise DataError(f"clean has {clean.shape[0]} samples, estimate {estimate.shape[0]}")
    return clean, estimate


def global_snr(clean, estimate, cap=SNR_CAP_DB):
    """10 log10(|x|^2 / |x - x_hat|^2) in dB, capped at `cap` for a vanishing residual."""
    clean, estimate = _pair(clean, estimate)
    signal = float(np.dot(clean, clean))
    if signal <= 0:
        raise DataError('clean reference has zero energy')
    residual = clean - estimate
    noise = float(np.dot(residual, residual))
    if noise == 0:
        return cap
    return min(cap, 10.0 * math.log10(signal / noise))


def seg_snr(clean, estimate, frame=SEG_FRAME, clamp=SEG_CLAMP):
    """Mean of clamped per-frame SNRs over non-overlapping frames.

    Frames whose clean energy is below 1e-10 are skipped; a trailing partial frame
    is ignored.
    """
    clean, estimate = _pair(clean, estimate)
    count = clean.shape[0] // frame
    if count < 1:
        raise DataError(f"signal of {clean.shape[0]} samples is shorter than one {frame}-sample frame")
    clean_frames = clean[:count * frame].reshape(count, frame)
    residual = clean_frames - estimate[:count * frame].reshape(count, frame)
    signal = np.einsum('ij,ij->i', clean_frames, clean_frames)
    noise = np.einsum('ij,ij->i', residual, residual)
    scored = signal >= SILENCE_ENERGY
    if not np.any(scored):
        raise DataError('no frame of the clean reference carries energy')
    low, high = clamp
    with np.errstate(divide='ignore'):
        ratios = 10.0 * np.log10(signal[scored] / noise[scored])
    return float(np.mean(np.clip(ratios, low, high)))
