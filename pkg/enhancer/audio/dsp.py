"""Pre/de-emphasis, framing and overlap-add averaging."""
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import lfilter

from enhancer.audio.clip import AudioClip, FrameSet
from enhancer.exceptions import DataError

PRE_EMPHASIS = 0.95
FRAME_LEN = 16384
FRAME_SHIFT = 8192


def _check_coefficient(coefficient):
    if not 0.0 <= coefficient < 1.0:
        raise ValueError(f"emphasis coefficient must lie in [0, 1), got {coefficient}")


def pre_emphasis(x, coefficient=PRE_EMPHASIS):
    """y[0] = x[0], y[n] = x[n] - c x[n-1]."""
    _check_coefficient(coefficient)
    return lfilter([1.0, -coefficient], [1.0], np.asarray(x, dtype=np.float64))


def de_emphasis(y, coefficient=PRE_EMPHASIS):
    """Recursive inverse of `pre_emphasis`."""
    _check_coefficient(coefficient)
    return lfilter([1.0], [1.0, -coefficient], np.asarray(y, dtype=np.float64))


def frame_count(length, frame_len=FRAME_LEN, shift=FRAME_SHIFT):
    return math.ceil(max(length - frame_len, 0) / shift) + 1


def frame_signal(clip, frame_len=FRAME_LEN, shift=FRAME_SHIFT) -> FrameSet:
    """Cut into frames on a regular grid, zero-padding the tail up to the last full frame."""
    if not isinstance(clip, AudioClip):
        clip = AudioClip(samples=clip)
    if len(clip) == 0:
        raise DataError(f"clip '{clip.id}' is empty")
    if not 1 <= shift <= frame_len:
        raise ValueError(f"frame shift must lie in [1, {frame_len}], got {shift}")
    count = frame_count(len(clip), frame_len, shift)
    padded_len = (count - 1) * shift + frame_len
    padded = np.zeros(padded_len)
    padded[:len(clip)] = clip.samples
    frames = sliding_window_view(padded, frame_len)[::shift].copy()
    return FrameSet(frames=frames, shift=shift, original_length=len(clip),
                    pad_amount=padded_len - len(clip), sample_rate=clip.sample_rate, id=clip.id)


def overlap_add_average(frame_set: FrameSet) -> AudioClip:
    """Each output sample is the mean of every frame sample covering it; padding is dropped."""
    frames = np.asarray(frame_set.frames, dtype=np.float64)
    count, frame_len = frames.shape
    padded_len = (count - 1) * frame_set.shift + frame_len
    if padded_len != frame_set.original_length + frame_set.pad_amount:
        raise DataError(f"frame set '{frame_set.id}' is inconsistent: {count} frames of {frame_len} "
                        f"at shift {frame_set.shift} do not cover {frame_set.original_length} "
                        f"+ {frame_set.pad_amount} samples")
    sums = np.zeros(padded_len)
    counts = np.zeros(padded_len)
    for index in range(count):
        start = index * frame_set.shift
        sums[start:start + frame_len] += frames[index]
        counts[start:start + frame_len] += 1.0
    samples = (sums / counts)[:frame_set.original_length]
    return AudioClip(samples=samples, sample_rate=frame_set.sample_rate, id=frame_set.id)
