"""PCM16 mono WAV reading and writing."""
import logging
import struct
import warnings
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from enhancer.audio.clip import AudioClip
from enhancer.exceptions import (
    DataError,
    MalformedHeaderError,
    TruncatedDataError,
    UnsupportedCodecError,
)

logger = logging.getLogger(__name__)

PCM16_SCALE = 32768.0


def _check_riff(path, raw_head, size):
    if len(raw_head) < 12 or raw_head[:4] != b'RIFF' or raw_head[8:12] != b'WAVE':
        raise MalformedHeaderError(f"{path}: not a RIFF/WAVE file")
    (declared,) = struct.unpack('<I', raw_head[4:8])
    if declared + 8 > size:
        raise TruncatedDataError(f"{path}: header declares {declared + 8} bytes, file holds {size}")


def read_wav(path) -> AudioClip:
    """Samples scaled to [-1, 1) by 1/32768; stereo input keeps the first channel."""
    path = Path(path)
    try:
        with path.open('rb') as handle:
            head = handle.read(12)
        size = path.stat().st_size
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    _check_riff(path, head, size)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', wavfile.WavFileWarning)
        try:
            rate, data = wavfile.read(path)
        except ValueError as exc:
            message = str(exc)
            if 'Unknown wave file format' in message or 'Unsupported' in message:
                raise UnsupportedCodecError(f"{path}: {message}") from exc
            if 'premature' in message.lower() or 'EOF' in message:
                raise TruncatedDataError(f"{path}: {message}") from exc
            raise MalformedHeaderError(f"{path}: {message}") from exc
    for warning in caught:
        if 'EOF' in str(warning.message) or 'premature' in str(warning.message).lower():
            raise TruncatedDataError(f"{path}: {warning.message}")

    if data.dtype != np.int16:
        raise UnsupportedCodecError(f"{path}: expected 16-bit PCM, got {data.dtype}")
    if data.ndim == 2:
        logger.warning('%s has %d channels; keeping the first one', path, data.shape[1])
        data = data[:, 0]
    return AudioClip(samples=data.astype(np.float64) / PCM16_SCALE, sample_rate=int(rate), id=path.stem)


def to_pcm16(samples):
    """Inverse of the read scaling with a saturating clamp."""
    scaled = np.round(np.asarray(samples, dtype=np.float64) * PCM16_SCALE)
    return np.clip(scaled, -32768, 32767).astype(np.int16)


def write_wav(clip: AudioClip, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        wavfile.write(path, clip.sample_rate, to_pcm16(clip.samples))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    return path
