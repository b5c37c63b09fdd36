"""Audio records shared by the pipeline."""
import attrs
import numpy as np

from enhancer.exceptions import DataError

DEFAULT_SAMPLE_RATE = 16000


def _finite_samples(instance, attribute, value):
    if value.ndim != 1:
        raise DataError(f"clip '{instance.id}' must be mono, got samples of shape {value.shape}")
    if not np.all(np.isfinite(value)):
        raise DataError(f"clip '{instance.id}' holds non-finite samples")


def _positive_rate(instance, attribute, value):
    if value <= 0:
        raise DataError(f"clip '{instance.id}' has sample rate {value}")


@attrs.frozen(eq=False)
class AudioClip:
    samples: np.ndarray = attrs.field(converter=lambda s: np.asarray(s, dtype=np.float64),
                                      validator=_finite_samples)
    sample_rate: int = attrs.field(default=DEFAULT_SAMPLE_RATE, validator=_positive_rate)
    id: str = ''

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self):
        return len(self) / self.sample_rate

    def with_samples(self, samples):
        return attrs.evolve(self, samples=samples)


@attrs.frozen(eq=False)
class FrameSet:
    """Fixed-length windows of one signal plus the bookkeeping to rebuild it exactly."""
    frames: np.ndarray
    shift: int
    original_length: int
    pad_amount: int
    sample_rate: int = DEFAULT_SAMPLE_RATE
    id: str = ''

    @property
    def frame_len(self):
        return self.frames.shape[1]

    def __len__(self):
        return self.frames.shape[0]


@attrs.frozen(eq=False)
class PairedClip:
    id: str
    clean: AudioClip
    noisy: AudioClip
    snr_db: float = float('nan')
    noise_kind: str = 'unknown'
    seed: int = -1

    def metadata(self):
        return {'snr_db': self.snr_db, 'noise_kind': self.noise_kind, 'seed': self.seed}
