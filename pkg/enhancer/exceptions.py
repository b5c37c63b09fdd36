"""Error hierarchy of the engine.

Every error carries the exit code the management commands report for it:
2 usage/config, 3 data, 4 numerical abort.
"""


class EnhancerError(Exception):
    """Base class for every error raised by the engine."""
    exit_code = 1


class ConfigError(EnhancerError):
    """Invalid run configuration. `violations` maps field path -> list of messages."""
    exit_code = 2

    def __init__(self, message, violations=None):
        self.violations = violations or {}
        if self.violations:
            lines = [f"{field}: {'; '.join(msgs)}" for field, msgs in sorted(self.violations.items())]
            message = f"{message}\n  " + "\n  ".join(lines)
        super().__init__(message)


class ShapeError(EnhancerError):
    """Operand shapes do not fit the operation."""
    exit_code = 2


class DataError(EnhancerError):
    exit_code = 3


class WavFormatError(DataError):
    pass


class MalformedHeaderError(WavFormatError):
    pass


class UnsupportedCodecError(WavFormatError):
    pass


class TruncatedDataError(WavFormatError):
    pass


class CorpusError(DataError):
    pass


class CheckpointError(DataError):
    pass


class FormatError(CheckpointError):
    pass


class VersionMismatchError(CheckpointError):
    pass


class DigestMismatchError(CheckpointError):
    pass


class TruncatedCheckpointError(CheckpointError):
    pass


class NumericalError(EnhancerError):
    exit_code = 4


class NonFiniteError(NumericalError):
    pass


class DomainError(NumericalError):
    """Input outside the mathematical domain of an op (log10 of non-positive values)."""


class TrainingAbort(NumericalError):
    """A loss term or gradient went non-finite during training."""

    def __init__(self, step, term, detail=''):
        self.step = step
        self.term = term
        message = f"non-finite value in '{term}' at step {step}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
