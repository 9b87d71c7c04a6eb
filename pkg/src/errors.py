"""Exception hierarchy for the fusion system.

Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class FusionError(Exception):
    """Base class for all fusion errors."""
    exit_code: int = 1


class ConfigError(FusionError):
    """Invalid or unknown configuration values."""
    exit_code = 2


class InputError(FusionError):
    """Input images or matrices do not satisfy an operation's contract."""
    exit_code = 3


class DimensionError(InputError):
    """Sizes or shapes disagree."""


class BandCountError(InputError):
    """An image has the wrong number of bands."""


class IoError(FusionError):
    """Reading or writing a file failed."""
    exit_code = 3


class UnsupportedFormat(IoError):
    """The file layout (mode, depth, channel count) is not supported."""


class ChecksumError(IoError):
    """A dictionary file failed checksum verification."""


class VersionError(IoError):
    """A dictionary file was written by an unknown format version."""


class NumericalError(FusionError):
    """A numerical step produced an unusable result."""
    exit_code = 4


class RankError(NumericalError):
    """A dictionary or support submatrix is numerically rank-deficient."""


class DataError(NumericalError):
    """Training data cannot seed the requested dictionary."""


class DegenerateInput(NumericalError):
    """A statistic is undefined for the given input (e.g. constant band)."""


class StageError(FusionError):
    """A pipeline stage failed; wraps the original error.

    Errors outside this hierarchy count as numerical failures.
    """

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", NumericalError.exit_code)
        super().__init__(f"stage '{stage}' failed: {cause}")


def describe(error: Exception, stage: Optional[str] = None) -> str:
    """One-line description used by the CLI."""
    name = type(error).__name__
    if stage:
        return f"[{stage}] {name}: {error}"
    return f"{name}: {error}"
