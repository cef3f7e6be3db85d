"""Exception hierarchy shared by all neurovit modules.

Every error raised by the toolkit derives from :class:`NeurovitError` so
callers (and the CLI) can map failures to exit codes without matching on
message strings.
"""


class NeurovitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(NeurovitError):
    """Invalid or inconsistent configuration (bad dims, bad fractions, ...)."""


class ContractError(NeurovitError):
    """A documented precondition of an operation was violated."""


class FormatError(NeurovitError):
    """Base class for file-format problems."""


class MalformedHeaderError(FormatError):
    """Header bytes do not describe a valid file of the expected format."""


class UnsupportedFormatError(FormatError):
    """File is recognized but uses a feature outside the supported subset."""


class CompressedNiftiError(UnsupportedFormatError):
    """Gzip-compressed NIfTI input; only uncompressed files are supported."""


class TruncatedFileError(FormatError):
    """Payload shorter than the header-declared size."""


class CorruptCheckpointError(FormatError):
    """Checkpoint bytes are inconsistent with their own declared layout."""


class HeadMismatchError(CorruptCheckpointError):
    """Checkpoint matches the target config except for the classifier head.

    Raised so fine-tuning can catch it and reinitialize the head.
    """


class DegenerateInputError(NeurovitError):
    """Input has no usable variation (e.g. constant volume under z-score)."""


class InfeasibleSplitError(NeurovitError):
    """Too few subjects to populate every requested split."""


class UndefinedMetricError(NeurovitError):
    """Metric is undefined for the given input (e.g. single-class ROC)."""


class NumericFaultError(NeurovitError):
    """NaN/Inf appeared in a computation that must stay finite."""


class DeterminismError(NeurovitError):
    """A function that must be deterministic returned differing results."""


class IntegrityError(NeurovitError):
    """A result store entry failed its integrity check."""
