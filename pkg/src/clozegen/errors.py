"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage errors -> 2, ResourceError -> 3,
DataValidationError (and ParseError) -> 4, DivergenceError -> 5.
"""


class ClozegenError(Exception):
    """Base class for all toolkit errors."""


class ResourceError(ClozegenError):
    """A required file or directory is missing or unreadable."""


class ParseError(ClozegenError):
    """A resource file is malformed."""

    def __init__(self, message, filename=None, line=None):
        self.filename = filename
        self.line = line
        where = ""
        if filename is not None:
            where = f" [{filename}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + where)


class DataValidationError(ClozegenError):
    """Input data violates a documented invariant."""


class OOVError(ClozegenError):
    """A word has no vector in the embedding table."""


class NoSenseError(ClozegenError):
    """A word has no sense in the lexicon after lemmatization."""


class ConfigError(ClozegenError):
    """Dimensions or hyperparameters are inconsistent."""


class DivergenceError(ClozegenError):
    """Training produced a non-finite loss."""

    def __init__(self, message, epoch=None, batch=None):
        self.epoch = epoch
        self.batch = batch
        super().__init__(message)
