"""Exception types for the extraction package."""


class ExtractorError(Exception):
    """Base class; anything raised on purpose derives from this."""


class JobError(ExtractorError):
    """The job or its input file is invalid (CLI exit code 1)."""


class ModelError(ExtractorError):
    """A model identifier could not be resolved or loaded (exit code 2)."""
