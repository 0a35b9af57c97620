"""Exception hierarchy.

Two broad families, matching the CLI exit codes: ValidationError (bad
input data or schema, exit 1) and ComputationError (runtime or numeric
failure, exit 2).
"""


class AnchorScoreError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(AnchorScoreError):
    """Input data violates the schema or a type invariant."""


class ParseError(ValidationError):
    """A file could not be parsed; carries the 1-based line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ComputationError(AnchorScoreError):
    """A numeric or runtime failure during an otherwise valid run."""


class DimensionMismatchError(ComputationError):
    pass


class InsufficientAnchorsError(ComputationError):
    pass


class NumericInputError(ComputationError):
    pass


class EmptyInputError(ComputationError):
    pass


class EmptyEvaluationError(ComputationError):
    pass
