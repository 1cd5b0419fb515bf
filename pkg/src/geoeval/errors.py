"""Shared exception types."""


class DataError(ValueError):
    """Malformed, inconsistent, or degenerate input data.

    Raised by file parsers, metric preconditions, and the scene harness.
    The CLI maps this to exit code 2.
    """
