"""Exception types shared across the toolkit."""


class XsitError(Exception):
    """Base class for toolkit errors."""


class ParseError(XsitError):
    """Malformed input; carries a 1-based line number when one is known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DensifyError(XsitError):
    """Densification eliminated every action or every object."""


class DesignError(XsitError):
    """A design request the matrix cannot satisfy."""


class SplitError(XsitError):
    """Split construction or manifest handling failed."""


class ScoreError(XsitError):
    """Predictions do not cover or match the manifest."""


class TrialError(XsitError):
    """A trial in a repeated run failed; the message names the trial."""


class ConfigError(XsitError):
    """Invalid CLI configuration."""
