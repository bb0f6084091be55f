"""Exception types shared across the toolkit."""


class LogGaugeError(Exception):
    """Base class for all toolkit errors."""


class BoxError(LogGaugeError, ValueError):
    """Malformed or degenerate box/polygon geometry."""


class ParseError(LogGaugeError, ValueError):
    """Invalid annotation, detection, or manifest content.

    Carries the 1-based line (or record) number and an optional source path
    so diagnostics can point at the offending input.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        parts = []
        if path is not None:
            parts.append(str(path))
        if line is not None:
            parts.append(f"line {line}")
        parts.append(message)
        super().__init__(": ".join(parts))


class UsageError(LogGaugeError, ValueError):
    """An operation was called in a way its contract forbids."""


class UnknownImageError(LogGaugeError, LookupError):
    """A record references an image id absent from the manifest."""

    def __init__(self, image_id):
        self.image_id = image_id
        super().__init__(f"unknown image id: {image_id!r}")

    def __str__(self):
        return self.args[0]


class EvalError(LogGaugeError, ValueError):
    """Evaluation precondition violated (e.g. empty ground-truth corpus)."""
