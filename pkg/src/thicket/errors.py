class ThicketError(ValueError):
    """A contract or validation failure (CLI exit code 1)."""


class CapExceeded(ThicketError):
    """An exhaustive search was refused because it is over its configured cap (CLI exit code 2)."""
