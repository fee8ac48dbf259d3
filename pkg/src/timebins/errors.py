"""Exception types shared across the package."""


class GuardError(RuntimeError):
    """A numeric guard tripped: truncation loss, recurrence, overflow, or drift."""
