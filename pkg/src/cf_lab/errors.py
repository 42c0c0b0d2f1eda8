"""Exceptions raised when a run is refused rather than degraded."""


class FeasibilityError(RuntimeError):
    """Exact enumeration would exceed the configured cap."""


class ResourceError(RuntimeError):
    """Requested simulation exceeds the evaluation budget."""
