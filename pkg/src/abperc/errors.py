"""Exception types shared across modules."""


class EstimationError(RuntimeError):
    """A Monte Carlo estimation could not be completed (e.g. non-bracketing)."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured enumeration/memory guard."""
