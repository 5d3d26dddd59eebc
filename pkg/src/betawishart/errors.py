"""Exception types shared across the package."""

__all__ = ["InvalidArgumentError", "ConvergenceError"]


class InvalidArgumentError(ValueError):
    """An input violates a documented precondition."""


class ConvergenceError(RuntimeError):
    """An iterative solve hit its iteration cap.

    Attributes
    ----------
    bracket : tuple of float or None
        The last bracket ``(lo, hi)`` known to contain the root.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket
