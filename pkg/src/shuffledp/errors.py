"""Exception types shared across the package.

The CLI maps these onto process exit codes: validation failures exit with 2,
enumeration-cap refusals with 3, and internal invariant violations with 4.
"""


class ValidationError(ValueError):
    """An input failed a documented precondition."""


class EnumerationCapError(RuntimeError):
    """An exact enumeration would exceed the configured atom cap.

    Raised instead of attempting the computation; the message points at the
    Monte Carlo fallback.
    """


class InternalInvariantError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
