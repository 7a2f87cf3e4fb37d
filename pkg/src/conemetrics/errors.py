"""Exception types raised by the library.

Everything derives from :class:`ConemetricsError` so callers (notably the
CLI) can distinguish library failures from programming errors.
"""


class ConemetricsError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(ConemetricsError, ValueError):
    """Operands live in spaces of different dimensions."""


class NonFiniteEntry(ConemetricsError, ValueError):
    """A vector contains NaN or an infinity."""


class NotStronglyMinihedral(ConemetricsError):
    """The cone kind does not support least upper bounds."""


class PointednessUncertified(ConemetricsError):
    """A polyhedral cone's constraint matrix is rank deficient, so the
    cone contains a line and is not pointed."""


class InteriorWitnessNotFound(ConemetricsError):
    """No strictly interior point could be certified for the cone."""


class MonotonicityRequired(ConemetricsError):
    """The seminorm family must be monotone for this operation."""


class UnsupportedOrder(ConemetricsError):
    """The operation needs the orthant order on the value cone."""


class HypothesisViolated(ConemetricsError):
    """A solver's side condition failed on sampled inputs.

    The message names the failed condition.
    """

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        message = condition if not detail else f"{condition}: {detail}"
        super().__init__(message)


class BracketNotFound(ConemetricsError):
    """Geometric expansion failed to bracket the scalarization value."""


class DivergenceError(ConemetricsError):
    """An iterate became non-finite during a solve."""


class UnknownSuite(ConemetricsError, KeyError):
    """Requested verification suite id is not registered."""

    def __init__(self, suite_id: str, available: tuple[str, ...]):
        self.suite_id = suite_id
        self.available = available
        super().__init__(
            f"unknown suite {suite_id!r}; available: {', '.join(available)}"
        )


class ConfigError(ConemetricsError):
    """An instance configuration is malformed.

    Carries the offending field name for CLI diagnostics.
    """

    def __init__(self, field: str, detail: str):
        self.field = field
        super().__init__(f"config field {field!r}: {detail}")
