"""Exception types shared across the package."""


class StarVerifyError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(StarVerifyError, ValueError):
    """Shapes of related arrays disagree.

    Carries the name of the offending field so callers can report it.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class EmptySetError(StarVerifyError):
    """A query was made against a star that contains no points."""


class UnboundedSetError(StarVerifyError):
    """A bound query hit an unbounded direction.

    Happens when predicate variables lack finite box bounds; that is a
    modelling error on the caller's side, so it is surfaced, not masked.
    """


class SplitBudgetError(StarVerifyError):
    """Exact splitting produced more stars than the configured budget."""


class RejectionBudgetError(StarVerifyError):
    """Rejection sampling gave up; the set is too thin for box sampling."""


class SolverError(StarVerifyError, RuntimeError):
    """The simplex iteration failed to converge within its hard cap."""


class FormatError(StarVerifyError, ValueError):
    """A serialized file does not match the expected format."""
