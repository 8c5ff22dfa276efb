"""Exception hierarchy for treeaut."""

from typing import Optional


class TreeautError(Exception):
    """Base class for all errors raised by treeaut."""


class ConfigError(TreeautError):
    """Invalid configuration value."""


class TreeFormatError(TreeautError, ValueError):
    """Malformed tree text or an invalid tree structure."""


class EnumerationLimitError(TreeautError):
    """An exhaustive enumerator was asked for a size above its cap."""

    def __init__(self, n: int, limit: int, what: str = "trees"):
        self.n = n
        self.limit = limit
        super().__init__(f"Refusing to enumerate {what} of size {n}: limit is {limit}")


class BruteForceLimitError(TreeautError):
    """The permutation oracle was asked for a tree above its size cap."""

    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"Brute-force automorphism count limited to n <= {limit}, got n = {n}")


class UnattainableSizeError(TreeautError):
    """No tree of the requested size exists for the offspring support."""

    def __init__(self, n: int, family: str):
        self.n = n
        self.family = family
        super().__init__(f"Size n = {n} is unattainable for {family}")


class RejectionBudgetExceeded(TreeautError):
    """A rejection sampler ran out of attempts."""

    def __init__(self, attempts: int, what: str = "sample"):
        self.attempts = attempts
        super().__init__(f"Rejection budget exceeded after {attempts} attempts ({what})")


class CountTableTooSmall(TreeautError):
    """The precomputed count table does not reach the requested size."""

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"Count table holds sizes up to {available}; a table of size {required} is required"
        )


class SeriesDivergenceError(TreeautError):
    """A series coefficient overflowed or became non-finite."""

    def __init__(self, order: int, detail: Optional[str] = None):
        self.order = order
        msg = f"Coefficient of order {order} is not finite"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NoCriticalPointError(TreeautError):
    """Phi(tau) = tau Phi'(tau) has no root inside the search bracket."""


class BracketError(TreeautError):
    """A bracketed root search did not find a sign change."""


class InfiniteSupportError(TreeautError):
    """A method needing a polynomial weight function got an infinite support."""


class SeriesLimitError(TreeautError, ValueError):
    """A series parameter lies outside its configured range."""

    def __init__(self, name: str, value: float, limit: float):
        self.name = name
        self.value = value
        self.limit = limit
        super().__init__(f"{name} = {value} exceeds the configured limit {limit}")
