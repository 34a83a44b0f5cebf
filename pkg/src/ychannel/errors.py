"""Exception types shared across the package."""


class YchannelError(Exception):
    """Base class for all errors raised by this package."""


class IntegralityError(YchannelError, ValueError):
    """A demand with fractional components was passed to the allocator."""


class ContractError(YchannelError, ValueError):
    """A documented precondition of an operation was violated."""


class UnsupportedRegimeError(YchannelError, ValueError):
    """Requested an antenna configuration outside the supported N <= M regime."""


class NearSingularChannelError(YchannelError, ValueError):
    """A channel matrix failed the condition-number guard."""


class InfeasibleDemandError(YchannelError):
    """The demanded tuple needs more sub-channels than the relay provides."""

    def __init__(self, n_s: int, n: int, message: str | None = None):
        self.n_s = n_s
        self.n = n
        super().__init__(message or f"demand needs {n_s} sub-channels, relay has {n}")
