"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration or model parameter violates one of its invariants."""


class NonConvergence(RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget.

    The best available estimate and its error bound are kept on the
    exception so callers can decide whether the result is still usable.
    """

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class Boundary(RuntimeError):
    """A maximizer was found at an endpoint of the search range."""

    def __init__(self, edge, bandwidth, value):
        super().__init__(
            f"maximum at {edge} endpoint of the bandwidth range "
            f"(W={bandwidth:.6g} Hz, value={value:.6g}); widen the range"
        )
        self.edge = edge
        self.bandwidth = bandwidth
        self.value = value


class SizeExceeded(ValueError):
    """A dense covariance would exceed the desk-scale size cap."""


class NumericalFailure(ArithmeticError):
    """A factorization or evaluation lost the numerical property it relies on."""
