"""Exception types shared across the package."""


class NonConvergence(RuntimeError):
    """Adaptive quadrature ran out of subdivisions before meeting tolerance.

    Carries the best available estimate so callers can report a value
    together with the achieved (insufficient) error bound.
    """

    def __init__(self, estimate: complex, error_estimate: float, message: str = ""):
        self.estimate = estimate
        self.error_estimate = error_estimate
        msg = message or (
            f"quadrature did not converge: estimate={estimate!r}, "
            f"achieved error={error_estimate:.3e}"
        )
        super().__init__(msg)


class DegenerateDilation(ValueError):
    """Dilation by r = 0 requested."""


class ModeMismatch(ValueError):
    """Operation requires a specific pairing mode (hilbert vs bilinear)."""


class ParityUndefined(ValueError):
    """Input has support on both half-lines where a single parity is required."""


class ConfigError(ValueError):
    """Malformed CLI / config input."""


class InvalidExponent(ValueError):
    """Exponent p outside the admissible open range."""
