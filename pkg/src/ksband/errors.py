"""Exception types shared across the package."""


class KsbandError(Exception):
    """Base class for all package errors."""


class ConfigError(KsbandError, ValueError):
    """Invalid configuration, shape or parameter.

    ``problems`` holds one message per offending field when several are
    collected at once.
    """

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems or [message])


class RangeError(KsbandError, ValueError):
    """Argument outside the supported numeric range."""


class SingularSymbolError(KsbandError, ArithmeticError):
    def __init__(self, xi, eta, denominator):
        super().__init__(
            f"singular Coward-Hall symbol at xi={xi!r}, eta={eta!r} "
            f"(denominator {denominator!r})"
        )
        self.xi = xi
        self.eta = eta
        self.denominator = denominator


class FitDomainError(KsbandError, ValueError):
    """Data unsuitable for the requested fit (e.g. nonpositive values under a log)."""


class ResolutionError(KsbandError, ValueError):
    """Too few resolved Fourier shells for a tail estimate."""


class PreconditionError(KsbandError, ValueError):
    pass


class BlowUpError(KsbandError, FloatingPointError):
    """Raised when a trajectory leaves the representable range.

    Carries the time, the offending mode and whatever diagnostics were
    recorded before the failure (``partial``).
    """

    def __init__(self, t, mode, amplitude, partial=None):
        super().__init__(f"blow-up at t={t:.6g}: |u_k|={amplitude:.3g} at k={mode}")
        self.t = t
        self.mode = mode
        self.amplitude = amplitude
        self.partial = partial


class FormatError(KsbandError, ValueError):
    """Input file does not follow the documented binary or text layout."""
