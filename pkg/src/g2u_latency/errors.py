"""Exception and warning types shared across the package."""


class G2UError(Exception):
    """Base class for all package errors."""


class ConfigError(G2UError, ValueError):
    """Invalid scenario or parameter configuration."""


class UnknownCase(ConfigError):
    pass


class CoincidentNodes(G2UError, ValueError):
    """Two nodes share a position where a direction is required."""


class DegenerateLink(G2UError, ValueError):
    """A link of zero length was asked for a path-loss quantity."""


class DeadInput(G2UError, ValueError):
    """Relay input carries no power, so the AF gain is undefined."""


class InfeasibleDelay(G2UError, ValueError):
    pass


class NumericalError(G2UError, ArithmeticError):
    """Base class for numerical failures (CLI exit code 3)."""


class NonConvergence(NumericalError):
    pass


class ContourFailure(NumericalError):
    """Mellin-Barnes contour cannot separate the two gamma pole families."""


class AllOutage(NumericalError):
    """Every Monte Carlo realization hit the zero-capacity sentinel."""


class NotUnimodal(UserWarning):
    pass


class ModelDiscrepancyWarning(UserWarning):
    """Closed-form and quadrature evaluators disagree beyond tolerance."""
