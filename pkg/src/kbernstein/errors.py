class KBernsteinError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(KBernsteinError, ValueError):
    """An argument falls outside the documented domain (|pole| >= 1, odd s, ...)."""


class PoleEvaluationError(KBernsteinError, ZeroDivisionError):
    """A Blaschke factor was evaluated at (or numerically on top of) its pole."""


class AnalyticityError(KBernsteinError, ValueError):
    """Sampled function has significant negative-frequency content.

    Either the function is not in H^2 or the circle grid is too coarse.
    """


class ConvergenceError(KBernsteinError, RuntimeError):
    """Eigen-solver did not reach the residual tolerance within its iteration cap."""


class BoundViolation(KBernsteinError, AssertionError):
    """A bound that must hold in exact arithmetic failed beyond tolerance."""
