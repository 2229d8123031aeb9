"""Exception and warning types shared across the package."""


class StarSearchError(Exception):
    """Base class for all errors raised by starsearch."""


class InvalidDimensionError(StarSearchError, ValueError):
    """A size is zero or two objects disagree on their dimension."""


class InvalidArgumentError(StarSearchError, ValueError):
    """An argument is outside the accepted domain."""


class InvalidInstanceError(StarSearchError, ValueError):
    """An oracle instance violates its invariants (e.g. no marked element)."""


class InvalidConfigError(StarSearchError, ValueError):
    """A generator or sweep configuration cannot be satisfied."""


class InvalidDataError(StarSearchError, ValueError):
    """Input data is degenerate for the requested analysis."""


class PoleError(StarSearchError, ZeroDivisionError):
    """The eigenvalue sum was evaluated on one of its poles."""

    def __init__(self, class_index, phase, distance):
        self.class_index = class_index
        self.phase = phase
        self.distance = distance
        super().__init__(
            f"z hits the pole of phase class {class_index} (phi={phase:.6g}); "
            f"|z*exp(-i*phi)+1| = {distance:.3g}"
        )


class ConvergenceError(StarSearchError, ArithmeticError):
    """An iterative solver hit its iteration cap. ``best`` holds the last iterate."""

    def __init__(self, message, best=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.iterations = iterations


class NumericalError(StarSearchError, ArithmeticError):
    """A dense linear-algebra routine failed."""


class ResourceError(StarSearchError, MemoryError):
    """A dense construction would exceed the configured size cap."""


class NoSpeedupError(StarSearchError):
    """The background polynomial has no double root, so corrections are O(1/N).

    Informative rather than fatal: ``first_order`` maps each simple zeroth-order
    root to its first-order correction ``-f(z0)/f0'(z0)``.
    """

    def __init__(self, message, first_order=None):
        super().__init__(message)
        self.first_order = dict(first_order or {})


class RegimeWarning(UserWarning):
    """Parameters fall outside N >> d, M << N where the closed forms apply."""
