"""Typed errors raised across the package."""


class DefphaseError(Exception):
    """Base class for every error this package raises on purpose."""


class DimensionMismatch(DefphaseError):
    """Phase point, algebra, or Hamiltonian dimensions disagree."""


class UnsupportedBracket(DefphaseError):
    """The algebra family does not define a Poisson structure matrix."""


class NonFiniteGradient(DefphaseError):
    """A finite-difference gradient came out nan or inf."""


class NonFiniteValue(DefphaseError):
    """A scalar evaluation came out nan or inf."""


class NonPositiveMass(DefphaseError):
    """Masses must be strictly positive."""


class SingularRadius(DefphaseError):
    """A point-source potential was evaluated too close to the source."""


class StepUnderflow(DefphaseError):
    """The adaptive integrator shrank the step below its floor."""


class NonMonotonicMap(DefphaseError):
    """The velocity-to-momentum map is not monotonic on the search range."""


class BracketNotFound(DefphaseError):
    """No root bracket was found for the velocity-to-momentum inversion."""


class MissingParams(DefphaseError):
    """A composite-system operation needs per-particle parameters that are absent."""


class DegenerateDenominator(DefphaseError):
    """The two accelerations sum to zero; the relative difference is undefined."""


class GeometryViolation(DefphaseError):
    """Three-body scenario geometry is invalid."""


class SeriesOutOfRange(DefphaseError):
    """A truncated series was evaluated far outside its validity range."""


class ConfigError(DefphaseError):
    """A run configuration failed schema validation."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
