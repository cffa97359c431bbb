"""Exception hierarchy for the tracking toolkit."""


class TrackingError(Exception):
    """Base class for all toolkit errors."""


class ZeroVector(TrackingError):
    """Position vector has zero norm; spherical angles are undefined."""


class MissingInput(TrackingError):
    """A model-required input (acceleration, turn rate) was not supplied."""


class NonpositiveInverseRange(TrackingError):
    """Inverted range s <= 0; the state cannot be mapped back to Cartesian."""


class ElevationSingularity(TrackingError):
    """Elevation within 1e-9 rad of +/-pi/2 where the dynamics diverge."""


class StepLeftDomain(TrackingError):
    """A discretization step produced s <= 0 or |theta| >= pi/2."""


class FactorizationFailed(TrackingError):
    """Covariance could not be Cholesky-factored even after jitter retries."""


class SingularInnovation(TrackingError):
    """Innovation covariance is not invertible."""


class DegenerateProbabilities(TrackingError):
    """All predicted mode probabilities fell below the numerical floor."""


class SigmaPointCrossesZero(TrackingError):
    """A scalar sigma point on inverted range is <= 0; range variance undefined."""


class PhaseSumMismatch(TrackingError):
    """Scenario phase durations do not sum to the declared total time."""


class ConfigInvalid(TrackingError):
    """A run configuration violates one or more invariants.

    Carries the list of violation messages (each prefixed with the
    offending field path).
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
