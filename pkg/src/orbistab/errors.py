"""Exception types shared across the toolkit."""


class OrbistabError(Exception):
    """Base class for all toolkit errors."""


class SingularDynamicsError(OrbistabError):
    """Mass matrix is numerically singular at the queried configuration."""


class NotApplicableError(OrbistabError):
    """System shape does not admit the requested construction."""


class InfeasibleOrbitError(OrbistabError):
    """No positive periodic velocity profile exists for the constraint curve."""


class InconsistentParameterizationError(OrbistabError):
    """Velocity profile continuations from adjacent anchors disagree."""


class ProjectionError(OrbistabError):
    """Base class for phase-projection failures."""


class OutsideNeighborhoodError(ProjectionError):
    """Projection iteration failed to converge; state is outside the tube."""


class ImplicitFunctionError(ProjectionError):
    """Phase residual is degenerate; the implicit function theorem fails."""


class NoCertificateError(OrbistabError):
    """Riccati residual stagnated above tolerance; no certificate produced."""


class PsdFloorError(OrbistabError):
    """Riccati iterate lost positive semidefiniteness beyond the margin."""


class VerificationFailedError(OrbistabError):
    """Post-solve Floquet check rejected the gain schedule."""


class EscapedTubeError(OrbistabError):
    """Simulation left the projection's convergence region.

    Carries the partial trace recorded up to the failure time in
    ``partial_trace`` (may be None when failure happens at t = 0).
    """

    def __init__(self, message, partial_trace=None):
        super().__init__(message)
        self.partial_trace = partial_trace


class ConfigError(OrbistabError):
    """Run configuration is malformed, inconsistent, or unreadable."""


class NumericBlowupError(OrbistabError):
    """State or iterate diverged beyond representable bounds."""
