"""Orbital stabilization of underactuated mechanical systems.

Plans periodic motions from virtual holonomic constraints, builds
excessive transverse coordinates through projection operators, linearizes
the dynamics transverse to the orbit, solves the projected periodic
Riccati equation for an orbitally stabilizing feedback, and verifies the
result by Floquet and Lyapunov analysis.
"""

from .errors import (
    ConfigError,
    EscapedTubeError,
    ImplicitFunctionError,
    InconsistentParameterizationError,
    InfeasibleOrbitError,
    NoCertificateError,
    NotApplicableError,
    NumericBlowupError,
    OrbistabError,
    OutsideNeighborhoodError,
    ProjectionError,
    PsdFloorError,
    SingularDynamicsError,
    VerificationFailedError,
)
from .mechanics import (
    MechanicalSystem,
    cart_pendulum,
    forward_dynamics,
    total_energy,
)
from .orbit import (
    ConstraintCurve,
    OrbitParameterization,
    VelocityProfile,
    nominal_input,
    plan_orbit,
    reduced_dynamics,
    solve_rho,
    upright_oscillation_curve,
    wrap_phase,
)
from .projection import (
    MinDistanceProjection,
    PhaseProjection,
    ProjectionResult,
    make_projection,
)
from .linearization import (
    TransverseLinearization,
    build_transverse_linearization,
    nominal_feedback_input,
    transverse_jacobian_fd,
    transverse_rate_defect,
)
from .riccati import (
    ConstantCoefficientEmbedding,
    FloquetResult,
    GainSchedule,
    SolverConfig,
    floquet_multipliers,
    replay_floquet_multipliers,
    lyapunov_rate_fd,
    lyapunov_rate_matrix,
    projected_residual,
    solve_projected_riccati,
)
from .simulation import (
    OpenLoopReplay,
    OrbitStabilizingController,
    SimConfig,
    SimulationTrace,
    noise_stream,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConstantCoefficientEmbedding",
    "ConstraintCurve",
    "EscapedTubeError",
    "FloquetResult",
    "GainSchedule",
    "ImplicitFunctionError",
    "InconsistentParameterizationError",
    "InfeasibleOrbitError",
    "MechanicalSystem",
    "MinDistanceProjection",
    "NoCertificateError",
    "NotApplicableError",
    "NumericBlowupError",
    "OpenLoopReplay",
    "OrbistabError",
    "OrbitParameterization",
    "OrbitStabilizingController",
    "OutsideNeighborhoodError",
    "PhaseProjection",
    "ProjectionError",
    "ProjectionResult",
    "PsdFloorError",
    "SimConfig",
    "SimulationTrace",
    "SingularDynamicsError",
    "SolverConfig",
    "TransverseLinearization",
    "VelocityProfile",
    "VerificationFailedError",
    "build_transverse_linearization",
    "cart_pendulum",
    "floquet_multipliers",
    "replay_floquet_multipliers",
    "forward_dynamics",
    "lyapunov_rate_fd",
    "lyapunov_rate_matrix",
    "make_projection",
    "noise_stream",
    "nominal_feedback_input",
    "nominal_input",
    "plan_orbit",
    "projected_residual",
    "reduced_dynamics",
    "simulate",
    "solve_projected_riccati",
    "solve_rho",
    "total_energy",
    "transverse_jacobian_fd",
    "transverse_rate_defect",
    "upright_oscillation_curve",
    "wrap_phase",
    "__version__",
]
