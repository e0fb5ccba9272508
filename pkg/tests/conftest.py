import numpy as np
import pytest

from orbistab import (
    SolverConfig,
    cart_pendulum,
    plan_orbit,
    solve_projected_riccati,
    upright_oscillation_curve,
)
from orbistab.linearization import build_transverse_linearization
from orbistab.projection import PhaseProjection

REFERENCE_A2 = 0.1129
PINNED_INITIAL_STATE = np.array([0.1, 0.4, -0.1, -0.2])


@pytest.fixture(scope="session")
def cart():
    return cart_pendulum()


@pytest.fixture(scope="session")
def orbit(cart):
    return plan_orbit(cart, upright_oscillation_curve(REFERENCE_A2))


@pytest.fixture(scope="session")
def op(orbit):
    return PhaseProjection(orbit)


@pytest.fixture(scope="session")
def tv(cart, orbit, op):
    return build_transverse_linearization(cart, orbit, op)


@pytest.fixture(scope="session")
def reference_gains(tv):
    """Q = I, Gamma = kappa = 0.1, Fourier order 40."""
    return solve_projected_riccati(tv, SolverConfig())


@pytest.fixture(scope="session")
def capture_gains(tv):
    """More aggressive input weight; used for the convergence run."""
    cfg = SolverConfig(Gamma=0.06 * np.eye(tv.n_u))
    return solve_projected_riccati(tv, cfg)
