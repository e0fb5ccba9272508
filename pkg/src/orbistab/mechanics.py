"""Euler-Lagrange mechanics for underactuated systems.

Systems have the form

    M(q) qdd + C(q, qd) qd + F(q) qd + G(q) = B u

with n_u < n_q independent actuators.  The Coriolis matrix must satisfy the
exchange property C(q, x) y = C(q, y) x, which every factorization derived
from Christoffel symbols does.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SingularDynamicsError

# Mass matrices with condition numbers past this are treated as singular.
MASS_COND_LIMIT = 1e12


@dataclass
class GeneralizedState:
    """Configuration and velocity (q, qd) of a mechanical system."""

    q: np.ndarray
    qd: np.ndarray

    def __post_init__(self):
        self.q = np.atleast_1d(np.asarray(self.q, dtype=float))
        self.qd = np.atleast_1d(np.asarray(self.qd, dtype=float))
        if self.q.shape != self.qd.shape:
            raise ValueError("q and qd must have matching shapes")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.qd))):
            raise ValueError("state entries must be finite")

    @property
    def x(self):
        """Stacked state vector (q, qd)."""
        return np.concatenate([self.q, self.qd])

    @classmethod
    def from_x(cls, x):
        x = np.asarray(x, dtype=float)
        n = x.size // 2
        return cls(x[:n], x[n:])


@dataclass
class MechanicalSystem:
    """Callable description of an Euler-Lagrange system.

    Parameters
    ----------
    n_q, n_u : int
        Number of generalized coordinates and independent inputs.
    mass_matrix : callable
        q -> (n_q, n_q) symmetric positive definite matrix.
    coriolis_matrix : callable
        (q, w) -> (n_q, n_q) matrix, linear in w, satisfying the exchange
        property C(q, x) y = C(q, y) x.
    friction_matrix : callable
        q -> (n_q, n_q) viscous friction matrix.
    gravity_vector : callable
        q -> (n_q,) gradient of the potential energy.
    input_matrix : ndarray
        Constant (n_q, n_u) matrix of full column rank.
    input_left_inverse : ndarray
        Constant (n_u, n_q) left inverse of ``input_matrix``.
    potential_energy : callable, optional
        q -> scalar, used only by energy diagnostics.
    """

    n_q: int
    n_u: int
    mass_matrix: Callable[[np.ndarray], np.ndarray]
    coriolis_matrix: Callable[[np.ndarray, np.ndarray], np.ndarray]
    friction_matrix: Callable[[np.ndarray], np.ndarray]
    gravity_vector: Callable[[np.ndarray], np.ndarray]
    input_matrix: np.ndarray
    input_left_inverse: np.ndarray
    potential_energy: Optional[Callable[[np.ndarray], float]] = None
    name: str = field(default="")

    def __post_init__(self):
        self.input_matrix = np.asarray(self.input_matrix, dtype=float).reshape(
            self.n_q, self.n_u
        )
        self.input_left_inverse = np.asarray(
            self.input_left_inverse, dtype=float
        ).reshape(self.n_u, self.n_q)
        if np.linalg.matrix_rank(self.input_matrix) < self.n_u:
            raise ValueError("input matrix must have full column rank")
        gram = self.input_left_inverse @ self.input_matrix
        if not np.allclose(gram, np.eye(self.n_u), atol=1e-12):
            raise ValueError("input_left_inverse is not a left inverse of B")


def forward_dynamics(sys, x, u):
    """Accelerations of the system: xdot for state x under input u.

    Raises ``SingularDynamicsError`` when the mass matrix is numerically
    singular at the queried configuration.
    """
    x = np.asarray(x, dtype=float)
    q, qd = x[: sys.n_q], x[sys.n_q :]
    u = np.atleast_1d(np.asarray(u, dtype=float))
    M = sys.mass_matrix(q)
    if np.linalg.cond(M) > MASS_COND_LIMIT:
        raise SingularDynamicsError(
            f"mass matrix condition number exceeds {MASS_COND_LIMIT:g} at q={q}"
        )
    rhs = (
        sys.input_matrix @ u
        - sys.coriolis_matrix(q, qd) @ qd
        - sys.friction_matrix(q) @ qd
        - sys.gravity_vector(q)
    )
    qdd = np.linalg.solve(M, rhs)
    return np.concatenate([qd, qdd])


def feedforward_force(sys, orbit, q, qd, s):
    """Generalized force that sustains the synchronized motion at phase s.

    Evaluates M(q) qdd_*(s) + C(q, qd) qd + F(q) qd + G(q), where qdd_*(s)
    is the nominal acceleration of the orbit.  Premultiplying by the input
    left inverse yields the feedforward part of the control law.
    """
    q = np.asarray(q, dtype=float)
    qd = np.asarray(qd, dtype=float)
    return (
        sys.mass_matrix(q) @ orbit.accel(s)
        + sys.coriolis_matrix(q, qd) @ qd
        + sys.friction_matrix(q) @ qd
        + sys.gravity_vector(q)
    )


def feedforward_force_split(sys, orbit, q, qd, s):
    """Same force as ``feedforward_force`` via the velocity-split identity.

    With z = qd - qd_*(s), bilinearity and the exchange property give

        U(q, qd, s) = U(q, qd_*, s) + C(q, z) z + 2 C(q, qd_*) z + F(q) z.

    Useful as an independent cross-check of the direct evaluation.
    """
    q = np.asarray(q, dtype=float)
    qd = np.asarray(qd, dtype=float)
    vstar = orbit.velocity(s)
    z = qd - vstar
    return (
        feedforward_force(sys, orbit, q, vstar, s)
        + sys.coriolis_matrix(q, z) @ z
        + 2.0 * sys.coriolis_matrix(q, vstar) @ z
        + sys.friction_matrix(q) @ z
    )


def total_energy(sys, x):
    """Kinetic plus potential energy; requires ``potential_energy``."""
    x = np.asarray(x, dtype=float)
    q, qd = x[: sys.n_q], x[sys.n_q :]
    if sys.potential_energy is None:
        raise ValueError("system has no potential_energy callable")
    return 0.5 * qd @ sys.mass_matrix(q) @ qd + sys.potential_energy(q)


def cart_pendulum(gravity=9.81):
    """Cart with an inverted pendulum, normalized masses and length.

    Coordinates q = (x, theta): cart position and pendulum angle from the
    upright.  Only the cart is actuated.
    """
    g = float(gravity)

    def mass(q):
        th = q[1]
        return np.array([[2.0, np.cos(th)], [np.cos(th), 1.0]])

    def coriolis(q, w):
        th = q[1]
        return np.array([[0.0, -np.sin(th) * w[1]], [0.0, 0.0]])

    def friction(q):
        return np.zeros((2, 2))

    def grav(q):
        return np.array([0.0, -g * np.sin(q[1])])

    def potential(q):
        return g * np.cos(q[1])

    return MechanicalSystem(
        n_q=2,
        n_u=1,
        mass_matrix=mass,
        coriolis_matrix=coriolis,
        friction_matrix=friction,
        gravity_vector=grav,
        input_matrix=np.array([[1.0], [0.0]]),
        input_left_inverse=np.array([[1.0, 0.0]]),
        potential_energy=potential,
        name="cart_pendulum",
    )
