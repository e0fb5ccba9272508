"""Linearization of the transverse dynamics around a planned orbit.

The closed loop under the nominal feedforward u = B_pinv Uhat(x, P(x)) + v
has drift f(x) = [qd; Lambda(P) rho(P) + M(q)^{-1} Utilde(x, P(x))] with
force mismatch Utilde = B B_pinv Uhat - U.  Along the orbit Utilde vanishes,
so the Jacobian splits into a fixed-phase block A(s) plus a rank-one phase
correction xi(s) DP(s).

The transverse system dx_perp/dt = A_perp(s) x_perp + B_perp(s) v is only
determined up to rank-one terms that vanish on ker DP (the transverse
subspace).  Three representatives are provided; they share every transverse
property (Riccati residual, gains, stable characteristic multipliers) and
differ in how they transport the tangent direction x_s'(s):

  "tangent"      A_perp = Omega (A + xi DP) - xs' xs'^T D2P rho.  Makes
                 w(t) = x_s'(s(t)) an exact solution, so the neutral
                 characteristic multiplier is exactly one with eigenvector
                 x_s'(0).  Default.
  "annihilating" A_perp = Omega (A + xi DP) - Xi rho with
                 Xi = xs' xs'^T D2P + xs'' DP.  Maps the tangent to zero.
  "plain"        A_perp = Omega A - xs' xs'^T D2P rho.  Drops the phase
                 correction entirely; tangent transport picks up an O(1)
                 defect, so the neutral multiplier is only approximate.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .mechanics import feedforward_force
from .orbit import TWO_PI, wrap_phase

FEEDFORWARD_CHOICES = ("on-orbit", "mixed", "full")
REPRESENTATIVES = ("tangent", "annihilating", "plain")


def control_force(sys, orbit, choice, x, s):
    """Feedforward force Uhat(x, s) for the given evaluation choice.

    "on-orbit" freezes both arguments at the orbit, "mixed" uses the
    measured configuration with the nominal velocity, "full" uses the
    measured state throughout.
    """
    n = sys.n_q
    q_star = orbit.curve.value(s)
    qd_star = orbit.velocity(s)
    if choice == "on-orbit":
        return feedforward_force(sys, orbit, q_star, qd_star, s)
    if choice == "mixed":
        return feedforward_force(sys, orbit, x[:n], qd_star, s)
    if choice == "full":
        return feedforward_force(sys, orbit, x[:n], x[n:], s)
    raise ValueError(f"unknown feedforward choice: {choice!r}")


def nominal_feedback_input(sys, orbit, choice, x, s):
    """Scalar-per-actuator input u = B_pinv Uhat(x, s)."""
    return sys.input_left_inverse @ control_force(sys, orbit, choice, x, s)


def force_mismatch(sys, orbit, choice, x, s):
    """Utilde(x, s) = B B_pinv Uhat(x, s) - U(x).  Vanishes on the orbit."""
    n = sys.n_q
    q, qd = x[:n], x[n:]
    uhat = control_force(sys, orbit, choice, x, s)
    u_full = feedforward_force(sys, orbit, q, qd, s)
    return sys.input_matrix @ (sys.input_left_inverse @ uhat) - u_full


def _richardson(f, h):
    """Central difference with one Richardson extrapolation step."""
    d1 = f(h)
    d2 = f(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def drift_jacobian_fixed_phase(sys, orbit, choice, s, fd_step=1e-6):
    """A(s): Jacobian of the frozen-phase drift at x_s(s).

    Because Utilde vanishes on the orbit the configuration dependence of
    M^{-1} contributes nothing, and the block form is
    [[0, I], [M^{-1} dUtilde/dq, M^{-1} dUtilde/dqd]].
    """
    n = sys.n_q
    xs = orbit.state(s)
    Minv = np.linalg.inv(sys.mass_matrix(orbit.curve.value(s)))
    scale = fd_step * (1.0 + np.linalg.norm(xs))
    A = np.zeros((2 * n, 2 * n))
    A[:n, n:] = np.eye(n)
    for j in range(2 * n):
        e = np.zeros(2 * n)
        e[j] = 1.0

        def column(h):
            fp = force_mismatch(sys, orbit, choice, xs + h * e, s)
            fm = force_mismatch(sys, orbit, choice, xs - h * e, s)
            return (fp - fm) / (2.0 * h)

        A[n:, j] = Minv @ _richardson(column, scale)
    return A


def phase_rate_column(sys, orbit, choice, s, fd_step=1e-6):
    """xi(s): partial of the drift in s at fixed state x = x_s(s).

    xi = [0; (Lambda rho)' + M^{-1} dUtilde/ds].  The identity
    A xs' + xi = xs'' rho + xs' rho' holds exactly.
    """
    n = sys.n_q
    xs = orbit.state(s)
    Minv = np.linalg.inv(sys.mass_matrix(orbit.curve.value(s)))
    lam = orbit.state_prime(s)[n:]
    lam_p = orbit.state_second(s)[n:]
    rho = orbit.profile.rho(s)
    drho = orbit.profile.drho(s)

    def dds(h):
        fp = force_mismatch(sys, orbit, choice, xs, s + h)
        fm = force_mismatch(sys, orbit, choice, xs, s - h)
        return (fp - fm) / (2.0 * h)

    xi = np.zeros(2 * n)
    xi[n:] = lam_p * rho + lam * drho + Minv @ _richardson(dds, fd_step)
    return xi


def input_column(sys, orbit, op, s):
    """B_perp(s) = Omega(s) [0; M^{-1} B]."""
    n = sys.n_q
    g = np.zeros((2 * n, sys.n_u))
    g[n:] = np.linalg.solve(
        sys.mass_matrix(orbit.curve.value(s)), sys.input_matrix
    )
    return op.omega(s) @ g


def velocity_mismatch_partial(sys, orbit, choice, s):
    """Closed form of dUtilde/dqd on the orbit.

    The velocity derivative of the Coriolis force doubles by the exchange
    property, giving dU/dqd = 2 C(q, qd_*) + F.  The feedforward contributes
    B B_pinv of the same matrix only for the "full" choice.
    """
    q = orbit.curve.value(s)
    qd = orbit.velocity(s)
    core = 2.0 * sys.coriolis_matrix(q, qd) + sys.friction_matrix(q)
    if choice in ("on-orbit", "mixed"):
        return -core
    if choice == "full":
        return (
            sys.input_matrix @ (sys.input_left_inverse @ core) - core
        )
    raise ValueError(f"unknown feedforward choice: {choice!r}")


def _representative_a_perp(representative, A, xi, Om, DP, D2P, xsp, xss, rho):
    J = A + np.outer(xi, DP)
    curv = np.outer(xsp, xsp @ D2P)
    if representative == "tangent":
        return Om @ J - curv * rho
    if representative == "annihilating":
        return Om @ J - (curv + np.outer(xss, DP)) * rho
    if representative == "plain":
        return Om @ A - curv * rho
    raise ValueError(f"unknown representative: {representative!r}")


@dataclass
class TransverseLinearization:
    """Periodic coefficient data A_perp(s), B_perp(s) with interpolants."""

    sys: object
    orbit: object
    op: object
    feedforward: str
    representative: str
    s_nodes: np.ndarray
    A_nodes: np.ndarray
    B_nodes: np.ndarray
    Omega_nodes: np.ndarray
    DP_nodes: np.ndarray
    D2P_nodes: np.ndarray
    _spl: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        s = np.append(self.s_nodes, TWO_PI)

        def per(arr):
            wrapped = np.concatenate([arr, arr[:1]], axis=0)
            return CubicSpline(s, wrapped, axis=0, bc_type="periodic")

        self._spl = {
            "A": per(self.A_nodes),
            "B": per(self.B_nodes),
            "Om": per(self.Omega_nodes),
            "DP": per(self.DP_nodes),
            "D2P": per(self.D2P_nodes),
        }

    @property
    def n(self):
        return self.A_nodes.shape[1]

    @property
    def n_u(self):
        return self.B_nodes.shape[2]

    def A(self, s):
        return self._spl["A"](wrap_phase(s))

    def B(self, s):
        return self._spl["B"](wrap_phase(s))

    def Omega(self, s):
        return self._spl["Om"](wrap_phase(s))

    def DP(self, s):
        return self._spl["DP"](wrap_phase(s))

    def D2P(self, s):
        return self._spl["D2P"](wrap_phase(s))

    def rho(self, s):
        return self.orbit.profile.rho(wrap_phase(s))

    def xs_prime(self, s):
        return self.orbit.state_prime(s)


def build_transverse_linearization(
    sys,
    orbit,
    op,
    feedforward="mixed",
    grid=512,
    fd_step=1e-6,
    representative="tangent",
):
    """Assemble A_perp, B_perp on a uniform phase grid with interpolants."""
    if feedforward not in FEEDFORWARD_CHOICES:
        raise ValueError(f"unknown feedforward choice: {feedforward!r}")
    if representative not in REPRESENTATIVES:
        raise ValueError(f"unknown representative: {representative!r}")
    n2 = 2 * sys.n_q
    s_nodes = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    A_nodes = np.empty((grid, n2, n2))
    B_nodes = np.empty((grid, n2, sys.n_u))
    Om_nodes = np.empty((grid, n2, n2))
    DP_nodes = np.empty((grid, n2))
    D2P_nodes = np.empty((grid, n2, n2))
    for i, s in enumerate(s_nodes):
        A = drift_jacobian_fixed_phase(sys, orbit, feedforward, s, fd_step)
        xi = phase_rate_column(sys, orbit, feedforward, s, fd_step)
        DP = op.dP_on_orbit(s)
        D2P = op.d2P_on_orbit(s)
        xsp = orbit.state_prime(s)
        xss = orbit.state_second(s)
        Om = np.eye(n2) - np.outer(xsp, DP)
        rho = orbit.profile.rho(s)
        A_nodes[i] = _representative_a_perp(
            representative, A, xi, Om, DP, D2P, xsp, xss, rho
        )
        g = np.zeros((n2, sys.n_u))
        g[sys.n_q:] = np.linalg.solve(
            sys.mass_matrix(orbit.curve.value(s)), sys.input_matrix
        )
        B_nodes[i] = Om @ g
        Om_nodes[i] = Om
        DP_nodes[i] = DP
        D2P_nodes[i] = D2P
    return TransverseLinearization(
        sys=sys,
        orbit=orbit,
        op=op,
        feedforward=feedforward,
        representative=representative,
        s_nodes=s_nodes,
        A_nodes=A_nodes,
        B_nodes=B_nodes,
        Omega_nodes=Om_nodes,
        DP_nodes=DP_nodes,
        D2P_nodes=D2P_nodes,
    )


def transverse_jacobian_fd(sys, orbit, op, choice, s, fd_step=1e-6):
    """Independent route: differentiate the projected drift numerically.

    Returns (J_fd, A_perp_fd) where J_fd is the finite-difference Jacobian
    of f(x) = [qd; Lambda(P(x)) rho(P(x)) + M^{-1} Utilde(x, P(x))] with the
    projection solved inside each evaluation, and A_perp_fd applies the
    "annihilating" assembly to it.
    """
    n = sys.n_q
    xs = orbit.state(s)
    scale = fd_step * (1.0 + np.linalg.norm(xs))

    def f(x):
        sP = op.project(x, hint=s).s
        q, qd = x[:n], x[n:]
        lam = orbit.state_prime(sP)[n:]
        rho = orbit.profile.rho(sP)
        acc = lam * rho + np.linalg.solve(
            sys.mass_matrix(q), force_mismatch(sys, orbit, choice, x, sP)
        )
        return np.concatenate([qd, acc])

    J = np.empty((2 * n, 2 * n))
    for j in range(2 * n):
        e = np.zeros(2 * n)
        e[j] = 1.0

        def column(h):
            return (f(xs + h * e) - f(xs - h * e)) / (2.0 * h)

        J[:, j] = _richardson(column, scale)

    DP = op.dP_on_orbit(s)
    D2P = op.d2P_on_orbit(s)
    xsp = orbit.state_prime(s)
    xss = orbit.state_second(s)
    Om = np.eye(2 * n) - np.outer(xsp, DP)
    rho = orbit.profile.rho(s)
    Xi = np.outer(xsp, xsp @ D2P) + np.outer(xss, DP)
    return J, Om @ J - Xi * rho


def transverse_rate_defect(sys, orbit, op, tv, s, direction, eps, v=None):
    """Defect between nonlinear and linearized transverse rates.

    Perturbs the orbit state by eps * direction, applies the nominal
    feedforward plus transverse input v, and compares the exact rate of
    x_perp against A_perp x_perp + B_perp v.  Scales as O(eps^2) when the
    linearization is correct (take v of size O(eps)).
    """
    n = sys.n_q
    x = orbit.state(s) + eps * np.asarray(direction, dtype=float)
    pr = op.project(x, hint=s)
    sP, xp = pr.s, pr.x_perp
    u = nominal_feedback_input(sys, orbit, tv.feedforward, x, sP)
    if v is not None:
        u = u + np.asarray(v, dtype=float)
    q, qd = x[:n], x[n:]
    force = (
        sys.input_matrix @ u
        - sys.coriolis_matrix(q, qd) @ qd
        - sys.friction_matrix(q) @ qd
        - sys.gravity_vector(q)
    )
    xdot = np.concatenate([qd, np.linalg.solve(sys.mass_matrix(q), force)])
    # Transverse rate of x_perp = x - x_s(P(x)) uses the off-orbit gradient.
    rate_nl = xdot - orbit.state_prime(sP) * (op.dP(x, s=sP) @ xdot)
    rate_lin = tv.A(sP) @ xp
    if v is not None:
        rate_lin = rate_lin + tv.B(sP) @ np.asarray(v, dtype=float)
    return np.linalg.norm(rate_nl - rate_lin)
