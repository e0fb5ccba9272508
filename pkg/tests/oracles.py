"""Independent reference routes used only by the test suite.

Each oracle recomputes a production quantity through a different
algorithm so agreement is evidence, not tautology.
"""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


def rho_time_oracle(rd, s_a, s_b, offset=1e-3):
    """Phase speed on (s_a, s_b) by integrating the reduced ODE in time.

    Starts just past the anchor s_a with the anchor value z = -gamma/beta
    and the L'Hopital slope of z' = -2 (beta z + gamma) / alpha, then flows
    (s, sdot) forward in time until s reaches s_b - offset.  Returns a
    callable rho_oracle(s) valid on the interior of the segment.
    """

    def fd(f, s, h=1e-6):
        return (f(s + h) - f(s - h)) / (2.0 * h)

    z_a = -rd.gamma(s_a) / rd.beta(s_a)
    bp = fd(rd.beta, s_a)
    gp = fd(rd.gamma, s_a)
    ap = fd(rd.alpha, s_a)
    zp_a = -2.0 * (bp * z_a + gp) / (ap + 2.0 * rd.beta(s_a))

    s0 = s_a + offset
    v0 = np.sqrt(z_a + zp_a * offset)

    def rhs(t, y):
        s, v = y
        return [v, -(rd.beta(s) * v * v + rd.gamma(s)) / rd.alpha(s)]

    def reach(t, y):
        return y[0] - (s_b - offset)

    reach.terminal = True
    sol = solve_ivp(
        rhs,
        (0.0, 100.0),
        [s0, v0],
        method="DOP853",
        rtol=1e-11,
        atol=1e-12,
        dense_output=True,
        events=reach,
    )
    if not sol.t_events[0].size:
        raise RuntimeError("oracle never reached the far anchor")
    t_end = sol.t_events[0][0]

    def rho_oracle(s):
        t_star = brentq(lambda t: sol.sol(t)[0] - s, 0.0, t_end)
        return sol.sol(t_star)[1]

    return rho_oracle


def are_gain_oracle(A, B, Q, Gamma):
    """LQR gain by the Hamiltonian eigenvector method.

    Builds the 2n x 2n Hamiltonian, extracts the stable invariant
    subspace [X1; X2], and returns (R, K) with R = X2 X1^{-1} and
    K = -Gamma^{-1} B^T R.  Independent of any Riccati iteration.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    Gamma = np.asarray(Gamma, dtype=float)
    n = A.shape[0]
    S = B @ np.linalg.solve(Gamma, B.T)
    H = np.block([[A, -S], [-Q, -A.T]])
    lam, V = np.linalg.eig(H)
    stable = np.real(lam) < 0.0
    if int(stable.sum()) != n:
        raise RuntimeError("Hamiltonian does not split into n stable modes")
    Vs = V[:, stable]
    X1, X2 = Vs[:n, :], Vs[n:, :]
    R = np.real(X2 @ np.linalg.inv(X1))
    R = 0.5 * (R + R.T)
    K = -np.linalg.solve(Gamma, B.T @ R)
    return R, K
