"""Projected periodic Riccati solve and closed-loop certificates.

The transverse gain schedule comes from the periodic differential Riccati
equation projected onto the transverse subspace,

    Omega^T [R' rho + A_perp^T R + R A_perp + Q + kappa R
             - R B_perp Gamma^{-1} B_perp^T R] Omega = 0,

solved for a symmetric periodic R(s).  The sandwich only constrains R on
the transverse subspace ker DP; the unconstrained component is fixed by a
weak penalty on DP R DP^T, chosen weak deliberately: a hard kernel pin
selects a gauge whose Fourier coefficients decay slowly, while the soft
one lets the solver pick a smooth representative (same gains, same
residual).  R is represented by a truncated trigonometric series and the
collocated residual is driven to zero by Gauss-Newton; the residual is
quadratic in R, so each step is a linear least-squares solve.

The feedback is v = K(s) x_perp with K = -Gamma^{-1} B_perp^T R.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.linalg import LinAlgError
from scipy.integrate import solve_ivp
from scipy.linalg import null_space

from .errors import (
    NoCertificateError,
    PsdFloorError,
    VerificationFailedError,
)
from .orbit import TWO_PI, wrap_phase


def _sym_pairs(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def _elementary_sym(n):
    pairs = _sym_pairs(n)
    E = np.zeros((len(pairs), n, n))
    for p, (i, j) in enumerate(pairs):
        E[p, i, j] = 1.0
        E[p, j, i] = 1.0
    return E


def _fourier_tables(s, order):
    """Rows of the basis [1, cos s, sin s, cos 2s, ...] and its derivative."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    m = np.arange(1, order + 1)
    phi = np.empty((s.size, 2 * order + 1))
    dphi = np.empty_like(phi)
    phi[:, 0] = 1.0
    dphi[:, 0] = 0.0
    arg = np.outer(s, m)
    phi[:, 1::2] = np.cos(arg)
    phi[:, 2::2] = np.sin(arg)
    dphi[:, 1::2] = -m * np.sin(arg)
    dphi[:, 2::2] = m * np.cos(arg)
    return phi, dphi


# Internal solver constants: weight of the gauge-fixing rows penalizing
# DP R DP^T, weight and slack of eigenvalue-floor penalty rows, the grid
# and tolerance of the semidefiniteness check, and the inner iteration cap.
_GAUGE_WEIGHT = 1e-3
_PSD_ROW_WEIGHT = 10.0
_PSD_SLACK = 1e-4
_CHECK_GRID = 1024
_EIG_TOL = 1e-8
_GN_MAX_ITER = 40


@dataclass
class SolverConfig:
    """Weights and numerical knobs for the projected Riccati solve.

    Q and Gamma left as None default to the identity and 0.1 times the
    identity, sized from the transverse system at solve time.
    """

    Q: np.ndarray = None
    Gamma: np.ndarray = None
    kappa: float = 0.1
    fourier_order: int = 40
    collocation_points: int = 0  # 0 means 4 * fourier_order + 1
    psd_margin: float = 0.0
    residual_tol: float = 2e-4
    max_outer_iterations: int = 8

    def __post_init__(self):
        if self.Q is not None:
            self.Q = np.asarray(self.Q, dtype=float)
            if not np.allclose(self.Q, self.Q.T):
                raise ValueError("Q must be symmetric")
            if np.linalg.eigvalsh(self.Q).min() <= 0.0:
                raise ValueError("Q must be positive definite")
        if self.Gamma is not None:
            self.Gamma = np.asarray(self.Gamma, dtype=float)
            if np.linalg.eigvalsh(self.Gamma).min() <= 0.0:
                raise ValueError("Gamma must be positive definite")
        if self.kappa < 0.0:
            raise ValueError("kappa must be nonnegative")
        if self.psd_margin < 0.0:
            raise ValueError("psd_margin must be nonnegative")
        if self.collocation_points == 0:
            self.collocation_points = 4 * self.fourier_order + 1
        if self.collocation_points < 2 * self.fourier_order + 1:
            raise ValueError("collocation grid under-determines the series")

    def resolved_weights(self, n, n_u):
        Q = np.eye(n) if self.Q is None else self.Q
        Gamma = 0.1 * np.eye(n_u) if self.Gamma is None else self.Gamma
        if Q.shape != (n, n):
            raise ValueError(f"Q must be {n}x{n}")
        if Gamma.shape != (n_u, n_u):
            raise ValueError(f"Gamma must be {n_u}x{n_u}")
        return Q, Gamma


@dataclass
class GainSchedule:
    """Periodic Riccati solution R(s) and the induced feedback gains."""

    coef: np.ndarray  # (n_sym, 2 * order + 1) entry-wise trig coefficients
    fourier_order: int
    n: int
    Q: np.ndarray
    Gamma: np.ndarray
    kappa: float
    tv: object = None
    residual_profile: np.ndarray = None  # nodal Frobenius residuals
    multipliers: np.ndarray = None  # closed-loop Floquet spectrum
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self._pairs = _sym_pairs(self.n)
        self._Ginv = np.linalg.inv(self.Gamma)

    def _assemble(self, entries):
        R = np.zeros((self.n, self.n))
        for p, (i, j) in enumerate(self._pairs):
            R[i, j] = entries[p]
            R[j, i] = entries[p]
        return R

    def R(self, s):
        phi, _ = _fourier_tables(wrap_phase(s), self.fourier_order)
        return self._assemble(self.coef @ phi[0])

    def Rprime(self, s):
        _, dphi = _fourier_tables(wrap_phase(s), self.fourier_order)
        return self._assemble(self.coef @ dphi[0])

    def K(self, s):
        """Feedback gain K(s) = -Gamma^{-1} B_perp(s)^T R(s)."""
        return -self._Ginv @ self.tv.B(s).T @ self.R(s)

    def feedback(self, s, x_perp):
        return self.K(s) @ x_perp

    def value(self, s, x_perp):
        """Quadratic certificate V = x_perp^T R(s) x_perp."""
        return float(x_perp @ self.R(s) @ x_perp)


def pre_residual(tv, schedule, cfg, s):
    """Residual matrix of the projected Riccati equation at one phase.

    Evaluates Omega^T [R' rho + A^T R + R A + Q + kappa R - R S R] Omega
    for the candidate schedule, with weights taken from cfg (anything
    exposing Q, Gamma, kappa); R' comes from exact differentiation of the
    trigonometric series.
    """
    R = schedule.R(s)
    Rp = schedule.Rprime(s)
    A = tv.A(s)
    B = tv.B(s)
    Om = tv.Omega(s)
    S = B @ np.linalg.solve(cfg.Gamma, B.T)
    core = (
        Rp * tv.rho(s)
        + A.T @ R
        + R @ A
        + cfg.Q
        + cfg.kappa * R
        - R @ S @ R
    )
    return Om.T @ core @ Om


def projected_residual(tv, gains, s):
    """pre_residual with the weights the schedule was solved under."""
    return pre_residual(tv, gains, gains, s)


def _node_data(tv, s_nodes, Gamma):
    A = np.stack([tv.A(s) for s in s_nodes])
    B = np.stack([tv.B(s) for s in s_nodes])
    Om = np.stack([tv.Omega(s) for s in s_nodes])
    DP = np.stack([tv.DP(s) for s in s_nodes])
    rho = np.array([tv.rho(s) for s in s_nodes])
    Ginv = np.linalg.inv(Gamma)
    S = np.einsum("mij,jk,mlk->mil", B, Ginv, B)
    return A, B, Om, DP, rho, S


def _transported_kernel_bases(tv, s_grid):
    """Smooth orthonormal bases of ker DP(s) along an ascending grid.

    Each basis is the previous one projected onto the next kernel and
    re-orthonormalized, which keeps the frame continuous; the loop closes
    only up to an orthogonal holonomy factor, handled by the caller.
    """
    n = tv.n
    bases = []
    P = null_space(tv.DP(s_grid[0])[None, :])
    bases.append(P)
    for s in s_grid[1:]:
        d = tv.DP(s)
        nrm = np.linalg.norm(d)
        if nrm == 0.0:  # degenerate projector: the kernel is everything
            bases.append(P)
            continue
        nd = d / nrm
        Pc = (np.eye(n) - np.outer(nd, nd)) @ P
        Qf, Rf = np.linalg.qr(Pc)
        Qf = Qf * np.sign(np.diag(Rf))
        P = Qf
        bases.append(P)
    return bases


def reduced_backward_sweep(tv, Q, Gamma, kappa, march=1024, loops=12,
                           seed=None, rel_stop=1e-10):
    """Periodic Riccati solution by backward integration on ker DP.

    The stabilizing periodic solution is the backward-time attractor of the
    Riccati flow, so integrating the reduced equation (in a transported
    basis, with the frame-rotation connection included) over a few periods
    converges from any PSD seed.  Returns (s_grid, lifted) with the lifted
    solutions P R_y P^T on the ascending phase grid.
    """
    n = tv.n
    h = TWO_PI / march
    s_half = np.arange(2 * march + 1) * (0.5 * h)  # ascending, step h/2
    bases = _transported_kernel_bases(tv, s_half)
    Ginv = np.linalg.inv(Gamma)

    A_red, S_red, Q_red, rho_tab = [], [], [], []
    for k, s in enumerate(s_half):
        P = bases[k]
        # Central-difference connection of the transported frame.
        if 0 < k < len(s_half) - 1:
            dP = (bases[k + 1] - bases[k - 1]) / h
        elif k == 0:
            dP = (bases[1] - bases[0]) / (0.5 * h)
        else:
            dP = (bases[-1] - bases[-2]) / (0.5 * h)
        rho = tv.rho(s)
        A_red.append(P.T @ tv.A(s) @ P - rho * (P.T @ dP))
        Br = P.T @ tv.B(s)
        S_red.append(Br @ Ginv @ Br.T)
        Q_red.append(P.T @ Q @ P)
        rho_tab.append(rho)

    holonomy = bases[-1].T @ bases[0]

    def rate(k, Ry):
        # dR_y/ds at half-grid index k; backward marching handles the sign.
        core = (
            A_red[k].T @ Ry
            + Ry @ A_red[k]
            + Q_red[k]
            + kappa * Ry
            - Ry @ S_red[k] @ Ry
        )
        return -core / rho_tab[k]

    Ry = (
        np.asarray(seed, dtype=float)
        if seed is not None
        else bases[-1].T @ Q @ bases[-1]
    )
    snapshot = None
    for loop in range(loops):
        Ry = holonomy @ Ry @ holonomy.T  # re-enter at s = 2*pi
        trace = [Ry]
        for j in range(march, 0, -1):  # march s downward
            k2, k1, k0 = 2 * j, 2 * j - 1, 2 * j - 2
            k1v = rate(k2, Ry)
            k2v = rate(k1, Ry - 0.5 * h * k1v)
            k3v = rate(k1, Ry - 0.5 * h * k2v)
            k4v = rate(k0, Ry - h * k3v)
            Ry = Ry - (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
            Ry = 0.5 * (Ry + Ry.T)
            trace.append(Ry)
        if snapshot is not None:
            num = np.abs(Ry - snapshot).max()
            if num <= rel_stop * max(1.0, np.abs(Ry).max()):
                break
        snapshot = Ry
    else:
        pass  # use the last sweep even without tight loop closure

    # trace[j] is R_y at s = 2*pi - j*h; lift on the ascending node grid.
    s_nodes = np.arange(march) * h
    lifted = np.empty((march, n, n))
    for i in range(march):
        P = bases[2 * i]
        lifted[i] = P @ trace[march - i] @ P.T
    return s_nodes, lifted


def _init_from_backward_sweep(tv, Q, Gamma, kappa, order, march=1024):
    s_grid, lifted = reduced_backward_sweep(
        tv, Q, Gamma, kappa, march=march
    )
    pairs = _sym_pairs(tv.n)
    rows = lifted[:, [i for (i, _) in pairs], [j for (_, j) in pairs]]
    phi, _ = _fourier_tables(s_grid, order)
    sol, *_ = np.linalg.lstsq(phi, rows, rcond=None)
    return sol.T  # (n_sym, modes)


def _quad_row(v, pairs):
    """Coefficients mapping symmetric entries to the form v^T R v."""
    return np.array([(2.0 - (i == j)) * v[i] * v[j] for (i, j) in pairs])


def solve_projected_riccati(tv, cfg=None):
    """Solve the projected periodic Riccati equation for a gain schedule.

    Gauss-Newton over the Fourier coefficients of symmetric R(s), least
    squares per step, with three kinds of rows: the Omega-sandwiched
    residual at the collocation nodes, a weak gauge-fixing penalty on
    DP R DP^T (the kernel component the sandwich never constrains), and
    eigenvalue-floor penalty rows added by an outer active-set loop
    wherever R(s) dips below the semidefiniteness margin.

    Raises NoCertificateError when the collocated residual cannot be
    driven below the tolerance, PsdFloorError when R(s) cannot be kept
    positive semidefinite, and VerificationFailedError when the closed
    loop fails the post-solve Floquet check.
    """
    if cfg is None:
        cfg = SolverConfig()
    n, n_u = tv.n, tv.n_u
    Q, Gamma = cfg.resolved_weights(n, n_u)
    kappa = cfg.kappa
    pairs = _sym_pairs(n)
    n_sym = len(pairs)
    elem = _elementary_sym(n)
    I = [i for (i, _) in pairs]
    J = [j for (_, j) in pairs]
    wv = np.array([1.0 if i == j else np.sqrt(2.0) for (i, j) in pairs])

    order = cfg.fourier_order
    M = cfg.collocation_points
    modes = 2 * order + 1
    s_nodes = np.linspace(0.0, TWO_PI, M, endpoint=False)
    phi, dphi = _fourier_tables(s_nodes, order)
    A, B, Om, DP, rho, S = _node_data(tv, s_nodes, Gamma)

    # Theta-independent pieces of the Jacobian.
    WU = np.einsum("mji,pjk,mkl->mpil", Om, elem, Om)
    WU_vec = WU[:, :, I, J] * wv  # (M, n_sym, n_sym)
    # Weak gauge rows penalize the kernel column R DP^T.  The scalar
    # sandwich DP R DP^T alone leaves rank-one drift directions that are
    # nearly free at finite order, and the iterate wanders indefinite.
    ED = np.einsum("pij,mj->mpi", elem, DP)  # (M, n_sym, n)
    J_gauge = _GAUGE_WEIGHT * np.einsum("mpi,mk->mipk", ED, phi)
    J_gauge = J_gauge.reshape(M * n, n_sym * modes)

    def assemble(theta):
        entries = phi @ theta.T  # (M, n_sym)
        dentries = dphi @ theta.T
        R = np.einsum("mp,pij->mij", entries, elem)
        Rp = np.einsum("mp,pij->mij", dentries, elem)
        return R, Rp

    # Penalty rows are (phi_row, quad_vec, target, weight): the residual
    # contribution is w * (quad_vec . entries(phase) - target).
    def residual_full(theta, psd_rows):
        R, Rp = assemble(theta)
        AtR = np.einsum("mji,mjk->mik", A, R)
        SR = np.einsum("mij,mjk->mik", S, R)
        RSR = np.einsum("mij,mjk->mik", R, SR)
        core = (
            Rp * rho[:, None, None]
            + AtR
            + AtR.transpose(0, 2, 1)
            + Q[None]
            + kappa * R
            - RSR
        )
        Res = np.einsum("mji,mjk,mkl->mil", Om, core, Om)
        main = (Res[:, I, J] * wv).ravel()
        ker = _GAUGE_WEIGHT * np.einsum("mij,mj->mi", R, DP).ravel()
        parts = [main, ker]
        for phi_row, quad_vec, target, w in psd_rows:
            parts.append(
                np.atleast_1d(w * (quad_vec @ (theta @ phi_row) - target))
            )
        fro = np.sqrt((Res[:, I, J] ** 2 * wv**2).sum(axis=1))
        return np.concatenate(parts), fro, R, SR

    def jacobian(R, SR, psd_rows):
        Atil = A - SR  # closed-loop coefficient A - S R of the GN model
        tmp = (
            np.einsum("mji,pjk->mpik", Atil, elem)
            + np.einsum("pij,mjk->mpik", elem, Atil)
            + kappa * elem[None]
        )
        WT = np.einsum("mji,mpjk,mkl->mpil", Om, tmp, Om)
        WT_vec = WT[:, :, I, J] * wv
        J1 = np.einsum("mpr,mk->mrpk", WT_vec, phi)
        J2 = np.einsum("mpr,mk->mrpk", WU_vec, dphi * rho[:, None])
        J_main = (J1 + J2).reshape(M * n_sym, n_sym * modes)
        blocks = [J_main, J_gauge]
        for phi_row, quad_vec, target, w in psd_rows:
            blocks.append(
                (w * np.outer(quad_vec, phi_row)).reshape(1, n_sym * modes)
            )
        return np.vstack(blocks)

    s_check = np.linspace(0.0, TWO_PI, _CHECK_GRID, endpoint=False)
    phi_check, _ = _fourier_tables(s_check, order)
    d_check = np.stack([tv.DP(s) for s in s_check])
    # Series fit of the dd^T entries: the direction along which R can be
    # shifted without touching the projected residual (the Omega sandwich
    # annihilates dd^T together with its derivative).
    lift_fit, *_ = np.linalg.lstsq(
        phi_check, d_check[:, I] * d_check[:, J], rcond=None
    )
    lift_coef = lift_fit.T  # (n_sym, modes)

    def eigen_floor(theta):
        """Worst eigenvalue violations of R(s) on the dense check grid."""
        entries_c = phi_check @ theta.T
        floor = cfg.psd_margin - _EIG_TOL
        viol, eig_min = [], np.inf
        for m in range(_CHECK_GRID):
            Rm = np.zeros((n, n))
            Rm[I, J] = entries_c[m]
            Rm[J, I] = entries_c[m]
            w_eig, v_eig = np.linalg.eigh(Rm)
            eig_min = min(eig_min, w_eig[0])
            if w_eig[0] < floor:
                viol.append((m, w_eig[0], v_eig[:, 0]))
        viol.sort(key=lambda t: t[1])
        return viol, eig_min

    def run_gn(theta, psd_rows):
        r, fro, R, SR = residual_full(theta, psd_rows)
        prev = np.inf
        for it in range(_GN_MAX_ITER):
            worst = fro.max()
            history.append(worst)
            # Converged, or improvement has flattened out.
            if worst <= 1e-6 or worst > 0.998 * prev:
                break
            prev = worst
            Jm = jacobian(R, SR, psd_rows)
            step, *_ = np.linalg.lstsq(Jm, -r, rcond=None)
            scale = 1.0
            for _ in range(6):
                trial = theta + scale * step.reshape(n_sym, modes)
                r_t, fro_t, R_t, SR_t = residual_full(trial, psd_rows)
                if (
                    np.linalg.norm(r_t) < np.linalg.norm(r)
                    or fro_t.max() < worst
                ):
                    theta, r, fro, R, SR = trial, r_t, fro_t, R_t, SR_t
                    break
                scale *= 0.5
            else:
                break  # no direction of improvement
        return theta

    theta = _init_from_backward_sweep(tv, Q, Gamma, kappa, order)
    psd_rows = []
    history = []
    lift_total = 0.0
    theta = run_gn(theta, psd_rows)

    target = cfg.psd_margin + _PSD_SLACK
    eig_min = np.inf
    for outer in range(cfg.max_outer_iterations):
        viol, eig_min = eigen_floor(theta)
        if not viol:
            break
        # Violations whose eigenvector sees the kernel direction are
        # cleared by shifting along mu dd^T (free of residual cost, and
        # every eigenvalue is nondecreasing in mu); the rest become
        # penalty rows for a constrained re-solve.
        mu = 0.0
        hard = []
        for m, w0, v in viol:
            d = d_check[m]
            proj = float(d @ v) ** 2
            if proj > 1e-6 * float(d @ d):
                mu = max(mu, (target - w0) / proj)
            else:
                hard.append((m, w0, v))
        if mu > 0.0:
            theta = theta + (1.5 * mu) * lift_coef
            lift_total += 1.5 * mu
        if hard:
            for m, _, v in hard[:8]:
                psd_rows.append(
                    (
                        phi_check[m],
                        _quad_row(v, pairs),
                        target,
                        _PSD_ROW_WEIGHT,
                    )
                )
            theta = run_gn(theta, psd_rows)
    else:
        # Rounds exhausted: tolerate a hairline residual violation of the
        # floor but reject anything beyond the hard margin.
        viol, eig_min = eigen_floor(theta)
        if eig_min < cfg.psd_margin - 1e-6:
            raise PsdFloorError(
                f"R(s) eigenvalue floor {eig_min:.3e} below margin "
                f"{cfg.psd_margin:.1e} after "
                f"{cfg.max_outer_iterations} outer rounds"
            )

    r, fro, R, SR = residual_full(theta, psd_rows)
    if fro.max() > cfg.residual_tol:
        raise NoCertificateError(
            "projected Riccati residual stagnated at "
            f"{fro.max():.3e} (tolerance {cfg.residual_tol:.1e})"
        )

    gains = GainSchedule(
        coef=theta,
        fourier_order=order,
        n=n,
        Q=Q,
        Gamma=Gamma,
        kappa=kappa,
        tv=tv,
        residual_profile=fro.copy(),
    )

    # Post-solve verification: every transverse multiplier of the closed
    # loop must sit strictly inside the unit circle.  The neutral phase
    # direction (when the system has one) is identified by its eigenvector
    # and excluded from the stability decision.
    flo = floquet_multipliers(tv, gains)
    gains.multipliers = flo.multipliers
    tangent = tv.xs_prime(0.0)
    moduli = np.abs(flo.multipliers)
    if np.linalg.norm(tangent) > 0.0:
        idx, _, _ = flo.neutral(tangent)
        transverse = np.delete(moduli, idx)
    else:
        transverse = moduli
    if transverse.size and transverse.max() >= 1.0:
        raise VerificationFailedError(
            "closed-loop transverse multiplier with modulus "
            f"{transverse.max():.6f} >= 1"
        )

    gains.diagnostics = {
        "iterations": len(history),
        "residual_node_max": float(fro.max()),
        "history": [float(h) for h in history],
        "psd_penalty_rows": len(psd_rows),
        "gauge_lift": float(lift_total),
        "eigenvalue_floor": float(eig_min),
        "transverse_moduli": [float(m) for m in np.sort(transverse)[::-1]],
    }
    return gains


@dataclass
class FloquetResult:
    """Monodromy spectrum of a periodic linear system."""

    multipliers: np.ndarray
    eigenvectors: np.ndarray
    monodromy: np.ndarray

    def neutral(self, tangent):
        """Index, multiplier and alignment angle of the unit multiplier.

        The angle is measured between the matched eigenvector and the
        given tangent direction, insensitive to complex scaling.
        """
        idx = int(np.argmin(np.abs(self.multipliers - 1.0)))
        v = self.eigenvectors[:, idx]
        t = np.asarray(tangent, dtype=float)
        c = abs(np.vdot(v, t)) / (np.linalg.norm(v) * np.linalg.norm(t))
        return idx, self.multipliers[idx], float(np.arccos(min(c, 1.0)))

    def count_inside(self, tol=1e-6):
        return int(np.sum(np.abs(self.multipliers) < 1.0 - tol))


def floquet_multipliers(tv, gains=None, rtol=1e-11, atol=1e-13):
    """Characteristic multipliers of the (closed-loop) transverse system.

    Integrates the fundamental matrix of dW/ds = (A_perp - S R Omega) W / rho
    over one period; with gains omitted, the open-loop system is used.  The
    feedback term acts through the transverse projector because the
    controller only ever sees x_perp, which the projection keeps in the
    kernel of DP; without the projector, gauge content of R along the
    tangent would contaminate the neutral eigenvector.
    """
    n = tv.n

    def rhs(s, w):
        W = w.reshape(n, n)
        Acl = tv.A(s)
        if gains is not None:
            B = tv.B(s)
            S = B @ np.linalg.solve(gains.Gamma, B.T)
            Acl = Acl - S @ gains.R(s) @ tv.Omega(s)
        return ((Acl @ W) / tv.rho(s)).ravel()

    sol = solve_ivp(
        rhs,
        (0.0, TWO_PI),
        np.eye(n).ravel(),
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise NoCertificateError(
            f"monodromy integration failed: {sol.message}"
        )
    mono = sol.y[:, -1].reshape(n, n)
    lam, vec = np.linalg.eig(mono)
    order = np.argsort(-np.abs(lam))
    return FloquetResult(
        multipliers=lam[order], eigenvectors=vec[:, order], monodromy=mono
    )


def replay_floquet_multipliers(sys, orbit, fd_step=1e-7, rtol=1e-11, atol=1e-13):
    """Multipliers of the feedforward-replay system along the orbit.

    Unlike the phase-synchronized field behind ``floquet_multipliers``,
    the replay plant applies the nominal input on the nominal clock, so a
    state deviation receives no phase correction at all.  Its variational
    monodromy carries the raw instability of the motion; for an
    oscillation about an unstable equilibrium at least one multiplier
    lies outside the unit circle.
    """
    from .mechanics import forward_dynamics
    from .orbit import nominal_input

    n = 2 * sys.n_q

    def jac(s):
        xs = orbit.state(s)
        u = nominal_input(sys, orbit, s)
        scale = fd_step * (1.0 + np.linalg.norm(xs))
        J = np.empty((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = scale
            J[:, j] = (
                forward_dynamics(sys, xs + e, u)
                - forward_dynamics(sys, xs - e, u)
            ) / (2.0 * scale)
        return J

    def rhs(s, w):
        W = w.reshape(n, n)
        return ((jac(s) @ W) / orbit.profile.rho(s)).ravel()

    sol = solve_ivp(
        rhs,
        (0.0, TWO_PI),
        np.eye(n).ravel(),
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise NoCertificateError(
            f"replay monodromy integration failed: {sol.message}"
        )
    mono = sol.y[:, -1].reshape(n, n)
    lam, vec = np.linalg.eig(mono)
    order = np.argsort(-np.abs(lam))
    return FloquetResult(
        multipliers=lam[order], eigenvectors=vec[:, order], monodromy=mono
    )


def lyapunov_rate_matrix(tv, gains, s):
    """Closed form d/dt of x_perp^T R x_perp along the closed loop.

    Along solutions of the linearized closed loop the rate is the quadratic
    form x_perp^T (-Q - kappa R - R S R) x_perp.
    """
    R = gains.R(s)
    B = tv.B(s)
    S = B @ np.linalg.solve(gains.Gamma, B.T)
    return -gains.Q - gains.kappa * R - R @ S @ R


def lyapunov_rate_fd(tv, gains, s0, delta, h=1e-4, rtol=1e-11, atol=1e-13):
    """Central-difference rate of V(t) along the linearized closed loop.

    Flows (s, x_perp) jointly by ds/dt = rho, dx_perp/dt = (A - S R) x_perp
    for +-h and differences the certificate values.
    """
    n = tv.n

    def rhs(t, y):
        s, d = y[0], y[1:]
        B = tv.B(s)
        S = B @ np.linalg.solve(gains.Gamma, B.T)
        Acl = tv.A(s) - S @ gains.R(s) @ tv.Omega(s)
        return np.concatenate([[tv.rho(s)], Acl @ d])

    y0 = np.concatenate([[s0], delta])
    out = {}
    for sign in (+1.0, -1.0):
        sol = solve_ivp(
            rhs, (0.0, sign * h), y0, method="DOP853", rtol=rtol, atol=atol
        )
        y = sol.y[:, -1]
        out[sign] = gains.value(y[0], y[1:])
    return (out[1.0] - out[-1.0]) / (2.0 * h)


class ConstantCoefficientEmbedding:
    """Constant (A, B) pair dressed as periodic transverse data.

    The projector is the identity and DP is zero, so the periodic solve
    degenerates to the algebraic one; used to validate the solver against
    a known Riccati solution.
    """

    def __init__(self, A0, B0, rate=1.0):
        self._A = np.asarray(A0, dtype=float)
        self._B = np.asarray(B0, dtype=float)
        self._rate = float(rate)

    @property
    def n(self):
        return self._A.shape[0]

    @property
    def n_u(self):
        return self._B.shape[1]

    def A(self, s):
        return self._A

    def B(self, s):
        return self._B

    def Omega(self, s):
        return np.eye(self.n)

    def DP(self, s):
        return np.zeros(self.n)

    def rho(self, s):
        return self._rate

    def xs_prime(self, s):
        return np.zeros(self.n)
