"""Probe: order-40 residual floor vs feedforward choice and kernel gauge."""

import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import TWO_PI, plan_orbit, upright_oscillation_curve
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
import orbistab.riccati as ric
from orbistab.riccati import (
    SolverConfig,
    _elementary_sym,
    _fourier_tables,
    _init_from_backward_sweep,
    _node_data,
    _sym_pairs,
    reduced_backward_sweep,
)

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)

Q = np.eye(4)
Gam = np.array([[0.1]])
kappa = 0.1


def harmonic_profile(tv, march=2048):
    s_grid, lifted = reduced_backward_sweep(tv, Q, Gam, kappa, march=march)
    pairs = _sym_pairs(4)
    rows = lifted[:, [i for (i, _) in pairs], [j for (_, j) in pairs]]
    F = np.abs(np.fft.rfft(rows, axis=0)) / march
    amp = F.max(axis=1)
    return amp


def gn_floor(tv, order, kernel_weight, theta0=None, max_iter=60):
    cfg = SolverConfig(Q=Q, Gamma=Gam, kappa=kappa, fourier_order=order)
    n = tv.n
    pairs = _sym_pairs(n)
    n_sym = len(pairs)
    elem = _elementary_sym(n)
    I = [i for (i, _) in pairs]
    J = [j for (_, j) in pairs]
    wv = np.array([1.0 if i == j else np.sqrt(2.0) for (i, j) in pairs])
    M = cfg.collocation
    modes = 2 * order + 1
    s_nodes = np.linspace(0.0, TWO_PI, M, endpoint=False)
    phi, dphi = _fourier_tables(s_nodes, order)
    A, B, Om, DP, rho, S = _node_data(tv, s_nodes, Gam)

    WU = np.einsum("mji,pjk,mkl->mpil", Om, elem, Om)
    WU_vec = WU[:, :, I, J] * wv
    ED = np.einsum("pij,mj->mpi", elem, DP)
    J_ker = kernel_weight * np.einsum("mpi,mk->mipk", ED, phi)
    J_ker = J_ker.reshape(M * n, n_sym * modes)

    def residual_full(theta):
        entries = phi @ theta.T
        dentries = dphi @ theta.T
        R = np.einsum("mp,pij->mij", entries, elem)
        Rp = np.einsum("mp,pij->mij", dentries, elem)
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
        ker = kernel_weight * np.einsum("mij,mj->mi", R, DP).ravel()
        fro = np.sqrt((Res[:, I, J] ** 2 * wv**2).sum(axis=1))
        return np.concatenate([main, ker]), fro, R, SR

    def jacobian(R, SR):
        Atil = A - SR
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
        return np.vstack([J_main, J_ker])

    theta = (
        theta0.copy()
        if theta0 is not None
        else _init_from_backward_sweep(tv, cfg, order)
    )
    r, fro, R, SR = residual_full(theta)
    prev = np.inf
    for it in range(max_iter):
        worst = fro.max()
        if worst <= 1e-10 or worst > 0.9995 * prev:
            break
        prev = worst
        Jm = jacobian(R, SR)
        step, *_ = np.linalg.lstsq(Jm, -r, rcond=None)
        scale = 1.0
        for _ in range(8):
            trial = theta + scale * step.reshape(n_sym, modes)
            r_t, fro_t, R_t, SR_t = residual_full(trial)
            if np.linalg.norm(r_t) < np.linalg.norm(r) or fro_t.max() < worst:
                theta, r, fro, R, SR = trial, r_t, fro_t, R_t, SR_t
                break
            scale *= 0.5
        else:
            break
    return theta, fro.max()


if __name__ == "__main__":
    for ff in ("mixed", "on-orbit", "full"):
        tv = build_transverse_linearization(
            sys_, orbit, op, feedforward=ff, grid=512
        )
        amp = harmonic_profile(tv)
        picks = [10, 20, 30, 40, 50, 60]
        line = " ".join(f"h{k}={amp[k]:.2e}" for k in picks)
        print(f"[sweep {ff:9s}] {line}", flush=True)

    tv = build_transverse_linearization(
        sys_, orbit, op, feedforward="mixed", grid=512
    )
    theta_pin, floor_pin = gn_floor(tv, 40, 1.0)
    print(f"[gn mixed  kw=1] node-max residual {floor_pin:.3e}", flush=True)
    theta_free, floor_free = gn_floor(tv, 40, 0.0, theta0=theta_pin)
    print(f"[gn mixed  kw=0] node-max residual {floor_free:.3e}", flush=True)
    theta_f2, floor_f2 = gn_floor(tv, 40, 0.0)
    print(f"[gn mixed  kw=0 from sweep] node-max residual {floor_f2:.3e}",
          flush=True)
