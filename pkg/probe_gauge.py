"""Probe: properties of the unpinned order-40 solution; frozen-ARE init."""

import numpy as np
from scipy.linalg import null_space, solve_continuous_are

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import TWO_PI, plan_orbit, upright_oscillation_curve
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import _fourier_tables, _sym_pairs
from probe_order40 import gn_floor, Q, Gam, kappa

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op, feedforward="mixed",
                                    grid=512)

pairs = _sym_pairs(4)
I = [i for (i, _) in pairs]
J = [j for (_, j) in pairs]
wv = np.array([1.0 if i == j else np.sqrt(2.0) for (i, j) in pairs])


def dense_report(tag, theta, order, grid=2048):
    s_dense = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    phi, dphi = _fourier_tables(s_dense, order)
    entries = phi @ theta.T
    dentries = dphi @ theta.T
    Ginv = np.linalg.inv(Gam)
    fro = np.empty(grid)
    eigmin = np.empty(grid)
    eigmax = np.empty(grid)
    dRd = np.empty(grid)
    for m, s in enumerate(s_dense):
        R = np.zeros((4, 4))
        R[I, J] = entries[m]
        R[J, I] = entries[m]
        Rp = np.zeros((4, 4))
        Rp[I, J] = dentries[m]
        Rp[J, I] = dentries[m]
        A = tv.A(s)
        B = tv.B(s)
        Om = tv.Omega(s)
        S = B @ Ginv @ B.T
        core = (Rp * tv.rho(s) + A.T @ R + R @ A + Q + kappa * R
                - R @ S @ R)
        res = Om.T @ core @ Om
        fro[m] = np.linalg.norm(res, "fro")
        w = np.linalg.eigvalsh(R)
        eigmin[m] = w[0]
        eigmax[m] = w[-1]
        d = tv.DP(s)
        dRd[m] = d @ R @ d
    amp = np.abs(theta[:, 1:]).reshape(4 * (4 + 1) // 2 * 1, -1)
    ho = np.abs(theta).max(axis=0)
    tail = max(np.abs(theta[:, 2 * k - 1:2 * k + 1]).max()
               for k in range(36, theta.shape[1] // 2 + 1))
    print(f"[{tag}] dense fro max {fro.max():.3e}  |R|max {eigmax.max():.1f}"
          f"  eigmin {eigmin.min():.3e}  dRd [{dRd.min():.2e},{dRd.max():.2e}]"
          f"  top-order coef {tail:.2e}", flush=True)
    return fro, eigmin


def frozen_are_init(order, march=1024):
    s_nodes = np.arange(march) * (TWO_PI / march)
    rows = np.empty((march, len(pairs)))
    lifted = np.empty((march, 4, 4))
    bad = 0
    for m, s in enumerate(s_nodes):
        d = tv.DP(s)
        P = null_space(d[None, :])
        A_red = P.T @ tv.A(s) @ P + 0.5 * kappa * np.eye(3)
        B_red = P.T @ tv.B(s)
        Q_red = P.T @ Q @ P
        try:
            X = solve_continuous_are(A_red, B_red, Q_red, Gam)
        except Exception:
            X = np.zeros((3, 3))
            bad += 1
        lifted[m] = P @ X @ P.T
    norms = np.linalg.norm(lifted.reshape(march, -1), axis=1)
    med = np.median(norms)
    keep = norms <= 50.0 * med
    rows = lifted[:, I, J]
    phi, _ = _fourier_tables(s_nodes[keep], order)
    sol, *_ = np.linalg.lstsq(phi, rows[keep], rcond=None)
    print(f"[frozen-are] {bad} ARE failures, {np.sum(~keep)} outliers dropped,"
          f" median |R| {med:.2f}, max kept {norms[keep].max():.2f}",
          flush=True)
    return sol.T


if __name__ == "__main__":
    theta_free, floor_free = gn_floor(tv, 40, 0.0)
    print(f"[gn kw=0 sweep-init] node-max {floor_free:.3e}", flush=True)
    dense_report("kw=0 sweep-init", theta_free, 40)

    theta0 = frozen_are_init(40)
    theta_fa, floor_fa = gn_floor(tv, 40, 0.0, theta0=theta0)
    print(f"[gn kw=0 frozen-are-init] node-max {floor_fa:.3e}", flush=True)
    dense_report("kw=0 frozen-are", theta_fa, 40)

    for kw in (1e-3, 1e-2, 1e-1):
        th, fl = gn_floor(tv, 40, kw)
        print(f"[gn kw={kw:g} sweep-init] node-max {fl:.3e}", flush=True)
        dense_report(f"kw={kw:g}", th, 40)
