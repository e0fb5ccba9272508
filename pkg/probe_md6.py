import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import SolverConfig, solve_projected_riccati
from orbistab.simulation import SimConfig, simulate

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("min-distance", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
gains = solve_projected_riccati(
    tv,
    SolverConfig(Q=np.eye(4), Gamma=np.array([[0.1]]), kappa=0.1,
                 fourier_order=60),
)

T = orbit.profile.period
d = np.array([0.1, 0.4, -0.1, -0.2])
d /= np.linalg.norm(d)

for eps in (1e-6, 1e-4, 1e-3):
    cfg = SimConfig(
        initial_state=orbit.state(0.0) + eps * d,
        duration=3 * T,
        noise_std=0.0,
        controller="closed-loop",
        feedforward="mixed",
    )
    tr = simulate(sys_, orbit, op, gains, cfg)
    n = tr.norm_x_perp
    s = tr.s
    ds = np.diff(s)
    # largest backward phase jump and largest one-sample growth factor
    grow = n[1:] / np.maximum(n[:-1], 1e-300)
    k = int(np.argmax(grow))
    print(f"eps={eps:.0e}: n0={n[0]:.3e} nT={n[int(T/0.01)]:.3e} "
          f"n3T={n[-1]:.3e}")
    print(f"  worst sample growth {grow[k]:.3f} at t={tr.t[k]:.3f} "
          f"(s={s[k]:.4f}, n={n[k]:.3e}, u={tr.u[k]})")
    print(f"  min ds={ds.min():.3e} at t={tr.t[int(np.argmin(ds))]:.3f}; "
          f"max ds={ds.max():.3e}")
    j = int(np.argmax(np.abs(tr.u[:, 0])))
    print(f"  max|u|={np.abs(tr.u[:,0]).max():.3e} at t={tr.t[j]:.3f} "
          f"s={s[j]:.4f}")
