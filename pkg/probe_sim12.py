import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import solve_projected_riccati, SolverConfig
from orbistab.simulation import SimConfig, simulate
from orbistab.errors import (
    EscapedTubeError,
    NumericBlowupError,
    NoCertificateError,
    PsdFloorError,
    VerificationFailedError,
)

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
x0 = np.array([0.1, 0.4, -0.1, -0.2])

designs = [
    ("G=1", np.eye(4), 1.0, 0.1),
    ("G=10", np.eye(4), 10.0, 0.1),
    ("G=100", np.eye(4), 100.0, 0.1),
    ("Qsoftcart G=0.1", np.diag([0.1, 10.0, 0.1, 1.0]), 0.1, 0.1),
    ("Qsoftcart G=1", np.diag([0.1, 10.0, 0.1, 1.0]), 1.0, 0.1),
    ("Qsoftcart2 G=1", np.diag([0.01, 1.0, 0.01, 0.1]), 1.0, 0.1),
    ("G=1 k=0", np.eye(4), 1.0, 0.0),
]

for name, Q, gam, kap in designs:
    cfg_r = SolverConfig(Q=Q, Gamma=gam * np.eye(1), kappa=kap)
    try:
        g = solve_projected_riccati(tv, cfg_r)
    except (NoCertificateError, PsdFloorError, VerificationFailedError) as e:
        print(f"{name:18s}  solve failed: {type(e).__name__}: {e}")
        continue
    Ks = [np.linalg.norm(g.K(s)) for s in np.linspace(0, 2 * np.pi, 64)]
    cfg = SimConfig(initial_state=x0, duration=30.0, noise_std=0.0)
    try:
        tr = simulate(sys_, orbit, op, g, cfg)
        out = f"conv={tr.convergence_time}  final={tr.norm_x_perp[-1]:.1e}"
    except (EscapedTubeError, NumericBlowupError) as e:
        out = f"diverged ({type(e).__name__})"
    print(f"{name:18s}  res={g.diagnostics['residual_node_max']:.1e}  "
          f"|K| [{min(Ks):.1f},{max(Ks):.1f}]  "
          f"mod2={np.abs(g.multipliers)[1]:.3f}  {out}")
