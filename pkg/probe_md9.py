import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import SolverConfig, solve_projected_riccati
from orbistab.simulation import SimConfig, simulate
from orbistab.errors import EscapedTubeError, NumericBlowupError

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("min-distance", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
gains = solve_projected_riccati(
    tv,
    SolverConfig(Q=np.eye(4), Gamma=np.array([[0.1]]), kappa=0.1,
                 fourier_order=60),
)

x0 = np.array([0.1, 0.4, -0.1, -0.2])
for lam in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6):
    cfg = SimConfig(initial_state=lam * x0, duration=20.0, noise_std=0.0,
                    controller="closed-loop", feedforward="mixed")
    try:
        tr = simulate(sys_, orbit, op, gains, cfg)
        n = tr.norm_x_perp
        print(f"lam={lam}: conv={tr.convergence_time} n0={n[0]:.3e} "
              f"max={n.max():.3e} final={n[-1]:.3e}")
    except (EscapedTubeError, NumericBlowupError) as e:
        pt = getattr(e, "partial_trace", None)
        t_end = pt.t[-1] if pt is not None and len(pt.t) else None
        print(f"lam={lam}: {type(e).__name__} t={t_end} msg={e}")
