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
for ff in ("on-orbit", "mixed", "full"):
    for std in (0.0, 1e-3):
        cfg = SimConfig(initial_state=x0, duration=20.0, noise_std=std,
                        rng_seed=0, controller="closed-loop", feedforward=ff)
        try:
            tr = simulate(sys_, orbit, op, gains, cfg)
            n = tr.norm_x_perp
            print(f"{ff:9s} std={std:g}: conv={tr.convergence_time} "
                  f"max n={n.max():.3e} final n={n[-1]:.3e}")
        except (EscapedTubeError, NumericBlowupError) as e:
            t_end = None
            if getattr(e, "partial_trace", None) is not None:
                t_end = e.partial_trace.t[-1]
            print(f"{ff:9s} std={std:g}: {type(e).__name__} t={t_end}")
