import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import solve_projected_riccati
from orbistab.simulation import SimConfig, simulate
from orbistab.errors import EscapedTubeError, NumericBlowupError

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
gains = solve_projected_riccati(tv)
x0 = np.array([0.1, 0.4, -0.1, -0.2])

for ff in ("mixed", "full", "on-orbit"):
    for seed in range(12):
        cfg = SimConfig(initial_state=x0, duration=40.0, noise_std=1e-3,
                        rng_seed=seed, feedforward=ff)
        try:
            tr = simulate(sys_, orbit, op, gains, cfg)
            print(f"ff={ff:9s} seed={seed:3d}  conv={tr.convergence_time}  "
                  f"final={tr.norm_x_perp[-1]:.2e}")
        except (EscapedTubeError, NumericBlowupError) as e:
            print(f"ff={ff:9s} seed={seed:3d}  FAILED {type(e).__name__}")
