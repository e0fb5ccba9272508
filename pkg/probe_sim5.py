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
x0 = np.array([0.1, 0.4, -0.1, -0.2])

for variant in ("implicit-phase", "min-distance"):
    op = make_projection(variant, orbit)
    tv = build_transverse_linearization(sys_, orbit, op)
    gains = solve_projected_riccati(tv)
    for ff in ("on-orbit", "mixed", "full"):
        cfg = SimConfig(initial_state=x0, duration=20.0, noise_std=1e-3,
                        rng_seed=20, feedforward=ff)
        try:
            tr = simulate(sys_, orbit, op, gains, cfg)
            print(f"{variant:15s} {ff:9s}  conv = {tr.convergence_time}  "
                  f"max = {tr.norm_x_perp.max():.3e}  final = {tr.norm_x_perp[-1]:.3e}")
        except (EscapedTubeError, NumericBlowupError) as e:
            print(f"{variant:15s} {ff:9s}  FAILED: {type(e).__name__}: {e}")
