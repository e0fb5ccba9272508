import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import solve_projected_riccati
from orbistab.simulation import SimConfig, simulate

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
gains = solve_projected_riccati(tv)
T = orbit.profile.period
print("period", T, "multipliers", np.abs(gains.multipliers))

rng = np.random.default_rng(3)
for eps in (1e-4, 1e-3, 1e-2, 5e-2):
    x0 = orbit.state(1.0) + eps * rng.standard_normal(4)
    cfg = SimConfig(initial_state=x0, duration=5 * T, noise_std=0.0,
                    sample_interval=T / 2)
    tr = simulate(sys_, orbit, op, gains, cfg)
    ratios = tr.norm_x_perp[2::2] / tr.norm_x_perp[:-2:2]
    print(f"eps={eps:8.1e}  |xp| per period: "
          + "  ".join(f"{v:9.3e}" for v in tr.norm_x_perp[::2])
          + "  ratios: " + " ".join(f"{r:6.3f}" for r in ratios))
