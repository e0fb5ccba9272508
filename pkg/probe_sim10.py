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
op_ip = make_projection("implicit-phase", orbit)
op_md = make_projection("min-distance", orbit)
tv = build_transverse_linearization(sys_, orbit, op_ip)
gains = solve_projected_riccati(tv)
x0 = np.array([0.1, 0.4, -0.1, -0.2])

p = op_md.project(x0)
print(f"min-dist projection of init: s={p.s:.3f}  |xp|={np.linalg.norm(p.x_perp):.3f}")
p2 = op_ip.project(x0)
print(f"impl-phase projection of init: s={p2.s:.3f}  |xp|={np.linalg.norm(p2.x_perp):.3f}")

for ff in ("mixed", "on-orbit"):
    for lam in (0.7, 1.0):
        cfg = SimConfig(initial_state=lam * x0, duration=30.0, noise_std=0.0,
                        feedforward=ff)
        try:
            tr = simulate(sys_, orbit, op_md, gains, cfg)
            print(f"md-sim ff={ff:9s} lam={lam}  conv={tr.convergence_time}  "
                  f"max={tr.norm_x_perp.max():.2e} final={tr.norm_x_perp[-1]:.2e}")
        except (EscapedTubeError, NumericBlowupError) as e:
            print(f"md-sim ff={ff:9s} lam={lam}  FAILED {type(e).__name__}")
