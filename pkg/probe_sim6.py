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
base = np.array([0.1, 0.4, -0.1, -0.2])


def captured(lam, ff="mixed", dur=25.0):
    cfg = SimConfig(initial_state=lam * base, duration=dur, noise_std=0.0,
                    feedforward=ff)
    try:
        tr = simulate(sys_, orbit, op, gains, cfg)
        return tr.convergence_time, tr.norm_x_perp[-1]
    except (EscapedTubeError, NumericBlowupError) as e:
        return None, type(e).__name__


for lam in (0.3, 0.5, 0.7, 0.85, 1.0):
    ct, tail = captured(lam)
    print(f"lam = {lam:5.2f}  conv = {ct}  tail/fail = {tail}")
