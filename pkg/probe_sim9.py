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


def ok(lam, ff):
    cfg = SimConfig(initial_state=lam * base, duration=30.0, noise_std=0.0,
                    feedforward=ff)
    try:
        tr = simulate(sys_, orbit, op, gains, cfg)
        return tr.convergence_time is not None
    except (EscapedTubeError, NumericBlowupError):
        return False


for ff in ("on-orbit", "mixed", "full"):
    lo, hi = 0.5, 1.0
    if ok(hi, ff):
        print(f"{ff}: captures at lam=1")
        continue
    for _ in range(6):
        mid = 0.5 * (lo + hi)
        if ok(mid, ff):
            lo = mid
        else:
            hi = mid
    print(f"{ff}: basin edge in ({lo:.3f}, {hi:.3f})")
