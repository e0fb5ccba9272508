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


def captures(lam):
    cfg = SimConfig(initial_state=lam * x0, duration=20.0, noise_std=0.0,
                    controller="closed-loop", feedforward="mixed")
    try:
        tr = simulate(sys_, orbit, op, gains, cfg)
    except (EscapedTubeError, NumericBlowupError):
        return False
    return tr.convergence_time is not None


lo, hi = 0.4, 1.0
assert captures(lo), "lo fails"
assert not captures(hi), "hi works"
for _ in range(5):
    mid = 0.5 * (lo + hi)
    if captures(mid):
        lo = mid
    else:
        hi = mid
    print(f"edge in ({lo:.4f}, {hi:.4f})")
