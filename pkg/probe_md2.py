import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import solve_projected_riccati, SolverConfig
from orbistab.simulation import SimConfig, simulate
from orbistab.errors import EscapedTubeError, NumericBlowupError

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("min-distance", orbit)
tv = build_transverse_linearization(sys_, orbit, op)

for s in (0.0, 1.0, 2.5, 4.0):
    print(f"s={s}: tv.DP={np.round(tv.DP(s), 4)}  op.dP={np.round(op.dP_on_orbit(s), 4)}")

gains = solve_projected_riccati(tv, SolverConfig(fourier_order=60))
T = orbit.profile.period
print("moduli", np.round(np.abs(gains.multipliers), 5))

rng = np.random.default_rng(5)
x0 = orbit.state(1.0) + 1e-3 * rng.standard_normal(4)
cfg = SimConfig(initial_state=x0, duration=5 * T, noise_std=0.0, sample_interval=T / 2)
tr = simulate(sys_, orbit, op, gains, cfg)
ratios = tr.norm_x_perp[2::2] / tr.norm_x_perp[:-2:2]
print("contraction per period:", " ".join(f"{r:.4f}" for r in ratios))

base = np.array([0.1, 0.4, -0.1, -0.2])
for lam in (0.7, 0.85, 1.0):
    cfg = SimConfig(initial_state=lam * base, duration=30.0, noise_std=0.0)
    try:
        tr = simulate(sys_, orbit, op, gains, cfg)
        print(f"md/md lam={lam}: conv={tr.convergence_time}  final={tr.norm_x_perp[-1]:.1e}")
    except (EscapedTubeError, NumericBlowupError) as e:
        print(f"md/md lam={lam}: FAILED {type(e).__name__}")
