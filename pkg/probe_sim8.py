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


class OmegaGains:
    """Wrap a schedule so feedback acts on the transverse projection."""

    def __init__(self, inner, op):
        self.inner = inner
        self.op = op

    def K(self, s):
        return self.inner.K(s)

    def feedback(self, s, x_perp):
        return self.inner.K(s) @ (self.op.omega(s) @ x_perp)

    def value(self, s, x_perp):
        xo = self.op.omega(s) @ x_perp
        return float(xo @ self.inner.R(s) @ xo)


g2 = OmegaGains(gains, op)

# how big is the tangential component along the failing trajectory start?
p = op.project(x0)
dp = op.dP_on_orbit(p.s)
print(f"s0={p.s:.3f}  |xp|={np.linalg.norm(p.x_perp):.3f}  DP.xp={float(dp @ p.x_perp):+.4f}")

for ff in ("mixed", "on-orbit", "full"):
    for seed in (20, 0, 1):
        cfg = SimConfig(initial_state=x0, duration=30.0, noise_std=1e-3,
                        rng_seed=seed, feedforward=ff)
        try:
            tr = simulate(sys_, orbit, op, g2, cfg)
            print(f"Omega-fb ff={ff:9s} seed={seed:3d}  conv={tr.convergence_time}  "
                  f"max={tr.norm_x_perp.max():.2e}  final={tr.norm_x_perp[-1]:.2e}")
        except (EscapedTubeError, NumericBlowupError) as e:
            print(f"Omega-fb ff={ff:9s} seed={seed:3d}  FAILED {type(e).__name__}")
