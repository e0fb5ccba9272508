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

x0 = np.array([0.1, 0.4, -0.1, -0.2])
cfg = SimConfig(initial_state=x0, duration=13.1, noise_std=1e-3, rng_seed=20)
tr = simulate(sys_, orbit, op, gains, cfg)
n = len(tr)
for k in range(n - 40, n):
    print(f"t={tr.t[k]:7.3f}  s={tr.s[k]:6.3f}  |xp|={tr.norm_x_perp[k]:9.3e}  "
          f"u={tr.u[k,0]:10.3e}  v={tr.v[k,0]:10.3e}  x={np.array2string(tr.x[k], precision=4)}")
