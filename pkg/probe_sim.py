import time

import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import solve_projected_riccati
from orbistab.simulation import SimConfig, simulate
from orbistab.errors import EscapedTubeError

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
t0 = time.time()
gains = solve_projected_riccati(tv)
print(f"riccati: {time.time() - t0:.1f} s")

# 1. on-orbit start, no noise: transverse norm should stay at integration error
x0 = orbit.state(1.0)
cfg = SimConfig(initial_state=x0, duration=20.0, noise_std=0.0)
t0 = time.time()
tr = simulate(sys_, orbit, op, gains, cfg)
print(f"on-orbit: {time.time() - t0:.1f} s  max|x_perp| = {tr.norm_x_perp.max():.3e}  records = {len(tr)}")

# 2. reference perturbed start with measurement noise
x0 = np.array([0.1, 0.4, -0.1, -0.2])
cfg = SimConfig(initial_state=x0, duration=20.0, noise_std=1e-3, rng_seed=20)
t0 = time.time()
tr2 = simulate(sys_, orbit, op, gains, cfg)
print(f"perturbed: {time.time() - t0:.1f} s  conv_time = {tr2.convergence_time}  "
      f"tail max = {tr2.norm_x_perp[-100:].max():.3e}  start norm = {tr2.norm_x_perp[0]:.3f}")

# 3. open-loop replay from the same start: should drift out
cfg = SimConfig(initial_state=x0, duration=20.0, noise_std=0.0, controller="open-loop")
try:
    tr3 = simulate(sys_, orbit, op, None, cfg)
    print(f"open-loop: max|x_perp| = {tr3.norm_x_perp.max():.3f}  exits 0.5: {bool(tr3.norm_x_perp.max() > 0.5)}")
except EscapedTubeError as e:
    pt = e.partial_trace
    print(f"open-loop escaped at t = {pt.t[-1]:.2f}  max|x_perp| = {pt.norm_x_perp.max():.3f}")

# 4. rk45 path quick check
cfg = SimConfig(initial_state=np.array([0.1, 0.4, -0.1, -0.2]), duration=6.0,
                integrator="rk45-adaptive", noise_std=0.0)
t0 = time.time()
tr4 = simulate(sys_, orbit, op, gains, cfg)
print(f"rk45: {time.time() - t0:.1f} s  final |x_perp| = {tr4.norm_x_perp[-1]:.3e}")

# 5. step-halving agreement, noise-free
cfg_a = SimConfig(initial_state=np.array([0.1, 0.4, -0.1, -0.2]), duration=4.0, step=1e-3)
cfg_b = SimConfig(initial_state=np.array([0.1, 0.4, -0.1, -0.2]), duration=4.0, step=5e-4)
tra = simulate(sys_, orbit, op, gains, cfg_a)
trb = simulate(sys_, orbit, op, gains, cfg_b)
print(f"halving: final diff = {np.abs(tra.x[-1] - trb.x[-1]).max():.3e}")

# 6. autonomy: same physical state, shifted start phase on the orbit
xa = orbit.state(0.7)
cfg = SimConfig(initial_state=xa + np.array([0.02, -0.01, 0.015, 0.01]),
                duration=1.0, noise_std=0.0)
trc = simulate(sys_, orbit, op, gains, cfg)
trd = simulate(sys_, orbit, op, gains, cfg)
print(f"determinism: u diff = {np.abs(trc.u - trd.u).max():.3e}")
print(f"u0 = {trc.u[0]}, v0 = {trc.v[0]}")
