import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import SolverConfig, solve_projected_riccati
from orbistab.simulation import SimConfig, simulate

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
x0 = np.array([0.1, 0.4, -0.1, -0.2])

ref = solve_projected_riccati(
    tv, SolverConfig(Q=np.eye(4), Gamma=np.array([[0.1]]), kappa=0.1,
                     fourier_order=40))
cap = solve_projected_riccati(
    tv, SolverConfig(Q=np.eye(4), Gamma=np.array([[0.06]]), kappa=0.1,
                     fourier_order=40))

# contract: on-orbit hold, no noise
cfg = SimConfig(initial_state=orbit.state(0.0), duration=20.0,
                noise_std=0.0, controller="closed-loop")
tr = simulate(sys_, orbit, op, ref, cfg)
print(f"on-orbit hold: max norm {tr.norm_x_perp.max():.3e} "
      f"records {len(tr)}")

# contract: step halving with noise on (same draws)
f = []
for step in (1e-3, 5e-4):
    cfg = SimConfig(initial_state=x0, duration=2.0, step=step,
                    noise_std=1e-3, rng_seed=3, controller="closed-loop")
    f.append(simulate(sys_, orbit, op, cap, cfg).x[-1])
print(f"step halving (noisy) final diff {np.linalg.norm(f[0]-f[1]):.3e}")

# the acceptance run
cfg = SimConfig(initial_state=x0, duration=20.0, noise_std=1e-3,
                rng_seed=0, controller="closed-loop", feedforward="mixed")
tr = simulate(sys_, orbit, op, cap, cfg)
after = tr.norm_x_perp[tr.t >= tr.convergence_time]
print(f"acceptance: conv={tr.convergence_time} "
      f"spikes>thr after conv: {int((after >= 0.01).sum())}/{after.size} "
      f"max after {after.max():.3e}")

# phase monotone mod 2pi once inside the tube
inside = tr.t >= tr.convergence_time
s_in = np.unwrap(tr.s[inside], period=2 * np.pi)
print(f"s increments inside tube: min {np.diff(s_in).min():.3e}")

# rk45 route on the same config
cfg = SimConfig(initial_state=x0, duration=20.0, noise_std=1e-3,
                rng_seed=0, controller="closed-loop",
                integrator="rk45-adaptive")
tr45 = simulate(sys_, orbit, op, cap, cfg)
print(f"rk45 route: conv={tr45.convergence_time}")
