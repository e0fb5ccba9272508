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
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
x0 = np.array([0.1, 0.4, -0.1, -0.2])

for gam in (0.03, 0.02, 0.015, 0.0125):
    gains = solve_projected_riccati(
        tv,
        SolverConfig(Q=np.eye(4), Gamma=np.array([[gam]]), kappa=0.1,
                     fourier_order=40),
    )
    convs = []
    for seed in range(8):
        cfg = SimConfig(initial_state=x0, duration=20.0, noise_std=1e-3,
                        rng_seed=seed, controller="closed-loop",
                        feedforward="mixed")
        try:
            tr = simulate(sys_, orbit, op, gains, cfg)
            c = tr.convergence_time
            convs.append(round(c, 2) if c is not None else None)
        except (EscapedTubeError, NumericBlowupError):
            convs.append("X")
    print(f"G={gam}: conv(seeds 0-7)={convs}")
