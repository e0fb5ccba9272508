import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import (
    SolverConfig, solve_projected_riccati, NoCertificateError,
)
from orbistab.simulation import SimConfig, simulate
from orbistab.errors import EscapedTubeError, NumericBlowupError

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op)
x0 = np.array([0.1, 0.4, -0.1, -0.2])

for gam in (0.05, 0.04, 0.03, 0.02, 0.015):
    try:
        gains = solve_projected_riccati(
            tv,
            SolverConfig(Q=np.eye(4), Gamma=np.array([[gam]]), kappa=0.1,
                         fourier_order=40),
        )
    except NoCertificateError as e:
        print(f"G={gam}: no certificate ({e})")
        continue
    for std, seed in ((0.0, 0), (1e-3, 0), (1e-3, 1)):
        cfg = SimConfig(initial_state=x0, duration=25.0, noise_std=std,
                        rng_seed=seed, controller="closed-loop",
                        feedforward="mixed")
        try:
            tr = simulate(sys_, orbit, op, gains, cfg)
            print(f"G={gam} std={std:g} seed={seed}: "
                  f"conv={tr.convergence_time}")
        except (EscapedTubeError, NumericBlowupError) as e:
            print(f"G={gam} std={std:g} seed={seed}: {type(e).__name__}")
