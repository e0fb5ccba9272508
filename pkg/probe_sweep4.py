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

designs = [
    ("G=0.01 Q=I", np.eye(4), 0.01),
    ("G=0.005 Q=I", np.eye(4), 0.005),
    ("G=0.001 Q=I", np.eye(4), 0.001),
    ("G=0.01 Qpend", np.diag([1.0, 100.0, 1.0, 10.0]), 0.01),
    ("G=0.1 Qcart", np.diag([10.0, 1.0, 10.0, 0.1]), 0.1),
]

for name, Q, gam in designs:
    try:
        gains = solve_projected_riccati(
            tv,
            SolverConfig(Q=Q, Gamma=np.array([[gam]]), kappa=0.1,
                         fourier_order=40),
        )
    except NoCertificateError as e:
        print(f"{name}: no certificate")
        continue
    outcomes = []
    tail = None
    for seed in range(6):
        cfg = SimConfig(initial_state=x0, duration=25.0, noise_std=1e-3,
                        rng_seed=seed, controller="closed-loop",
                        feedforward="mixed")
        try:
            tr = simulate(sys_, orbit, op, gains, cfg)
            outcomes.append(tr.convergence_time)
            if seed == 0:
                last = tr.norm_x_perp[tr.t >= 20.0]
                tail = (np.median(last), last.max())
        except (EscapedTubeError, NumericBlowupError):
            outcomes.append("blowup")
    print(f"{name:13s}: conv={outcomes} tail(med,max)={tail}")
