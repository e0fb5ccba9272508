import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import solve_projected_riccati
from orbistab.simulation import SimConfig, simulate
from orbistab.errors import EscapedTubeError, NumericBlowupError, NoCertificateError

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
base = np.array([0.1, 0.4, -0.1, -0.2])

for c in ("on-orbit", "mixed", "full"):
    tv = build_transverse_linearization(sys_, orbit, op, feedforward=c)
    try:
        gains = solve_projected_riccati(tv)
    except NoCertificateError as e:
        print(f"{c}: no certificate: {e}")
        continue
    print(f"{c}: residual {gains.diagnostics['residual_node_max']:.2e}  "
          f"moduli {np.round(np.abs(gains.multipliers), 5)}")

    def ok(lam):
        cfg = SimConfig(initial_state=lam * base, duration=30.0,
                        noise_std=0.0, feedforward=c)
        try:
            tr = simulate(sys_, orbit, op, gains, cfg)
            return tr.convergence_time
        except (EscapedTubeError, NumericBlowupError):
            return None

    ct = ok(1.0)
    if ct is not None:
        print(f"  {c}/{c}: captures at lam=1, conv={ct}")
        continue
    lo, hi = 0.4, 1.0
    if ok(lo) is None:
        print(f"  {c}/{c}: fails even at lam=0.4")
        continue
    for _ in range(5):
        mid = 0.5 * (lo + hi)
        if ok(mid) is not None:
            lo = mid
        else:
            hi = mid
    print(f"  {c}/{c}: basin edge in ({lo:.3f}, {hi:.3f})")
