import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import (
    solve_projected_riccati,
    SolverConfig,
    projected_residual,
    floquet_multipliers,
)
from orbistab.errors import NoCertificateError, PsdFloorError, VerificationFailedError

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("min-distance", orbit)
tv = build_transverse_linearization(sys_, orbit, op)

# field roughness: Fourier content of A and DP on the grid
s_grid = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
A = np.stack([tv.A(s) for s in s_grid])
DP = np.stack([tv.DP(s) for s in s_grid])
for name, F in (("A", A.reshape(512, -1)), ("DP", DP)):
    co = np.fft.rfft(F, axis=0) / 512
    mag = np.abs(co).max(axis=1)
    print(f"{name}: h10={mag[10]:.2e} h20={mag[20]:.2e} h40={mag[40]:.2e} h60={mag[60]:.2e}")

for order in (40, 60, 80):
    cfg = SolverConfig(fourier_order=order, max_outer_iterations=8)
    try:
        g = solve_projected_riccati(tv, cfg)
        print(f"order {order}: residual {g.diagnostics['residual_node_max']:.2e} "
              f"iters {g.diagnostics['iterations']} moduli {np.round(np.abs(g.multipliers),5)}")
        break
    except (NoCertificateError, PsdFloorError, VerificationFailedError) as e:
        print(f"order {order}: {type(e).__name__}: {e}")
