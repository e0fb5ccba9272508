"""Probe: full solve_projected_riccati under the default config."""

import time

import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import TWO_PI, plan_orbit, upright_oscillation_curve
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import (
    SolverConfig,
    pre_residual,
    solve_projected_riccati,
)

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op, grid=512)

cfg = SolverConfig()
t0 = time.perf_counter()
gains = solve_projected_riccati(tv, cfg)
t1 = time.perf_counter()

print(f"solve time {t1 - t0:.1f} s")
d = gains.diagnostics
print(f"iterations {d['iterations']}  psd rows {d['psd_penalty_rows']}"
      f"  eig floor {d['eigenvalue_floor']:.3e}")
print(f"node residual max {d['residual_node_max']:.3e}")
print("multipliers", np.round(gains.multipliers, 6))
print("transverse moduli", [f"{m:.6f}" for m in d["transverse_moduli"]])

s_dense = np.linspace(0.0, TWO_PI, 2048, endpoint=False)
fro = np.array(
    [np.linalg.norm(pre_residual(tv, gains, cfg2, s), "fro")
     for cfg2, s in ((gains, s) for s in s_dense)]
)
print(f"dense 2048 residual max {fro.max():.3e}")

eigs = np.array([np.linalg.eigvalsh(gains.R(s)) for s in s_dense])
print(f"R eig range [{eigs.min():.3e}, {eigs.max():.2f}]")
kn = np.array([np.linalg.norm(gains.K(s)) for s in s_dense])
print(f"|K| range [{kn.min():.2f}, {kn.max():.2f}]")
