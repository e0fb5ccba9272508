"""Probe: solver variants — kappa=0, scaled weights, constant embedding."""

import numpy as np
from scipy.linalg import solve_continuous_are

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import TWO_PI, plan_orbit, upright_oscillation_curve
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import (
    ConstantCoefficientEmbedding,
    SolverConfig,
    solve_projected_riccati,
)

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
op = make_projection("implicit-phase", orbit)
tv = build_transverse_linearization(sys_, orbit, op, grid=512)

# kappa = 0 re-solve
g0 = solve_projected_riccati(tv, SolverConfig(kappa=0.0))
print(f"[kappa=0] node res {g0.diagnostics['residual_node_max']:.3e} "
      f"floor {g0.diagnostics['eigenvalue_floor']:.3e} "
      f"moduli {g0.diagnostics['transverse_moduli']}")

# scaling invariance of K at kappa = 0
c = 3.0
gc = solve_projected_riccati(
    tv, SolverConfig(Q=c * np.eye(4), Gamma=c * 0.1 * np.eye(1), kappa=0.0)
)
s_t = np.linspace(0.0, TWO_PI, 64, endpoint=False)
dev = max(np.abs(gc.K(s) - g0.K(s)).max() for s in s_t)
ref = max(np.abs(g0.K(s)).max() for s in s_t)
print(f"[scaling] max |K_c - K| {dev:.3e} (scale {ref:.1f})")

# constant stabilizable embed vs algebraic Riccati oracle
A0 = np.array([[0.0, 1.0], [2.0, -1.0]])
B0 = np.array([[0.0], [1.0]])
Qe = np.eye(2)
Ge = np.array([[0.5]])
emb = ConstantCoefficientEmbedding(A0, B0)
ge = solve_projected_riccati(
    tv=emb, cfg=SolverConfig(Q=Qe, Gamma=Ge, kappa=0.0, fourier_order=8)
)
X = solve_continuous_are(A0, B0, Qe, Ge)
Kare = -np.linalg.solve(Ge, B0.T @ X)
devK = max(np.abs(ge.K(s) - Kare).max() for s in s_t)
devR = max(np.abs(ge.R(s) - X).max() for s in s_t)
print(f"[embed] |K - K_are| {devK:.3e}  |R - X_are| {devR:.3e} "
      f"moduli {ge.diagnostics['transverse_moduli']}")

# doubling the order must not increase the achieved residual
g80 = solve_projected_riccati(tv, SolverConfig(fourier_order=80))
print(f"[order 80] node res {g80.diagnostics['residual_node_max']:.3e} "
      f"floor {g80.diagnostics['eigenvalue_floor']:.3e}")
