import numpy as np
from scipy.integrate import solve_ivp

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import build_transverse_linearization
from orbistab.riccati import SolverConfig, solve_projected_riccati

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
cfg = SolverConfig(Q=np.eye(4), Gamma=np.array([[0.1]]), kappa=0.1,
                   fourier_order=60)

for variant in ("implicit-phase", "min-distance"):
    op = make_projection(variant, orbit)
    tv = build_transverse_linearization(sys_, orbit, op)
    gains = solve_projected_riccati(tv, cfg)
    s_grid = np.linspace(0, 2 * np.pi, 400)
    Rn = [np.linalg.norm(gains.R(s)) for s in s_grid]
    Kn = [np.linalg.norm(gains.K(s)) for s in s_grid]
    print(variant)
    print(f"  max||R||={max(Rn):.3e} at s={s_grid[int(np.argmax(Rn))]:.3f}"
          f"  max||K||={max(Kn):.3e} at s={s_grid[int(np.argmax(Kn))]:.3f}")
    print(f"  cert multipliers: {np.sort(np.abs(gains.multipliers))[::-1]}")

    def rhs(s, y):
        X = y.reshape(4, 4)
        Acl = tv.A(s) + tv.B(s) @ gains.K(s)
        return (Acl @ X / orbit.profile.rho(s)).ravel()

    sol = solve_ivp(rhs, (0.0, 2 * np.pi), np.eye(4).ravel(),
                    method="DOP853", rtol=1e-10, atol=1e-12)
    M = sol.y[:, -1].reshape(4, 4)
    ev = np.sort(np.abs(np.linalg.eigvals(M)))[::-1]
    print(f"  direct monodromy moduli: {ev}")
