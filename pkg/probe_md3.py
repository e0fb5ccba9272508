import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import (
    build_transverse_linearization,
    transverse_jacobian_fd,
)

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)

for variant in ("implicit-phase", "min-distance"):
    op = make_projection(variant, orbit)
    tv = build_transverse_linearization(sys_, orbit, op)
    print(variant)
    for s in (0.7, 2.1, 3.9, 5.6):
        errs = []
        for eps in (1e-2, 1e-3, 1e-4):
            J = transverse_jacobian_fd(sys_, orbit, op, s, eps=eps)
            A_model = tv.A(s)
            errs.append(np.linalg.norm(J - A_model))
        orders = [np.log10(errs[i] / errs[i + 1]) for i in range(2)]
        print(f"  s={s}: errs {errs[0]:.2e} {errs[1]:.2e} {errs[2]:.2e}  "
              f"orders {orders[0]:.2f} {orders[1]:.2f}")
