import numpy as np

from orbistab.mechanics import cart_pendulum
from orbistab.orbit import upright_oscillation_curve, plan_orbit
from orbistab.projection import make_projection
from orbistab.linearization import (
    build_transverse_linearization,
    transverse_rate_defect,
)

sys_ = cart_pendulum()
orbit = plan_orbit(sys_, upright_oscillation_curve(0.1129), grid=2048)
rng = np.random.default_rng(11)

for variant in ("implicit-phase", "min-distance"):
    op = make_projection(variant, orbit)
    tv = build_transverse_linearization(sys_, orbit, op)
    print(variant)
    for s in (0.7, 2.1, 3.9):
        d = rng.standard_normal(4)
        d /= np.linalg.norm(d)
        line = f"  s={s}: "
        prev = None
        for eps in (1e-2, 1e-3, 1e-4):
            defect = transverse_rate_defect(sys_, orbit, op, tv, s, d, eps)
            val = np.linalg.norm(defect) if np.ndim(defect) else abs(defect)
            line += f"{val:.3e} "
            if prev is not None:
                line += f"(o={np.log10(prev / val):.2f}) "
            prev = val
        print(line)
