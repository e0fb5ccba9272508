"""Phase projection operators and transverse coordinates.

A projection P maps a neighborhood of the orbit to the phase s = P(x), with
P(x_s(s)) = s.  The excessive transverse coordinate is x_perp = x - x_s(s).
Two constructions are provided: an implicit phase built from the pendulum
pair (theta, dtheta), and a weighted minimum-distance projection.

On the orbit, DP annihilates nothing tangential: DP(x_s(s)) x_s'(s) = 1, and
Omega(s) = I - x_s'(s) DP(x_s(s)) projects onto the transverse subspace
ker DP with rank 2 n_q - 1.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ImplicitFunctionError, OutsideNeighborhoodError
from .orbit import TWO_PI, wrap_phase


def phase_difference(a, b):
    """Minimal signed difference a - b modulo 2*pi, in [-pi, pi)."""
    return ((a - b + math.pi) % TWO_PI) - math.pi


@dataclass
class ProjectionResult:
    """Outcome of projecting a state onto the orbit."""

    s: float
    x_perp: np.ndarray
    iterations: int
    residual: float


class _ProjectionBase:
    """Shared derivative machinery; subclasses implement project() and dP()."""

    def __init__(self, orbit):
        self.orbit = orbit

    def project(self, x, hint=None):
        raise NotImplementedError

    def dP(self, x, s=None):
        raise NotImplementedError

    def dP_on_orbit(self, s):
        """Gradient row of P at the orbit point x_s(s)."""
        return self.dP(self.orbit.state(s), s=wrap_phase(s))

    def d2P_on_orbit(self, s, symmetrize=True):
        """Hessian of P at x_s(s) by central differences of the gradient.

        The finite-difference Hessian is asymmetric at roundoff level; the
        symmetrized form (H + H^T)/2 is returned unless ``symmetrize`` is
        False.
        """
        s = wrap_phase(s)
        x0 = self.orbit.state(s)
        n = x0.size
        eps = 1e-5 * (1.0 + np.linalg.norm(x0))
        H = np.empty((n, n))
        for i in range(n):
            e = np.zeros(n)
            e[i] = eps
            sp = self.project(x0 + e, hint=s).s
            sm = self.project(x0 - e, hint=s).s
            row_p = self.dP(x0 + e, s=sp)
            row_m = self.dP(x0 - e, s=sm)
            H[i] = (row_p - row_m) / (2.0 * eps)
        if symmetrize:
            H = 0.5 * (H + H.T)
        return H

    def omega(self, s):
        """Transverse projector Omega(s) = I - x_s'(s) DP(x_s(s))."""
        xsp = self.orbit.state_prime(s)
        return np.eye(xsp.size) - np.outer(xsp, self.dP_on_orbit(s))


class PhaseProjection(_ProjectionBase):
    """Implicit phase from the four-quadrant angle of the pendulum pair.

    For the upright-oscillation curve the phase solves

        s = atan2(-dtheta / (a2 rho(s)), theta / a2),

    which reproduces s exactly on the orbit.  The fixed-point iteration
    converges fast because rho varies slowly; a Newton fallback covers the
    rest.  The construction only needs (theta, dtheta), so its neighborhood
    excludes just the origin of that plane.
    """

    def __init__(self, orbit, tol=1e-12, max_iter=50):
        super().__init__(orbit)
        if "a2" not in orbit.params:
            raise ValueError(
                "implicit-phase projection needs the oscillation amplitude "
                "'a2' in orbit params"
            )
        self.a2 = float(orbit.params["a2"])
        self.tol = float(tol)
        self.max_iter = int(max_iter)

    def _angle(self, x, s):
        theta, dtheta = x[1], x[3]
        rho = self.orbit.profile.rho(s)
        return math.atan2(-dtheta / (self.a2 * rho), theta / self.a2)

    def _residual(self, x, s):
        return phase_difference(s, wrap_phase(self._angle(x, s)))

    def _dh_ds(self, x, s):
        theta, dtheta = x[1], x[3]
        rho = self.orbit.profile.rho(s)
        drho = self.orbit.profile.drho(s)
        u = -dtheta / (self.a2 * rho)
        v = theta / self.a2
        r2 = u * u + v * v
        if r2 < 1e-24:
            raise ImplicitFunctionError(
                "phase is undefined: (theta, dtheta) at the origin"
            )
        return 1.0 + (u * v / r2) * (drho / rho)

    def project(self, x, hint=None):
        x = np.asarray(x, dtype=float)
        theta, dtheta = x[1], x[3]
        if theta * theta + dtheta * dtheta < 1e-24:
            raise ImplicitFunctionError(
                "phase is undefined: (theta, dtheta) at the origin"
            )
        s = wrap_phase(hint) if hint is not None else wrap_phase(
            math.atan2(
                -dtheta / (self.a2 * self.orbit.profile.rho(0.0)), theta / self.a2
            )
        )
        for it in range(1, self.max_iter + 1):
            s_new = wrap_phase(self._angle(x, s))
            step = phase_difference(s_new, s)
            s = wrap_phase(s + step)
            if abs(step) < self.tol:
                return ProjectionResult(
                    s, x - self.orbit.state(s), it, abs(self._residual(x, s))
                )
        # Newton fallback on h(x, s) = s - angle(x, s).
        for it2 in range(1, 26):
            h = self._residual(x, s)
            dh = self._dh_ds(x, s)
            if abs(dh) < 1e-10:
                raise ImplicitFunctionError(
                    f"phase residual derivative degenerate at s = {s:.6f}"
                )
            s = wrap_phase(s - h / dh)
            if abs(h) < self.tol:
                return ProjectionResult(
                    s, x - self.orbit.state(s), self.max_iter + it2, abs(h)
                )
        raise OutsideNeighborhoodError(
            "phase projection did not converge; state outside the tube"
        )

    def dP(self, x, s=None):
        """Gradient row of P via the implicit function theorem."""
        x = np.asarray(x, dtype=float)
        if s is None:
            s = self.project(x).s
        theta, dtheta = x[1], x[3]
        rho = self.orbit.profile.rho(s)
        u = -dtheta / (self.a2 * rho)
        v = theta / self.a2
        r2 = u * u + v * v
        if r2 < 1e-24:
            raise ImplicitFunctionError(
                "phase is undefined: (theta, dtheta) at the origin"
            )
        dh_ds = self._dh_ds(x, s)
        if abs(dh_ds) < 1e-10:
            raise ImplicitFunctionError(
                f"implicit function theorem fails at s = {s:.6f}"
            )
        row = np.zeros(x.size)
        row[1] = u / (self.a2 * r2)
        row[3] = v / (self.a2 * rho * r2)
        return -row / dh_ds


class MinDistanceProjection(_ProjectionBase):
    """Projection onto the nearest orbit point in a weighted metric.

    Solves x_s'(s)^T V(s) (x - x_s(s)) = 0 by Newton iteration.  ``weight``
    may be a constant SPD matrix or a callable s -> matrix; the default is
    the identity.
    """

    def __init__(self, orbit, weight=None, tol=1e-12, max_iter=50, seed_nodes=256):
        super().__init__(orbit)
        n = orbit.state(0.0).size
        if weight is None:
            weight = np.eye(n)
        self._w_callable = callable(weight)
        self.weight = weight if self._w_callable else np.asarray(weight, dtype=float)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.seed_nodes = int(seed_nodes)

    def _V(self, s):
        return self.weight(s) if self._w_callable else self.weight

    def _dV(self, s, h=1e-6):
        if not self._w_callable:
            return None
        return (self.weight(s + h) - self.weight(s - h)) / (2.0 * h)

    def _g(self, x, s):
        return self.orbit.state_prime(s) @ self._V(s) @ (x - self.orbit.state(s))

    def _g_ds(self, x, s):
        d = x - self.orbit.state(s)
        xsp = self.orbit.state_prime(s)
        V = self._V(s)
        out = self.orbit.state_second(s) @ V @ d - xsp @ V @ xsp
        dV = self._dV(s)
        if dV is not None:
            out += xsp @ dV @ d
        return out

    def _seed(self, x):
        nodes = np.linspace(0.0, TWO_PI, self.seed_nodes, endpoint=False)
        best, best_d = 0.0, np.inf
        for s in nodes:
            d = x - self.orbit.state(s)
            val = d @ self._V(s) @ d
            if val < best_d:
                best, best_d = s, val
        return best

    def project(self, x, hint=None):
        x = np.asarray(x, dtype=float)
        s = wrap_phase(hint) if hint is not None else self._seed(x)
        seed = s
        gtol = self.tol * (1.0 + np.linalg.norm(x))
        for it in range(1, self.max_iter + 1):
            g = self._g(x, s)
            gs = self._g_ds(x, s)
            if abs(g) < gtol:
                return ProjectionResult(s, x - self.orbit.state(s), it, abs(g))
            if abs(gs) < 1e-12:
                break
            # Short steps keep Newton from leaving the basin of the seed.
            step = float(np.clip(-g / gs, -0.3, 0.3))
            s = wrap_phase(s + step)
            if it >= 12 and abs(step) > 0.05:
                break
        s = self._bracketed_root(x, seed)
        g = self._g(x, s)
        if abs(g) > 1e3 * gtol:
            raise OutsideNeighborhoodError(
                "minimum-distance projection did not converge; state outside "
                "the tube"
            )
        return ProjectionResult(
            s, x - self.orbit.state(s), self.max_iter, abs(g)
        )

    def _bracketed_root(self, x, seed):
        """Root of g nearest the seed, by ring scan plus brentq.

        Newton cycles when the distance function has an inflection between
        the iterate and the root; bracketing is immune to that.  Sign
        changes from + to - (a distance minimum) are preferred.
        """
        n = 128
        offs = np.arange(n + 1) * (TWO_PI / n)
        gv = np.array([self._g(x, seed + o) for o in offs])
        best = None
        for j in range(n):
            a, b = gv[j], gv[j + 1]
            if a == 0.0:
                cand = offs[j]
            elif a * b < 0.0:
                cand = brentq(
                    lambda o: self._g(x, seed + o), offs[j], offs[j + 1],
                    xtol=1e-13,
                )
            else:
                continue
            minimum = a > 0.0 >= b or a == 0.0
            dist = abs(phase_difference(seed + cand, seed))
            key = (not minimum, dist)
            if best is None or key < best[0]:
                best = (key, cand)
        if best is None:
            raise OutsideNeighborhoodError(
                "no distance-stationary phase found; state outside the tube"
            )
        return wrap_phase(seed + best[1])

    def dP(self, x, s=None):
        """Gradient row of P via the implicit function theorem."""
        x = np.asarray(x, dtype=float)
        if s is None:
            s = self.project(x).s
        gs = self._g_ds(x, s)
        if abs(gs) < 1e-10:
            raise ImplicitFunctionError(
                f"implicit function theorem fails at s = {s:.6f}"
            )
        return -(self.orbit.state_prime(s) @ self._V(s)) / gs


def make_projection(variant, orbit, **kwargs):
    """Build a projection operator by variant name."""
    if variant == "implicit-phase":
        return PhaseProjection(orbit, **kwargs)
    if variant == "min-distance":
        return MinDistanceProjection(orbit, **kwargs)
    raise ValueError(f"unknown projection variant: {variant!r}")
