"""Periodic orbit planning through virtual holonomic constraints.

A constraint curve Phi maps a phase variable s in [0, 2*pi) to generalized
coordinates.  Projecting the dynamics onto the annihilator of the input
matrix yields the scalar reduced dynamics

    alpha(s) sdd + beta(s) sd^2 + gamma(s) = 0,

whose periodic solutions synchronize q = Phi(s), qd = Phi'(s) rho(s) with
sd = rho(s).  The profile rho is recovered by quadrature of the reduced
dynamics' integral identity, anchored at the singular points of alpha.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline
from scipy.linalg import null_space
from scipy.optimize import brentq

from .errors import (
    InconsistentParameterizationError,
    InfeasibleOrbitError,
    NotApplicableError,
)
from .mechanics import feedforward_force

TWO_PI = 2.0 * math.pi

# Quadrature controls for the velocity-profile construction.
_FINE_PER_SIDE = 2049
_ALPHA_PATCH = 1e-8
_DRHO_PATCH = 1e-6
_STITCH_FAIL = 1e-4
_BLEND_LO = 0.35
_BLEND_HI = 0.65


def wrap_phase(s):
    """Wrap a phase value into [0, 2*pi)."""
    return np.mod(s, TWO_PI)


@dataclass
class ConstraintCurve:
    """Phase-to-configuration map Phi with derivatives up to third order.

    The callables take a scalar s and return (n_q,) arrays; they must be
    2*pi-periodic.
    """

    value: Callable[[float], np.ndarray]
    d1: Callable[[float], np.ndarray]
    d2: Callable[[float], np.ndarray]
    d3: Callable[[float], np.ndarray]
    params: dict = field(default_factory=dict)


def upright_oscillation_curve(a2=0.1129):
    """Cart-pendulum constraint curve for oscillations about the upright.

    Phi(s) = (-1.5 sin(a2 cos s), a2 cos s): the pendulum swings with
    amplitude a2 while the cart counter-oscillates.  Feasible amplitudes
    satisfy 1.5 cos(a2)^2 > 1.
    """
    a2 = float(a2)

    def value(s):
        c = np.cos(s)
        return np.array([-1.5 * np.sin(a2 * c), a2 * c])

    def d1(s):
        c, sn = np.cos(s), np.sin(s)
        return np.array([1.5 * a2 * sn * np.cos(a2 * c), -a2 * sn])

    def d2(s):
        c, sn = np.cos(s), np.sin(s)
        return np.array(
            [
                1.5 * a2 * (c * np.cos(a2 * c) + a2 * sn**2 * np.sin(a2 * c)),
                -a2 * c,
            ]
        )

    def d3(s):
        c, sn = np.cos(s), np.sin(s)
        ac = a2 * c
        return np.array(
            [
                1.5
                * a2
                * (
                    -sn * np.cos(ac)
                    + 3.0 * a2 * sn * c * np.sin(ac)
                    - a2**2 * sn**3 * np.cos(ac)
                ),
                a2 * sn,
            ]
        )

    return ConstraintCurve(value, d1, d2, d3, params={"a2": a2})


class ReducedDynamics:
    """Scalar dynamics alpha(s) sdd + beta(s) sd^2 + gamma(s) = 0.

    Built by projecting the full dynamics onto the left annihilator of the
    input matrix along the constraint curve.
    """

    def __init__(self, sys, curve, b_perp):
        self.sys = sys
        self.curve = curve
        self.b_perp = b_perp

    def alpha(self, s):
        return self.b_perp @ self.sys.mass_matrix(self.curve.value(s)) @ self.curve.d1(s)

    def beta(self, s):
        q = self.curve.value(s)
        d1 = self.curve.d1(s)
        return self.b_perp @ (
            self.sys.mass_matrix(q) @ self.curve.d2(s)
            + self.sys.coriolis_matrix(q, d1) @ d1
        )

    def gamma(self, s):
        return self.b_perp @ self.sys.gravity_vector(self.curve.value(s))

    def alpha_d1(self, s, h=1e-5):
        return (self.alpha(s + h) - self.alpha(s - h)) / (2.0 * h)

    def delta(self, s):
        """beta - alpha'; controls the integrating factor exp(int 2 delta/alpha)."""
        return self.beta(s) - self.alpha_d1(s)

    @cached_property
    def singular_points(self):
        """Sorted zeros of alpha in [0, 2*pi), refined by bisection."""
        n = 4096
        grid = np.linspace(0.0, TWO_PI, n, endpoint=False)
        vals = np.array([self.alpha(s) for s in grid])
        zeros = []
        for i in range(n):
            j = (i + 1) % n
            a, b = vals[i], vals[j]
            sa, sb = grid[i], grid[i] + (TWO_PI / n)
            if a == 0.0:
                zeros.append(grid[i])
            elif a * b < 0.0:
                zeros.append(brentq(self.alpha, sa, sb, xtol=1e-14))
        zeros = sorted(wrap_phase(z) for z in zeros)
        out = []
        for z in zeros:
            if not out or (z - out[-1]) > 1e-9:
                out.append(z)
        if out and (TWO_PI - out[-1] + out[0]) <= 1e-9:
            out.pop()
        return np.array(out)


def reduced_dynamics(sys, curve):
    """Project the dynamics of ``sys`` onto the passive directions of ``curve``.

    Requires exactly one unactuated degree of freedom and a friction matrix
    whose passive-row contribution vanishes along the curve; otherwise the
    alpha/beta/gamma reduction does not exist.
    """
    perp = null_space(sys.input_matrix.T)
    if perp.shape[1] == 0:
        raise NotApplicableError(
            "fully actuated system: the input annihilator is trivial"
        )
    if perp.shape[1] != 1:
        raise NotApplicableError(
            "reduced dynamics needs exactly one unactuated degree of freedom"
        )
    b_perp = perp[:, 0]
    for s in np.linspace(0.0, TWO_PI, 17):
        fric = b_perp @ sys.friction_matrix(curve.value(s)) @ curve.d1(s)
        if abs(fric) > 1e-12:
            raise NotApplicableError(
                "passive-row friction along the curve breaks the "
                "alpha/beta/gamma reduction"
            )
    return ReducedDynamics(sys, curve, b_perp)


class VelocityProfile:
    """Periodic phase speed rho(s) > 0 with derivatives.

    Stores the construction grid (s_i, rho_i, rho_i') and evaluates through
    one periodic cubic spline on z = rho^2, which keeps rho'' smooth.
    """

    def __init__(self, s_grid, z_grid, dz_grid, stitch_mismatch=0.0):
        if np.min(z_grid) <= 1e-16:
            raise InfeasibleOrbitError("velocity profile touches zero")
        self.s_grid = np.asarray(s_grid, dtype=float)
        self.rho_grid = np.sqrt(z_grid)
        self.drho_grid = dz_grid / (2.0 * self.rho_grid)
        self.stitch_mismatch = float(stitch_mismatch)
        s_ext = np.append(self.s_grid, TWO_PI)
        z_ext = np.append(z_grid, z_grid[0])
        self._z = CubicSpline(s_ext, z_ext, bc_type="periodic")
        self._dz = self._z.derivative()
        self._d2z = self._dz.derivative()

    def rho(self, s):
        return np.sqrt(self._z(wrap_phase(s)))

    def drho(self, s):
        s = wrap_phase(s)
        return self._dz(s) / (2.0 * np.sqrt(self._z(s)))

    def d2rho(self, s):
        s = wrap_phase(s)
        r = np.sqrt(self._z(s))
        dr = self._dz(s) / (2.0 * r)
        return (0.5 * self._d2z(s) - dr**2) / r

    @cached_property
    def period(self):
        """Time for one full revolution of the phase, int ds / rho."""
        fine = np.linspace(0.0, TWO_PI, 8193)
        return float(
            cumulative_simpson(1.0 / self.rho(fine), x=fine, initial=0.0)[-1]
        )


def _fd1(f, s, h=1e-5):
    return (f(s + h) - f(s - h)) / (2.0 * h)


def _fd2(f, s, h=1e-4):
    return (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)


def _anchor_series(rd, s_a):
    """Anchored value of z = rho^2 and its first two derivatives at a zero of alpha."""
    beta_a = rd.beta(s_a)
    gamma_a = rd.gamma(s_a)
    if abs(beta_a) < 1e-12:
        raise InfeasibleOrbitError(
            f"anchoring fails at s = {s_a:.6f}: beta vanishes with alpha"
        )
    z_a = -gamma_a / beta_a
    if -1e-10 <= z_a < 0.0:
        z_a = 0.0
    if z_a <= 0.0:
        raise InfeasibleOrbitError(
            f"anchoring gives rho^2 = {z_a:.3e} <= 0 at s = {s_a:.6f}"
        )
    a1 = _fd1(rd.alpha, s_a)
    b1 = _fd1(rd.beta, s_a)
    g1 = _fd1(rd.gamma, s_a)
    a2 = _fd2(rd.alpha, s_a)
    b2 = _fd2(rd.beta, s_a)
    g2 = _fd2(rd.gamma, s_a)
    denom = a1 + 2.0 * beta_a
    if abs(denom) < 1e-12:
        raise InfeasibleOrbitError(
            f"degenerate singular point at s = {s_a:.6f}: alpha' + 2 beta = 0"
        )
    zp_a = -2.0 * (b1 * z_a + g1) / denom
    zpp_a = (-2.0 * b2 * z_a - 4.0 * b1 * zp_a - 2.0 * g2 - a2 * zp_a) / (
        2.0 * a1 + 2.0 * beta_a
    )
    return z_a, zp_a, zpp_a


def _one_sided_z(rd, s_a, s_end, z_a, zp_a, zpp_a):
    """Quadrature of the integral identity outward from an anchor.

    Returns (s_nodes ascending, z values).  Uses the identity
    z(s) = -2 int_{s_a}^{s} E a g / (E(s) a(s)^2) with E = exp(int 2 delta/alpha);
    the integrand 2 delta/alpha has a removable singularity at the anchor.
    """
    sign = 1.0 if s_end > s_a else -1.0
    u = np.linspace(0.0, abs(s_end - s_a), _FINE_PER_SIDE)
    s_nodes = s_a + sign * u
    alpha = np.array([rd.alpha(s) for s in s_nodes])
    gamma = np.array([rd.gamma(s) for s in s_nodes])
    delta = np.array([rd.delta(s) for s in s_nodes])
    integ = np.empty_like(alpha)
    small = np.abs(alpha) < _ALPHA_PATCH
    integ[~small] = 2.0 * delta[~small] / alpha[~small]
    if np.any(small):
        # Removable singularity: limit 2 delta'/alpha' from local slopes.
        lim = 2.0 * _fd1(rd.delta, s_a) / _fd1(rd.alpha, s_a)
        integ[small] = lim
    w = sign * cumulative_simpson(integ, x=u, initial=0.0)
    # Normalizing E against its running maximum guards against overflow on
    # intervals where the exponent grows large.
    w -= np.max(w)
    E = np.exp(w)
    forcing = sign * cumulative_simpson(E * alpha * gamma, x=u, initial=0.0)
    z = np.empty_like(u)
    z[0] = z_a
    with np.errstate(divide="ignore", invalid="ignore"):
        z[1:] = -2.0 * forcing[1:] / (E[1:] * alpha[1:] ** 2)
    d = s_nodes[1] - s_a
    z[1] = z_a + zp_a * d + 0.5 * zpp_a * d * d
    if sign < 0:
        return s_nodes[::-1], z[::-1]
    return s_nodes, z


def _dz_from_identity(rd, s_nodes, z, anchors, anchor_zp):
    """z' = -2 (beta z + gamma)/alpha with the anchored limit near zeros of alpha."""
    dz = np.empty_like(z)
    for i, s in enumerate(s_nodes):
        a = rd.alpha(s)
        if abs(a) > _DRHO_PATCH:
            dz[i] = -2.0 * (rd.beta(s) * z[i] + rd.gamma(s)) / a
        else:
            k = int(np.argmin(np.abs(wrap_phase(anchors - s + math.pi) - math.pi)))
            dz[i] = anchor_zp[k]
    return dz


def _smootherstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x**3 * (x * (6.0 * x - 15.0) + 10.0)


def solve_rho(rd, grid=2048):
    """Construct the periodic velocity profile of the reduced dynamics.

    At every singular point of alpha the profile is anchored to
    rho^2 = -gamma/beta; between anchors it is built by quadrature of the
    reduced dynamics' integral identity, integrated outward from each anchor
    and blended at interval midpoints.  Without singular points the unique
    periodic solution of the linear identity is used instead.

    Parameters
    ----------
    rd : ReducedDynamics
    grid : int
        Number of uniform output nodes on [0, 2*pi).

    Returns
    -------
    VelocityProfile

    Raises
    ------
    InfeasibleOrbitError
        If anchoring gives a nonpositive rho^2 or the profile touches zero.
    InconsistentParameterizationError
        If continuations from adjacent anchors disagree beyond tolerance.
    """
    s_out = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    anchors = rd.singular_points
    if anchors.size == 0:
        return _solve_rho_periodic(rd, s_out)

    series = [_anchor_series(rd, s_a) for s_a in anchors]
    z_out = np.empty_like(s_out)
    filled = np.zeros_like(s_out, dtype=bool)
    worst_mismatch = 0.0

    ext = np.append(anchors, anchors[0] + TWO_PI)
    for k in range(anchors.size):
        sL, sR = ext[k], ext[k + 1]
        length = sR - sL
        zL, zpL, zppL = series[k]
        zR, zpR, zppR = series[(k + 1) % anchors.size]
        s_left, z_left = _one_sided_z(rd, sL, sL + _BLEND_HI * length, zL, zpL, zppL)
        s_right, z_right = _one_sided_z(rd, sR, sR - _BLEND_HI * length, zR, zpR, zppR)
        spl_left = CubicSpline(s_left, z_left)
        spl_right = CubicSpline(s_right, z_right)

        mid = sL + 0.5 * length
        gap = abs(spl_left(mid) - spl_right(mid)) / max(1.0, abs(spl_left(mid)))
        worst_mismatch = max(worst_mismatch, gap)
        if gap > _STITCH_FAIL:
            raise InconsistentParameterizationError(
                f"continuations from anchors {wrap_phase(sL):.6f} and "
                f"{wrap_phase(sR):.6f} disagree by {gap:.3e} at the midpoint"
            )

        # Output nodes covered by this interval, unwrapped onto [sL, sR).
        rel = wrap_phase(s_out - sL)
        mask = rel < length - 1e-15
        s_loc = sL + rel[mask]
        t = (s_loc - sL) / length
        zl = spl_left(np.minimum(s_loc, sL + _BLEND_HI * length))
        zr = spl_right(np.maximum(s_loc, sR - _BLEND_HI * length))
        wgt = 1.0 - _smootherstep((t - _BLEND_LO) / (_BLEND_HI - _BLEND_LO))
        z_out[mask] = wgt * zl + (1.0 - wgt) * zr
        filled[mask] = True

    # Nodes that coincide with an anchor take the anchored value exactly.
    for s_a, (z_a, _, _) in zip(anchors, series):
        hit = np.abs(wrap_phase(s_out - s_a + math.pi) - math.pi) < 1e-12
        z_out[hit] = z_a
        filled[hit] = True
    if not np.all(filled):
        raise InconsistentParameterizationError("velocity profile grid has gaps")
    if np.min(z_out) <= 0.0:
        raise InfeasibleOrbitError("rho^2 becomes nonpositive between anchors")

    anchor_zp = np.array([zp for (_, zp, _) in series])
    dz_out = _dz_from_identity(rd, s_out, z_out, anchors, anchor_zp)
    return VelocityProfile(s_out, z_out, dz_out, stitch_mismatch=worst_mismatch)


def _solve_rho_periodic(rd, s_out):
    """Velocity profile when alpha never vanishes: the periodic solution."""
    fine = np.linspace(0.0, TWO_PI, 8193)
    alpha = np.array([rd.alpha(s) for s in fine])
    beta = np.array([rd.beta(s) for s in fine])
    gamma = np.array([rd.gamma(s) for s in fine])
    w = cumulative_simpson(2.0 * beta / alpha, x=fine, initial=0.0)
    mu = np.exp(w - np.max(w))
    forcing = cumulative_simpson(mu * 2.0 * gamma / alpha, x=fine, initial=0.0)
    mu_T = mu[-1] / mu[0]
    if abs(mu_T - 1.0) < 1e-12:
        raise InfeasibleOrbitError(
            "integrating factor is 2*pi-periodic; no isolated periodic profile"
        )
    z0 = forcing[-1] / (1.0 - mu_T) / mu[0]
    z_fine = (z0 * mu[0] - forcing) / mu
    if np.min(z_fine) <= 0.0:
        raise InfeasibleOrbitError("periodic solution for rho^2 is not positive")
    spl = CubicSpline(fine, z_fine)
    z_out = spl(s_out)
    dz_out = -2.0 * (np.array([rd.beta(s) for s in s_out]) * z_out
                     + np.array([rd.gamma(s) for s in s_out])) / np.array(
                         [rd.alpha(s) for s in s_out])
    return VelocityProfile(s_out, z_out, dz_out)


@dataclass
class OrbitParameterization:
    """Periodic orbit x_s(s) = (Phi(s), Phi'(s) rho(s)) with derivatives."""

    curve: ConstraintCurve
    profile: VelocityProfile

    @property
    def params(self):
        return self.curve.params

    @property
    def period(self):
        return self.profile.period

    def state(self, s):
        """Orbit point x_s(s), shape (2 n_q,)."""
        return np.concatenate(
            [self.curve.value(s), self.curve.d1(s) * self.profile.rho(s)]
        )

    def state_prime(self, s):
        """d x_s / ds; its velocity block is Lambda = Phi'' rho + Phi' rho'."""
        lam = self.curve.d2(s) * self.profile.rho(s) + self.curve.d1(
            s
        ) * self.profile.drho(s)
        return np.concatenate([self.curve.d1(s), lam])

    def state_second(self, s):
        """d^2 x_s / ds^2."""
        rho = self.profile.rho(s)
        dr = self.profile.drho(s)
        d2r = self.profile.d2rho(s)
        lam_p = (
            self.curve.d3(s) * rho
            + 2.0 * self.curve.d2(s) * dr
            + self.curve.d1(s) * d2r
        )
        return np.concatenate([self.curve.d2(s), lam_p])

    def velocity(self, s):
        """Nominal generalized velocity qd_*(s) = Phi'(s) rho(s)."""
        return self.curve.d1(s) * self.profile.rho(s)

    def accel(self, s):
        """Nominal generalized acceleration qdd_*(s) = Lambda(s) rho(s)."""
        lam = self.curve.d2(s) * self.profile.rho(s) + self.curve.d1(
            s
        ) * self.profile.drho(s)
        return lam * self.profile.rho(s)


def plan_orbit(sys, curve, grid=2048):
    """Reduce, solve for rho, and assemble the orbit parameterization."""
    rd = reduced_dynamics(sys, curve)
    profile = solve_rho(rd, grid=grid)
    return OrbitParameterization(curve, profile)


def nominal_input(sys, orbit, s):
    """Open-loop input u_*(s) sustaining the orbit at phase s."""
    q = orbit.curve.value(s)
    qd = orbit.velocity(s)
    return sys.input_left_inverse @ feedforward_force(sys, orbit, q, qd, s)
