"""Closed-loop simulation of the orbit-stabilizing controller.

The plant integrates the true state; the controller sees a measured copy
with optional additive Gaussian noise.  Feedback is autonomous: every
control evaluation projects the measurement onto the orbit and reads the
gain schedule at the projected phase, so the input depends on the measured
state alone and never on the clock.

Noise semantics: draws are i.i.d. per sample interval and held constant
between records, so refining the integrator step leaves the disturbance
realization unchanged.  Both integrators evaluate the feedback law
continuously inside the right-hand side against the held draw (no input
zero-order hold); open-loop replay inputs are stepped from the phase
clock, per integrator step for rk4 and per sample window for the
adaptive route.  Draws come from the counter-based Philox generator, so
traces are reproducible across platforms for a given seed.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import EscapedTubeError, NumericBlowupError, ProjectionError
from .mechanics import forward_dynamics
from .orbit import wrap_phase
from .linearization import nominal_feedback_input

INTEGRATORS = ("rk4", "rk45-adaptive")
CONTROLLERS = ("closed-loop", "open-loop", "none")

_BLOWUP_NORM = 1e6


def noise_stream(seed, std_vector, count):
    """Deterministic Gaussian measurement-noise sequence.

    Counter-based Philox4x32-10 generator keyed by the seed; row k is the
    k-th zero-mean draw, scaled per channel by std_vector.
    """
    std = np.atleast_1d(np.asarray(std_vector, dtype=float))
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    return rng.standard_normal((count, std.size)) * std


@dataclass
class SimConfig:
    """Run settings for one closed- or open-loop simulation."""

    initial_state: np.ndarray
    duration: float
    step: float = 1e-3
    integrator: str = "rk4"
    noise_std: float = 0.0  # scalar or per-channel vector
    rng_seed: int = 0
    controller: str = "closed-loop"
    feedforward: str = "mixed"
    sample_interval: float = 1e-2
    convergence_threshold: float = 0.01

    def __post_init__(self):
        self.initial_state = np.asarray(self.initial_state, dtype=float)
        if self.duration <= 0.0:
            raise ValueError("duration must be positive")
        if self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.sample_interval <= 0.0:
            raise ValueError("sample_interval must be positive")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator: {self.integrator!r}")
        if self.controller not in CONTROLLERS:
            raise ValueError(f"unknown controller: {self.controller!r}")

    def noise_vector(self, n):
        std = np.atleast_1d(np.asarray(self.noise_std, dtype=float))
        if std.size == 1:
            std = np.full(n, std[0])
        if std.size != n:
            raise ValueError(f"noise_std must be scalar or length {n}")
        if np.any(std < 0.0):
            raise ValueError("noise_std must be nonnegative")
        return std


@dataclass
class SimulationTrace:
    """Uniformly sampled closed-loop records plus run metadata."""

    t: np.ndarray
    x: np.ndarray  # true state, (N, 2 n_q)
    x_measured: np.ndarray
    s: np.ndarray
    x_perp: np.ndarray
    u: np.ndarray  # (N, n_u)
    v: np.ndarray
    V: np.ndarray  # transverse certificate x_perp^T R x_perp
    norm_x_perp: np.ndarray
    convergence_time: float = None
    config: SimConfig = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.t.size


class OrbitStabilizingController:
    """u = B^dagger Uhat(x_m, s) + v with v = K(s) x_perp.

    The feedforward inverts the constrained dynamics at the measured state
    and projected phase; the transverse feedback reads the Riccati gain
    schedule at the same phase.  Purely a function of the measurement.
    """

    def __init__(self, sys, orbit, op, gains, feedforward="mixed"):
        self.sys = sys
        self.orbit = orbit
        self.op = op
        self.gains = gains
        self.feedforward = feedforward

    def __call__(self, x_m, hint=None):
        proj = self.op.project(x_m, hint=hint)
        u_ff = nominal_feedback_input(
            self.sys, self.orbit, self.feedforward, x_m, proj.s
        )
        v = self.gains.feedback(proj.s, proj.x_perp)
        return u_ff + v, v, proj.s, proj.x_perp


class OpenLoopReplay:
    """Nominal input replay u_*(s_*(t)); carries the phase clock."""

    def __init__(self, sys, orbit, feedforward="mixed"):
        self.sys = sys
        self.orbit = orbit
        self.feedforward = feedforward

    def phase_clock(self, s0, t_grid):
        """Integrate ds/dt = rho(s) from s0 over the control grid."""
        sol = solve_ivp(
            lambda t, s: [self.orbit.profile.rho(wrap_phase(s[0]))],
            (t_grid[0], t_grid[-1]),
            [s0],
            t_eval=t_grid,
            method="DOP853",
            rtol=1e-10,
            atol=1e-12,
        )
        return sol.y[0]

    def input_at(self, s):
        s = wrap_phase(s)
        return nominal_feedback_input(
            self.sys, self.orbit, self.feedforward, self.orbit.state(s), s
        )


def _convergence_time(t, norm_x_perp, threshold, period):
    """First sample time from which the norm stays below threshold over at
    least one full period."""
    below = norm_x_perp < threshold
    n = t.size
    bad = np.cumsum(~below)
    ends = np.searchsorted(t, t + period - 1e-12, side="left")
    for i in range(n):
        j = ends[i]
        if j >= n:
            break
        if not below[i]:
            continue
        n_bad = bad[j] - (bad[i - 1] if i else 0)
        if n_bad == 0:
            return float(t[i])
    return None


def simulate(sys, orbit, op, gains, cfg):
    """Integrate the plant under the configured controller.

    Returns a SimulationTrace sampled at cfg.sample_interval.  Raises
    EscapedTubeError (carrying the partial trace) when the projection
    stops converging mid-run and NumericBlowupError when the state
    diverges beyond representable bounds.
    """
    n = 2 * sys.n_q
    x = np.array(cfg.initial_state, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"initial state must have length {n}")
    std = cfg.noise_vector(n)
    if cfg.controller == "closed-loop" and gains is None:
        raise ValueError("closed-loop control requires a gain schedule")

    steps_per_sample = max(1, round(cfg.sample_interval / cfg.step))
    dt = cfg.sample_interval / steps_per_sample
    n_samples = int(round(cfg.duration / cfg.sample_interval))

    # One noise draw per sample interval, held between records.
    n_draws = n_samples + 1
    if np.any(std > 0.0):
        noise = noise_stream(cfg.rng_seed, std, n_draws)
    else:
        noise = np.zeros((n_draws, n))

    if cfg.controller == "closed-loop":
        control = OrbitStabilizingController(
            sys, orbit, op, gains, cfg.feedforward
        )
        replay_phase = None
    elif cfg.controller == "open-loop":
        control = OpenLoopReplay(sys, orbit, cfg.feedforward)
        p0 = op.project(x)
        if cfg.integrator == "rk4":
            clock = np.arange(n_samples * steps_per_sample + 1) * dt
        else:
            clock = np.arange(n_samples + 1) * cfg.sample_interval
        replay_phase = control.phase_clock(p0.s, clock)
    else:
        control = None
        replay_phase = None

    n_u = sys.n_u
    n_rec = n_samples + 1
    rec_t = np.zeros(n_rec)
    rec_x = np.zeros((n_rec, n))
    rec_xm = np.zeros((n_rec, n))
    rec_s = np.zeros(n_rec)
    rec_xp = np.zeros((n_rec, n))
    rec_u = np.zeros((n_rec, n_u))
    rec_v = np.zeros((n_rec, n_u))
    rec_V = np.zeros(n_rec)
    rec_norm = np.zeros(n_rec)

    hint = None

    def partial(k):
        return SimulationTrace(
            t=rec_t[:k],
            x=rec_x[:k],
            x_measured=rec_xm[:k],
            s=rec_s[:k],
            x_perp=rec_xp[:k],
            u=rec_u[:k],
            v=rec_v[:k],
            V=rec_V[:k],
            norm_x_perp=rec_norm[:k],
            config=cfg,
        )

    def controller_fields(x_m, draw):
        """Input and projected quantities at one control update."""
        nonlocal hint
        if cfg.controller == "closed-loop":
            u, v, s, x_perp = control(x_m, hint=hint)
        else:
            proj = op.project(x_m, hint=hint)
            s, x_perp = proj.s, proj.x_perp
            v = np.zeros(n_u)
            if cfg.controller == "open-loop":
                u = control.input_at(replay_phase[draw])
            else:
                u = np.zeros(n_u)
        hint = s
        return u, v, s, x_perp

    def record(k, t, x, x_m, s, x_perp, u, v):
        rec_t[k] = t
        rec_x[k] = x
        rec_xm[k] = x_m
        rec_s[k] = s
        rec_xp[k] = x_perp
        rec_u[k] = u
        rec_v[k] = v
        rec_V[k] = gains.value(s, x_perp) if gains is not None else np.nan
        rec_norm[k] = np.linalg.norm(x_perp)

    def check_state(x, t):
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > _BLOWUP_NORM:
            raise NumericBlowupError(f"state diverged at t = {t:.3f}")

    k_rec = 0
    try:
        x_m = x + noise[0]
        u, v, s, x_perp = controller_fields(x_m, 0)
        record(0, 0.0, x, x_m, s, x_perp, u, v)
        k_rec = 1

        if cfg.integrator == "rk4":
            for k in range(n_samples):
                offset = noise[k]
                for j in range(steps_per_sample):
                    t = (k * steps_per_sample + j) * dt
                    if cfg.controller == "closed-loop":

                        def rhs(xs):
                            u_s, _, _, _ = control(xs + offset, hint=hint)
                            return forward_dynamics(sys, xs, u_s)

                    else:
                        if cfg.controller == "open-loop":
                            step_idx = k * steps_per_sample + j
                            u_held = control.input_at(replay_phase[step_idx])
                        else:
                            u_held = np.zeros(n_u)

                        def rhs(xs):
                            return forward_dynamics(sys, xs, u_held)

                    k1 = rhs(x)
                    k2 = rhs(x + 0.5 * dt * k1)
                    k3 = rhs(x + 0.5 * dt * k2)
                    k4 = rhs(x + dt * k3)
                    x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                    check_state(x, t + dt)
                t = (k + 1) * cfg.sample_interval
                x_m = x + noise[k + 1]
                u, v, s, x_perp = controller_fields(
                    x_m, (k + 1) * steps_per_sample
                )
                record(k_rec, t, x, x_m, s, x_perp, u, v)
                k_rec += 1
        else:
            u_held = u
            for k in range(n_samples):
                t0 = k * cfg.sample_interval
                if cfg.controller == "closed-loop":
                    offset = noise[k]

                    def rhs(tt, xs):
                        u_s, _, _, _ = control(xs + offset, hint=hint)
                        return forward_dynamics(sys, xs, u_s)

                else:

                    def rhs(tt, xs):
                        return forward_dynamics(sys, xs, u_held)

                sol = solve_ivp(
                    rhs,
                    (t0, t0 + cfg.sample_interval),
                    x,
                    method="RK45",
                    rtol=1e-8,
                    atol=1e-10,
                )
                if not sol.success:
                    raise NumericBlowupError(
                        f"integration failed at t = {t0:.3f}: {sol.message}"
                    )
                x = sol.y[:, -1]
                check_state(x, t0 + cfg.sample_interval)
                t = (k + 1) * cfg.sample_interval
                x_m = x + noise[k + 1]
                u, v, s, x_perp = controller_fields(x_m, k + 1)
                record(k_rec, t, x, x_m, s, x_perp, u, v)
                k_rec += 1
                u_held = u
    except ProjectionError as exc:
        t_fail = rec_t[k_rec - 1] if k_rec > 0 else 0.0
        raise EscapedTubeError(
            f"projection stopped converging near t = {t_fail:.3f}: {exc}",
            partial_trace=partial(k_rec) if k_rec > 0 else None,
        ) from exc

    trace = partial(n_rec)
    trace.convergence_time = _convergence_time(
        trace.t,
        trace.norm_x_perp,
        cfg.convergence_threshold,
        orbit.profile.period,
    )
    trace.meta = {
        "integrator": cfg.integrator,
        "controller": cfg.controller,
        "steps_per_sample": steps_per_sample,
        "noise_draws": int(n_draws),
    }
    return trace
