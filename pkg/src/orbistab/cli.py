"""Command-line frontend for the planning / control pipeline.

Subcommands run the stages in order, exchanging CSV artifacts through the
output directory: ``plan`` writes the orbit, ``linearize`` the transverse
coefficient fields, ``riccati`` the gain schedule, ``simulate`` a
closed-loop trace with plot files, and ``verify`` the full property
battery with a JSON report.  Exit codes: 0 success, 2 configuration or
missing-artifact error, 3 infeasible orbit, 4 verification failure,
5 numeric blowup during simulation.
"""

import argparse
import os
import sys as _sys

import numpy as np

from . import __version__, fileio, svg
from .config import (
    build_linearization,
    build_orbit,
    build_projection,
    build_sim_config,
    build_solver_config,
    build_system,
    load_config,
)
from .errors import (
    ConfigError,
    EscapedTubeError,
    InfeasibleOrbitError,
    NoCertificateError,
    NumericBlowupError,
    OrbistabError,
    PsdFloorError,
    VerificationFailedError,
)
from .orbit import OrbitParameterization, upright_oscillation_curve
from .riccati import (
    GainSchedule,
    floquet_multipliers,
    lyapunov_rate_fd,
    lyapunov_rate_matrix,
    projected_residual,
    replay_floquet_multipliers,
)
from .linearization import transverse_rate_defect
from .simulation import simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY = 4
EXIT_BLOWUP = 5

_VERIFY_GRID = 512
_RESIDUAL_GRID = 2048
_LYAPUNOV_SAMPLES = 1000


def _message(quiet, text):
    if not quiet:
        print(text)


def _load_stage(args):
    """Shared setup: config, output directory, sidecar metadata."""
    cfg, raw = load_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    os.makedirs(os.path.join(args.out, "plots"), exist_ok=True)
    sha = fileio.config_digest(raw)
    return cfg, sha


def _sidecar(path, sha, command):
    fileio.write_sidecar(path, sha, __version__, {"command": command})


def _require(out_dir, filename, what):
    path = os.path.join(out_dir, filename)
    if not os.path.exists(path):
        raise ConfigError(f"missing {what} ({filename} not found in {out_dir})")
    return path


def _loaded_orbit(cfg, out_dir):
    """Orbit rebuilt from the planned CSV nodes plus the config's curve."""
    path = _require(out_dir, "orbit.csv", "orbit data")
    curve = upright_oscillation_curve(cfg["orbit"]["a2"])
    return OrbitParameterization(curve, fileio.load_velocity_profile(path))


def _loaded_gains(cfg, tv, out_dir):
    path = _require(out_dir, "gains.csv", "gain schedule")
    solver = build_solver_config(cfg)
    n = tv.n
    Q, Gamma = solver.resolved_weights(n, tv.n_u)
    coef = fileio.load_gain_coefficients(path, n, solver.fourier_order)
    return GainSchedule(
        coef=coef,
        fourier_order=solver.fourier_order,
        n=n,
        Q=Q,
        Gamma=Gamma,
        kappa=solver.kappa,
        tv=tv,
    )


def cmd_plan(args):
    cfg, sha = _load_stage(args)
    sys_ = build_system(cfg)
    orbit = build_orbit(sys_, cfg)
    orbit_path = os.path.join(args.out, "orbit.csv")
    fileio.save_orbit_csv(sys_, orbit, orbit_path)
    _sidecar(orbit_path, sha, "plan")

    s = orbit.profile.s_grid
    rho = orbit.profile.rho_grid
    rho_path = os.path.join(args.out, "rho_fig2.csv")
    fileio.write_csv(rho_path, ["s", "rho"], np.column_stack([s, rho]))
    _sidecar(rho_path, sha, "plan")

    chart = os.path.join(args.out, "plots", "rho.svg")
    svg.write_chart(
        chart,
        [("rho", s, rho)],
        title="Phase speed profile",
        xlabel="s",
        ylabel="rho",
    )
    _sidecar(chart, sha, "plan")
    _message(args.quiet, f"planned orbit: period {orbit.period:.6f} s")
    return EXIT_OK


def cmd_linearize(args):
    cfg, sha = _load_stage(args)
    sys_ = build_system(cfg)
    orbit = _loaded_orbit(cfg, args.out)
    op = build_projection(orbit, cfg)
    tv = build_linearization(sys_, orbit, op, cfg)
    path = os.path.join(args.out, "linearization.csv")
    fileio.save_linearization_csv(tv, path)
    _sidecar(path, sha, "linearize")
    _message(
        args.quiet,
        f"linearized on {tv.s_nodes.size} nodes "
        f"({cfg['linearization']['feedforward']} feedforward)",
    )
    return EXIT_OK


def cmd_riccati(args):
    cfg, sha = _load_stage(args)
    sys_ = build_system(cfg)
    orbit = _loaded_orbit(cfg, args.out)
    _require(args.out, "linearization.csv", "transverse linearization")
    op = build_projection(orbit, cfg)
    tv = build_linearization(sys_, orbit, op, cfg)
    solver = build_solver_config(cfg)
    from .riccati import solve_projected_riccati

    gains = solve_projected_riccati(tv, solver)
    gains_path = os.path.join(args.out, "gains.csv")
    fileio.save_gain_csv(gains, gains_path)
    _sidecar(gains_path, sha, "riccati")

    summary = {
        "achieved_residual": float(np.max(gains.residual_profile)),
        "multipliers_abs": sorted(
            float(a) for a in np.abs(gains.multipliers)
        ),
        "fourier_order": int(gains.fourier_order),
        "config": {
            "Q": np.asarray(gains.Q).tolist(),
            "Gamma": np.asarray(gains.Gamma).tolist(),
            "kappa": float(gains.kappa),
            "residual_tol": float(solver.residual_tol),
        },
    }
    summary_path = os.path.join(args.out, "schedule.json")
    fileio.write_json(summary_path, summary)
    _sidecar(summary_path, sha, "riccati")
    _message(
        args.quiet,
        f"gain schedule certified: residual {summary['achieved_residual']:.3e}",
    )
    return EXIT_OK


def cmd_simulate(args):
    cfg, sha = _load_stage(args)
    sys_ = build_system(cfg)
    orbit = _loaded_orbit(cfg, args.out)
    op = build_projection(orbit, cfg)
    tv = build_linearization(sys_, orbit, op, cfg)
    gains = _loaded_gains(cfg, tv, args.out)
    sim_cfg = build_sim_config(cfg, seed=args.seed)
    trace = simulate(sys_, orbit, op, gains, sim_cfg)

    trace_path = os.path.join(args.out, "trace.csv")
    fileio.save_trace_csv(trace, trace_path)
    _sidecar(trace_path, sha, "simulate")

    plots = [
        (
            "phase_portraits.svg",
            [
                ("cart", trace.x[:, 0], trace.x[:, 2]),
                ("pendulum", trace.x[:, 1], trace.x[:, 3]),
            ],
            "Phase portraits",
            "position",
            "velocity",
        ),
        (
            "transverse_norm.svg",
            [("", trace.t, trace.norm_x_perp)],
            "Transverse error",
            "t [s]",
            "norm of x_perp",
        ),
        (
            "input.svg",
            [
                ("u", trace.t, trace.u[:, 0]),
                ("v", trace.t, trace.v[:, 0]),
            ],
            "Control input",
            "t [s]",
            "force",
        ),
    ]
    for filename, series, title, xlabel, ylabel in plots:
        path = os.path.join(args.out, "plots", filename)
        svg.write_chart(path, series, title=title, xlabel=xlabel, ylabel=ylabel)
        _sidecar(path, sha, "simulate")

    if trace.convergence_time is None:
        _message(args.quiet, "simulation finished without convergence")
    else:
        _message(
            args.quiet,
            f"simulation converged at t = {trace.convergence_time:.2f} s",
        )
    return EXIT_OK


def _verify_checks(cfg, sys_, orbit, op, tv, gains, solver):
    """Full property battery; returns a list of check dicts."""
    checks = []

    def add(name, measured, threshold, op_str):
        passed = measured <= threshold if op_str == "<=" else measured >= threshold
        checks.append(
            {
                "name": name,
                "measured": float(measured),
                "threshold": float(threshold),
                "comparison": op_str,
                "passed": bool(passed),
            }
        )

    s_grid = np.linspace(0.0, 2.0 * np.pi, _VERIFY_GRID, endpoint=False)
    n = tv.n
    worst = {
        "idem": 0.0,
        "dpom": 0.0,
        "tang": 0.0,
        "rank": 0.0,
        "dpxs": 0.0,
        "recover": 0.0,
    }
    for s in s_grid:
        DP = op.dP_on_orbit(s)
        xsp = orbit.state_prime(s)
        Om = np.eye(n) - np.outer(xsp, DP)
        worst["idem"] = max(worst["idem"], np.linalg.norm(Om @ Om - Om))
        worst["dpom"] = max(worst["dpom"], np.linalg.norm(DP @ Om))
        worst["tang"] = max(worst["tang"], np.linalg.norm(Om @ xsp))
        worst["rank"] = max(
            worst["rank"], abs(np.linalg.matrix_rank(Om, tol=1e-8) - (n - 1))
        )
        worst["dpxs"] = max(worst["dpxs"], abs(DP @ xsp - 1.0))
        pr = op.project(orbit.state(s), hint=s)
        ds = abs((pr.s - s + np.pi) % (2.0 * np.pi) - np.pi)
        worst["recover"] = max(worst["recover"], ds)
    add("lemma1_idempotency", worst["idem"], 1e-10, "<=")
    add("lemma1_dp_omega", worst["dpom"], 1e-10, "<=")
    add("lemma1_omega_tangent", worst["tang"], 1e-10, "<=")
    add("lemma1_rank_deficiency", worst["rank"], 0.0, "<=")
    add("phase_gradient_tangent", worst["dpxs"], 1e-8, "<=")
    add("projection_recovery", worst["recover"], 1e-10, "<=")

    # first-order consistency: the defect of a transverse perturbation
    # must shrink quadratically with its size
    rng = np.random.default_rng(0)
    eps_grid = np.array([1e-2, 1e-3, 1e-4])
    min_order = np.inf
    for s in (0.9, 2.5, 4.8):
        d = tv.Omega(s) @ rng.standard_normal(n)
        d /= np.linalg.norm(d)
        defects = np.array(
            [
                transverse_rate_defect(sys_, orbit, op, tv, s, d, eps)
                for eps in eps_grid
            ]
        )
        slope = np.polyfit(np.log10(eps_grid), np.log10(defects), 1)[0]
        min_order = min(min_order, slope)
    add("linearization_order", min_order, 1.8, ">=")

    # Riccati residual on the dense grid
    dense = np.linspace(0.0, 2.0 * np.pi, _RESIDUAL_GRID, endpoint=False)
    res = max(
        np.linalg.norm(projected_residual(tv, gains, s)) for s in dense
    )
    add("riccati_residual", res, solver.residual_tol, "<=")

    # Floquet certificates
    closed = floquet_multipliers(tv, gains)
    add("floquet_closed_inside", closed.count_inside(), n - 1, ">=")
    _, neutral_mult, angle = closed.neutral(orbit.state_prime(0.0))
    add("floquet_neutral_error", abs(neutral_mult - 1.0), 1e-6, "<=")
    add("floquet_neutral_alignment", angle, 1e-3, "<=")
    replay = replay_floquet_multipliers(sys_, orbit)
    add(
        "floquet_replay_unstable",
        np.max(np.abs(replay.multipliers)),
        1.0 + 1e-6,
        ">=",
    )

    # Lyapunov decrease on random transverse samples
    worst_rate = -np.inf
    worst_rel = 0.0
    for _ in range(_LYAPUNOV_SAMPLES):
        s = rng.uniform(0.0, 2.0 * np.pi)
        d = rng.standard_normal(n)
        Om = tv.Omega(s)
        d = Om @ d
        d /= np.linalg.norm(d)
        closed_form = d @ lyapunov_rate_matrix(tv, gains, s) @ d
        worst_rate = max(worst_rate, closed_form)
        fd = lyapunov_rate_fd(tv, gains, s, d)
        worst_rel = max(
            worst_rel, abs(fd - closed_form) / max(abs(closed_form), 1e-12)
        )
    add("lyapunov_rate_negative", worst_rate, 0.0, "<=")
    add("lyapunov_fd_agreement", worst_rel, 1e-3, "<=")
    return checks


def cmd_verify(args):
    cfg, sha = _load_stage(args)
    sys_ = build_system(cfg)
    orbit = _loaded_orbit(cfg, args.out)
    op = build_projection(orbit, cfg)
    tv = build_linearization(sys_, orbit, op, cfg)
    gains = _loaded_gains(cfg, tv, args.out)
    solver = build_solver_config(cfg)

    checks = _verify_checks(cfg, sys_, orbit, op, tv, gains, solver)
    passed = all(c["passed"] for c in checks)
    report = {"passed": passed, "checks": checks}
    report_path = os.path.join(args.out, "verify_report.json")
    fileio.write_json(report_path, report)
    _sidecar(report_path, sha, "verify")

    for c in checks:
        state = "ok" if c["passed"] else "FAIL"
        _message(
            args.quiet,
            f"  {c['name']}: {c['measured']:.3e} {c['comparison']} "
            f"{c['threshold']:.3e} [{state}]",
        )
    if not passed:
        print("verification failed; see verify_report.json", file=_sys.stderr)
        return EXIT_VERIFY
    _message(args.quiet, f"all {len(checks)} checks passed")
    return EXIT_OK


_COMMANDS = {
    "plan": cmd_plan,
    "linearize": cmd_linearize,
    "riccati": cmd_riccati,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="orbistab",
        description="Orbital stabilization pipeline for underactuated systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=True, help="artifact directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the simulation RNG seed")
        p.add_argument("--quiet", action="store_true",
                       help="suppress progress output")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"orbistab {args.command}: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except InfeasibleOrbitError as exc:
        print(f"orbistab {args.command}: infeasible-orbit: {exc}",
              file=_sys.stderr)
        return EXIT_INFEASIBLE
    except (NoCertificateError, PsdFloorError, VerificationFailedError) as exc:
        print(f"orbistab {args.command}: {exc}", file=_sys.stderr)
        return EXIT_VERIFY
    except (EscapedTubeError, NumericBlowupError) as exc:
        print(f"orbistab {args.command}: {exc}", file=_sys.stderr)
        return EXIT_BLOWUP
    except OSError as exc:
        print(f"orbistab {args.command}: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except OrbistabError as exc:
        print(f"orbistab {args.command}: {exc}", file=_sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
