"""Run configuration for the command-line pipeline.

A run is described by one JSON document with a ``spec_version`` field and
six sections; every key has a default, unknown keys are rejected, and all
physical scalars must be finite.  ``load_config`` returns the validated
document with defaults filled in; the ``build_*`` helpers turn sections
into library objects.
"""

import json
import math

import numpy as np

from .errors import ConfigError
from .linearization import build_transverse_linearization
from .mechanics import cart_pendulum
from .orbit import plan_orbit, upright_oscillation_curve
from .projection import make_projection
from .riccati import SolverConfig
from .simulation import CONTROLLERS, INTEGRATORS, SimConfig

SPEC_VERSION = 1

DEFAULTS = {
    "system": {"name": "cart_pendulum", "parameters": {"gravity": 9.81}},
    "orbit": {"template": "eq15", "a2": 0.1129, "grid": 2048},
    "projection": {"variant": "implicit-phase", "tol": 1e-12, "max_iter": 50},
    "linearization": {"feedforward": "mixed", "grid": 512},
    "riccati": {
        "Q": 1.0,
        "Gamma": 0.1,
        "kappa": 0.1,
        "fourier_order": 40,
        "residual_tol": 2e-4,
    },
    "simulation": {
        "initial_state": [0.1, 0.4, -0.1, -0.2],
        "duration": 20.0,
        "step": 1e-3,
        "integrator": "rk4",
        "noise_std": 1e-3,
        "seed": 0,
        "controller": "closed-loop",
        "sample_interval": 1e-2,
        "convergence_threshold": 0.01,
    },
}

_ENUMS = {
    ("system", "name"): ("cart_pendulum",),
    ("orbit", "template"): ("eq15",),
    ("projection", "variant"): ("implicit-phase", "min-distance"),
    ("linearization", "feedforward"): ("on-orbit", "mixed", "full"),
    ("simulation", "integrator"): INTEGRATORS,
    ("simulation", "controller"): CONTROLLERS,
}

_POSITIVE = {
    ("orbit", "grid"),
    ("projection", "tol"),
    ("projection", "max_iter"),
    ("linearization", "grid"),
    ("riccati", "fourier_order"),
    ("riccati", "residual_tol"),
    ("simulation", "duration"),
    ("simulation", "step"),
    ("simulation", "sample_interval"),
    ("simulation", "convergence_threshold"),
    ("system", "gravity"),
}

_INTEGERS = {
    ("orbit", "grid"),
    ("projection", "max_iter"),
    ("linearization", "grid"),
    ("riccati", "fourier_order"),
    ("simulation", "seed"),
}


def _fail(path, msg):
    raise ConfigError(f"config {path}: {msg}")


def _check_finite(path, value):
    flat = np.asarray(value, dtype=float).ravel()
    if not np.all(np.isfinite(flat)):
        _fail(path, "value must be finite")


def _check_scalar(section, key, value):
    path = f"{section}.{key}"
    enum = _ENUMS.get((section, key))
    if enum is not None:
        if value not in enum:
            _fail(path, f"must be one of {list(enum)}")
        return value
    if (section, key) in _INTEGERS:
        if not isinstance(value, int) or isinstance(value, bool):
            _fail(path, "must be an integer")
    elif isinstance(value, (list, dict, str, bool)):
        if key in ("Q", "Gamma", "initial_state", "noise_std", "parameters"):
            return value  # structured values validated by their builders
        _fail(path, "must be a number")
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if not math.isfinite(float(value)):
            _fail(path, "must be finite")
        if (section, key) in _POSITIVE and float(value) <= 0.0:
            _fail(path, "must be positive")
    return value


def _merge_section(name, given):
    defaults = DEFAULTS[name]
    if not isinstance(given, dict):
        _fail(name, "section must be a JSON object")
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        _fail(name, f"unknown keys {unknown}")
    merged = {}
    for key, default in defaults.items():
        value = given.get(key, default)
        if name == "system" and key == "parameters":
            if not isinstance(value, dict):
                _fail("system.parameters", "must be a JSON object")
            bad = sorted(set(value) - {"gravity"})
            if bad:
                _fail("system.parameters", f"unknown keys {bad}")
            value = {"gravity": value.get("gravity", 9.81)}
            _check_scalar("system", "gravity", value["gravity"])
        else:
            _check_scalar(name, key, value)
        merged[key] = value
    return merged


def validate_config(doc):
    """Validated copy of a raw configuration document, defaults filled."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    version = doc.get("spec_version")
    if version != SPEC_VERSION:
        raise ConfigError(
            f"config spec_version must be {SPEC_VERSION}, got {version!r}"
        )
    unknown = sorted(set(doc) - set(DEFAULTS) - {"spec_version"})
    if unknown:
        raise ConfigError(f"config: unknown sections {unknown}")
    out = {"spec_version": SPEC_VERSION}
    for name in DEFAULTS:
        out[name] = _merge_section(name, doc.get(name, {}))
    # cross-field checks on the structured values
    _as_weight_matrix(out["riccati"]["Q"], 4, "riccati.Q")
    _as_weight_matrix(out["riccati"]["Gamma"], 1, "riccati.Gamma")
    state = out["simulation"]["initial_state"]
    if not isinstance(state, list) or len(state) != 4:
        raise ConfigError("config simulation.initial_state: must be 4 numbers")
    _check_finite("simulation.initial_state", state)
    std = out["simulation"]["noise_std"]
    if isinstance(std, list) and len(std) != 4:
        raise ConfigError("config simulation.noise_std: must be scalar or 4 numbers")
    _check_finite("simulation.noise_std", std)
    if np.any(np.asarray(std, dtype=float) < 0.0):
        raise ConfigError("config simulation.noise_std: must be nonnegative")
    if out["riccati"]["kappa"] < 0.0:
        raise ConfigError("config riccati.kappa: must be nonnegative")
    return out


def load_config(path):
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(doc), raw.encode()


def _as_weight_matrix(value, n, path):
    """Scalar -> scaled identity, vector -> diagonal, matrix -> as given."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        _check_finite(path, value)
        return float(value) * np.eye(n)
    arr = np.asarray(value, dtype=float)
    _check_finite(path, arr)
    if arr.shape == (n,):
        return np.diag(arr)
    if arr.shape == (n, n):
        return arr
    _fail(path, f"must be a scalar, length-{n} diagonal, or {n}x{n} matrix")


def build_system(cfg):
    return cart_pendulum(gravity=cfg["system"]["parameters"]["gravity"])


def build_orbit(sys, cfg):
    section = cfg["orbit"]
    curve = upright_oscillation_curve(section["a2"])
    return plan_orbit(sys, curve, grid=section["grid"])


def build_projection(orbit, cfg):
    section = cfg["projection"]
    return make_projection(
        section["variant"],
        orbit,
        tol=section["tol"],
        max_iter=section["max_iter"],
    )


def build_linearization(sys, orbit, op, cfg):
    section = cfg["linearization"]
    return build_transverse_linearization(
        sys, orbit, op, feedforward=section["feedforward"], grid=section["grid"]
    )


def build_solver_config(cfg):
    section = cfg["riccati"]
    return SolverConfig(
        Q=_as_weight_matrix(section["Q"], 4, "riccati.Q"),
        Gamma=_as_weight_matrix(section["Gamma"], 1, "riccati.Gamma"),
        kappa=section["kappa"],
        fourier_order=section["fourier_order"],
        residual_tol=section["residual_tol"],
    )


def build_sim_config(cfg, seed=None):
    section = cfg["simulation"]
    return SimConfig(
        initial_state=np.asarray(section["initial_state"], dtype=float),
        duration=section["duration"],
        step=section["step"],
        integrator=section["integrator"],
        noise_std=section["noise_std"],
        rng_seed=section["seed"] if seed is None else seed,
        controller=section["controller"],
        feedforward=cfg["linearization"]["feedforward"],
        sample_interval=section["sample_interval"],
        convergence_threshold=section["convergence_threshold"],
    )
