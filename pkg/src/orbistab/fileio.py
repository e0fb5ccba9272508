"""CSV and JSON artifact formats shared by the command-line pipeline.

All floating point values are written with 17 significant digits so that
float64 round-trips exactly; loaders therefore rebuild objects that are
bit-identical to the ones that produced the files.  Every primary output
gets a JSON sidecar (same filename plus ``.json``) carrying the config
hash and tool version, with no timestamps, so reruns are byte-identical.
"""

import csv
import hashlib
import json

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError
from .orbit import TWO_PI, VelocityProfile, nominal_input

FLOAT_FMT = "%.17g"


def config_digest(config_bytes):
    """Hex SHA-256 of the raw configuration file bytes."""
    return hashlib.sha256(config_bytes).hexdigest()


def write_json(path, obj):
    """Deterministic JSON dump: sorted keys, two-space indent."""
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_sidecar(path, config_sha, tool_version, extra=None):
    meta = {"config_sha256": config_sha, "tool_version": tool_version}
    if extra:
        meta.update(extra)
    write_json(str(path) + ".json", meta)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([FLOAT_FMT % v for v in row])


def read_csv(path):
    """Header list and float matrix of a CSV written by write_csv."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty CSV")
        data = [[float(v) for v in row] for row in reader if row]
    return header, np.asarray(data, dtype=float)


ORBIT_HEADER = ["s", "phi1", "phi2", "dphi1", "dphi2", "rho", "u_star"]


def save_orbit_csv(sys, orbit, path):
    """One row per velocity-profile grid node."""
    rows = []
    for s in orbit.profile.s_grid:
        phi = orbit.curve.value(s)
        dphi = orbit.curve.d1(s)
        rows.append(
            [s, *phi, *dphi, orbit.profile.rho(s), nominal_input(sys, orbit, s)[0]]
        )
    write_csv(path, ORBIT_HEADER, rows)


def load_velocity_profile(path):
    """Rebuild the velocity profile from an orbit CSV's (s, rho) nodes.

    The profile's evaluation spline depends only on the squared-speed node
    values, so the reconstruction is exact.
    """
    header, data = read_csv(path)
    if header[: len(ORBIT_HEADER)] != ORBIT_HEADER:
        raise ConfigError(f"{path}: unexpected orbit CSV header {header}")
    s_grid = data[:, 0]
    z = data[:, header.index("rho")] ** 2
    s_ext = np.append(s_grid, TWO_PI)
    z_ext = np.append(z, z[0])
    dz = CubicSpline(s_ext, z_ext, bc_type="periodic").derivative()(s_grid)
    return VelocityProfile(s_grid, z, dz)


def linearization_header(n, n_u):
    cols = ["s"]
    cols += [f"A[{i}][{j}]" for i in range(n) for j in range(n)]
    cols += [f"B[{i}][{j}]" for i in range(n) for j in range(n_u)]
    return cols


def save_linearization_csv(tv, path):
    """Transverse coefficient fields at the build nodes, row-major."""
    rows = []
    for k, s in enumerate(tv.s_nodes):
        rows.append(
            [s, *tv.A_nodes[k].ravel(), *tv.B_nodes[k].ravel()]
        )
    write_csv(path, linearization_header(tv.n, tv.n_u), rows)


def load_linearization_nodes(path, n, n_u):
    header, data = read_csv(path)
    if header != linearization_header(n, n_u):
        raise ConfigError(f"{path}: unexpected linearization CSV header")
    s = data[:, 0]
    A = data[:, 1 : 1 + n * n].reshape(-1, n, n)
    B = data[:, 1 + n * n :].reshape(-1, n, n_u)
    return s, A, B


GAIN_HEADER = ["entry_i", "entry_j", "harmonic", "cos_coef", "sin_coef"]


def save_gain_csv(gains, path):
    """Fourier coefficients of the symmetric Riccati solution R(s).

    Row (i, j, h) stores the cos(h s) and sin(h s) coefficients of entry
    R[i][j]; harmonic 0 is the constant term with a zero sin column.
    """
    rows = []
    pairs = [(i, j) for i in range(gains.n) for j in range(i, gains.n)]
    for p, (i, j) in enumerate(pairs):
        rows.append([i, j, 0, gains.coef[p, 0], 0.0])
        for h in range(1, gains.fourier_order + 1):
            rows.append(
                [i, j, h, gains.coef[p, 2 * h - 1], gains.coef[p, 2 * h]]
            )
    write_csv(path, GAIN_HEADER, rows)


def load_gain_coefficients(path, n, fourier_order):
    """Rebuild the (n_sym, 2 order + 1) coefficient matrix exactly."""
    header, data = read_csv(path)
    if header != GAIN_HEADER:
        raise ConfigError(f"{path}: unexpected gain CSV header {header}")
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    index = {pair: p for p, pair in enumerate(pairs)}
    coef = np.zeros((len(pairs), 2 * fourier_order + 1))
    seen = 0
    for row in data:
        i, j, h = int(row[0]), int(row[1]), int(row[2])
        if (i, j) not in index or h > fourier_order:
            raise ConfigError(f"{path}: entry ({i},{j}) harmonic {h} out of range")
        p = index[(i, j)]
        if h == 0:
            coef[p, 0] = row[3]
        else:
            coef[p, 2 * h - 1] = row[3]
            coef[p, 2 * h] = row[4]
        seen += 1
    expected = len(pairs) * (fourier_order + 1)
    if seen != expected:
        raise ConfigError(
            f"{path}: expected {expected} coefficient rows, found {seen}"
        )
    return coef


def trace_header(n, n_u):
    cols = ["t"]
    cols += [f"x{i + 1}" for i in range(n)]
    cols += ["s"]
    cols += [f"xp{i + 1}" for i in range(n)]
    if n_u == 1:
        cols += ["u", "v"]
    else:
        cols += [f"u{i + 1}" for i in range(n_u)]
        cols += [f"v{i + 1}" for i in range(n_u)]
    cols += ["V", "normxp"]
    return cols


def save_trace_csv(trace, path):
    n = trace.x.shape[1]
    n_u = trace.u.shape[1]
    rows = np.column_stack(
        [
            trace.t,
            trace.x,
            trace.s,
            trace.x_perp,
            trace.u,
            trace.v,
            trace.V,
            trace.norm_x_perp,
        ]
    )
    write_csv(path, trace_header(n, n_u), rows)
