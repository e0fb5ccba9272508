import numpy as np
import numpy.testing as npt
import pytest

from orbistab.linearization import (
    build_transverse_linearization,
    transverse_jacobian_fd,
    transverse_rate_defect,
)
from orbistab.orbit import TWO_PI

rng = np.random.default_rng(31)

PROBE_PHASES = (0.9, 2.5, 4.8)


def test_first_order_consistency(cart, orbit, op, tv):
    # defect of a transverse perturbation shrinks quadratically
    eps_grid = np.array([1e-2, 1e-3, 1e-4])
    for s in PROBE_PHASES:
        d = tv.Omega(s) @ rng.standard_normal(4)
        d /= np.linalg.norm(d)
        defects = np.array(
            [
                transverse_rate_defect(cart, orbit, op, tv, s, d, eps)
                for eps in eps_grid
            ]
        )
        slope = np.polyfit(np.log10(eps_grid), np.log10(defects), 1)[0]
        assert slope >= 1.8


def test_input_direction_consistency(cart, orbit, op, tv):
    # including a transverse input v of size eps keeps the defect quadratic
    for s in PROBE_PHASES:
        d = tv.Omega(s) @ rng.standard_normal(4)
        d /= np.linalg.norm(d)
        defects = []
        for eps in (1e-2, 1e-3):
            v = np.array([0.7 * eps])
            defects.append(
                transverse_rate_defect(cart, orbit, op, tv, s, d, eps, v=v)
            )
        assert defects[0] / defects[1] > 10 ** 1.8


def test_analytic_matches_fd_route_modulo_projection(cart, orbit, op, tv):
    for s in PROBE_PHASES:
        _, A_fd = transverse_jacobian_fd(cart, orbit, op, "mixed", s)
        Om = tv.Omega(s)
        assert np.linalg.norm(Om @ (tv.A(s) - A_fd) @ Om) < 1e-6


def test_tangent_is_exact_solution(orbit, tv):
    # the default representative transports x_s' onto x_s'' rho
    for s in np.linspace(0.0, TWO_PI, 32, endpoint=False):
        defect = tv.A(s) @ orbit.state_prime(s) - orbit.state_second(s) * tv.rho(s)
        assert np.linalg.norm(defect) < 1e-5


def test_b_field_annihilated_by_dp(tv):
    for s in np.linspace(0.0, TWO_PI, 32, endpoint=False):
        assert np.linalg.norm(tv.DP(s) @ tv.B(s)) < 1e-9


def test_node_fields_periodic(tv):
    npt.assert_allclose(tv.A(0.0), tv.A(TWO_PI), atol=1e-10)
    npt.assert_allclose(tv.B(0.0), tv.B(TWO_PI), atol=1e-10)
    npt.assert_allclose(tv.Omega(0.0), tv.Omega(TWO_PI), atol=1e-10)


def test_representatives_agree_on_transverse_subspace(cart, orbit, op, tv):
    other = build_transverse_linearization(
        cart, orbit, op, representative="annihilating"
    )
    for s in PROBE_PHASES:
        Om = tv.Omega(s)
        diff = Om @ (tv.A(s) - other.A(s)) @ Om
        assert np.linalg.norm(diff) < 1e-8


def test_feedforward_variants_share_transverse_block(cart, orbit, op, tv):
    # the physical transverse dynamics cannot depend on how the nominal
    # force is extended off the orbit
    for ff in ("on-orbit", "full"):
        alt = build_transverse_linearization(cart, orbit, op, feedforward=ff)
        for s in PROBE_PHASES:
            Om = tv.Omega(s)
            diff = Om @ (tv.A(s) - alt.A(s)) @ Om
            assert np.linalg.norm(diff) < 1e-6


def test_unknown_options_rejected(cart, orbit, op):
    with pytest.raises(ValueError):
        build_transverse_linearization(cart, orbit, op, feedforward="frozen")
    with pytest.raises(ValueError):
        build_transverse_linearization(cart, orbit, op, representative="exact")
