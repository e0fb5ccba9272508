import numpy as np
import numpy.testing as npt
import pytest

from orbistab import make_projection
from orbistab.orbit import TWO_PI
from orbistab.projection import MinDistanceProjection, PhaseProjection

rng = np.random.default_rng(23)


def phase_error(a, b):
    return abs((a - b + np.pi) % TWO_PI - np.pi)


def test_projection_recovers_phase_on_orbit(orbit, op):
    for s in np.linspace(0.0, TWO_PI, 64, endpoint=False):
        pr = op.project(orbit.state(s), hint=s)
        assert phase_error(pr.s, s) < 1e-10
        assert np.linalg.norm(pr.x_perp) < 1e-10


def test_projection_without_hint(orbit, op):
    for s in (0.1, 1.3, 3.0, 5.5):
        pr = op.project(orbit.state(s))
        assert phase_error(pr.s, s) < 1e-10


def test_lemma1_identities(orbit, op):
    n = 4
    s_grid = np.linspace(0.0, TWO_PI, 512, endpoint=False)
    for s in s_grid:
        DP = op.dP_on_orbit(s)
        xsp = orbit.state_prime(s)
        Om = np.eye(n) - np.outer(xsp, DP)
        assert np.linalg.norm(Om @ Om - Om) < 1e-10
        assert np.linalg.norm(DP @ Om) < 1e-10
        assert np.linalg.norm(Om @ xsp) < 1e-10
        assert np.linalg.matrix_rank(Om, tol=1e-8) == n - 1
        assert abs(DP @ xsp - 1.0) < 1e-8


def test_transverse_component_in_kernel_of_dp(orbit, op):
    # the residual after projection carries no phase content
    for _ in range(50):
        s = rng.uniform(0.0, TWO_PI)
        x = orbit.state(s) + 0.05 * rng.standard_normal(4)
        pr = op.project(x, hint=s)
        DP = op.dP(x, s=pr.s)
        assert abs(DP @ pr.x_perp) < 1e-9


def test_min_distance_matches_phase_variant_on_orbit(orbit):
    md = MinDistanceProjection(orbit)
    for s in np.linspace(0.0, TWO_PI, 32, endpoint=False):
        pr = md.project(orbit.state(s), hint=s)
        assert phase_error(pr.s, s) < 1e-9


def test_min_distance_stationarity(orbit):
    # at the minimizer the chord is orthogonal to the curve tangent
    md = MinDistanceProjection(orbit)
    for _ in range(20):
        s = rng.uniform(0.0, TWO_PI)
        x = orbit.state(s) + 0.02 * rng.standard_normal(4)
        pr = md.project(x, hint=s)
        tangent = orbit.state_prime(pr.s)
        W = getattr(md, "weight", None)
        resid = x - orbit.state(pr.s)
        inner = tangent @ (W @ resid) if W is not None else tangent @ resid
        assert abs(inner) < 1e-8


def test_min_distance_gradient_is_normalized_tangent(orbit):
    md = MinDistanceProjection(orbit)
    h = 1e-6
    for s in (0.8, 2.6, 4.1):
        x = orbit.state(s)
        DP = md.dP_on_orbit(s)
        g = np.empty(4)
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            g[j] = (md.project(x + e, hint=s).s - md.project(x - e, hint=s).s) / (2 * h)
        npt.assert_allclose(DP, g, atol=1e-6)
        assert abs(DP @ orbit.state_prime(s) - 1.0) < 1e-8


def test_min_distance_far_state_still_finds_global_minimum(orbit):
    md = MinDistanceProjection(orbit)
    pr = md.project(orbit.state(0.0) + np.array([40.0, 0.0, 0.0, 0.0]), hint=0.0)
    assert np.isfinite(pr.s)
    assert np.linalg.norm(pr.x_perp) > 30.0


def test_phase_projection_rejects_degenerate_state(orbit, op):
    # pendulum angle and rate both zero: the phase equation has no root
    from orbistab import ImplicitFunctionError

    with pytest.raises(ImplicitFunctionError):
        op.project(np.array([0.5, 0.0, 0.3, 0.0]), hint=1.0)


def test_make_projection_dispatch(orbit):
    assert isinstance(make_projection("implicit-phase", orbit), PhaseProjection)
    assert isinstance(make_projection("min-distance", orbit), MinDistanceProjection)
    with pytest.raises(ValueError):
        make_projection("nearest", orbit)
