import numpy as np
import numpy.testing as npt
import pytest

from orbistab import (
    InfeasibleOrbitError,
    cart_pendulum,
    nominal_input,
    plan_orbit,
    upright_oscillation_curve,
)
from orbistab.orbit import TWO_PI, reduced_dynamics

from oracles import rho_time_oracle


def test_curve_values_and_periodicity():
    a2 = 0.1129
    curve = upright_oscillation_curve(a2)
    npt.assert_allclose(curve.value(0.0), [-1.5 * np.sin(a2), a2], rtol=1e-15)
    npt.assert_allclose(curve.value(np.pi / 2), [0.0, 0.0], atol=1e-16)
    for s in (0.3, 2.2, 5.9):
        npt.assert_allclose(curve.value(s), curve.value(s + TWO_PI), rtol=1e-14)


def test_curve_derivatives_match_finite_differences():
    curve = upright_oscillation_curve(0.1129)
    h = 1e-6
    for s in (0.4, 1.7, 3.9, 5.2):
        d1_fd = (curve.value(s + h) - curve.value(s - h)) / (2 * h)
        d2_fd = (curve.d1(s + h) - curve.d1(s - h)) / (2 * h)
        npt.assert_allclose(curve.d1(s), d1_fd, atol=1e-8)
        npt.assert_allclose(curve.d2(s), d2_fd, atol=1e-8)


def test_reference_period(orbit):
    assert abs(orbit.period - 1.4060059891145709) < 1e-9


def test_anchor_identity(cart):
    # beta rho^2 + gamma = 0 where alpha vanishes
    rd = reduced_dynamics(cart, upright_oscillation_curve(0.1129))
    orbit = plan_orbit(cart, upright_oscillation_curve(0.1129))
    for s_a in rd.singular_points:
        z = orbit.profile.rho(s_a) ** 2
        assert abs(rd.beta(s_a) * z + rd.gamma(s_a)) < 1e-6


def test_rho_against_time_integration_oracle(cart, orbit):
    rd = reduced_dynamics(cart, upright_oscillation_curve(0.1129))
    anchors = list(rd.singular_points) + [rd.singular_points[0] + TWO_PI]
    worst = 0.0
    for s_a, s_b in zip(anchors[:-1], anchors[1:]):
        oracle = rho_time_oracle(rd, s_a, s_b)
        for s in np.linspace(s_a + 0.2, s_b - 0.2, 20):
            ref = oracle(s)
            err = abs(orbit.profile.rho(s % TWO_PI) - ref) / ref
            worst = max(worst, err)
    assert worst < 1e-5


def test_fig2_profile_positive_periodic(cart):
    orbit = plan_orbit(cart, upright_oscillation_curve(0.5))
    s = np.linspace(0.0, TWO_PI, 512, endpoint=False)
    rho = np.array([orbit.profile.rho(v) for v in s])
    assert rho.min() > 0.0
    assert abs(orbit.profile.rho(0.0) - orbit.profile.rho(TWO_PI)) < 1e-12


def test_state_prime_consistency(orbit):
    h = 1e-6
    for s in (0.7, 2.1, 4.4):
        fd = (orbit.state(s + h) - orbit.state(s - h)) / (2 * h)
        npt.assert_allclose(orbit.state_prime(s), fd, atol=1e-7)


def test_velocity_accel_relation(orbit):
    # qdot on the orbit is Phi'(s) rho(s)
    for s in (0.5, 1.9, 3.3):
        npt.assert_allclose(
            orbit.velocity(s),
            orbit.curve.d1(s) * orbit.profile.rho(s),
            rtol=1e-12,
        )


def test_nominal_input_reproduces_orbit(cart, orbit):
    # replaying u_*(s) along the nominal clock keeps the state on the orbit
    from orbistab import forward_dynamics

    s, x = 0.3, orbit.state(0.3)
    dt = 1e-6
    u = nominal_input(cart, orbit, s)
    xdot = forward_dynamics(cart, x, u)
    npt.assert_allclose(
        xdot, orbit.state_prime(s) * orbit.profile.rho(s), atol=1e-9
    )


def test_infeasible_amplitude_raises(cart):
    with pytest.raises(InfeasibleOrbitError):
        plan_orbit(cart, upright_oscillation_curve(1.0))
