import numpy as np
import numpy.testing as npt

from orbistab import cart_pendulum, forward_dynamics, total_energy

rng = np.random.default_rng(11)


def test_mass_matrix_symmetric_positive_definite(cart):
    for _ in range(20):
        q = rng.uniform(-3.0, 3.0, 2)
        M = cart.mass_matrix(q)
        npt.assert_allclose(M, M.T, atol=1e-14)
        assert np.linalg.eigvalsh(M).min() > 0.0


def test_coriolis_matches_mass_matrix_rate(cart):
    # Mdot - 2C must be skew-symmetric for a Lagrangian model
    h = 1e-6
    for _ in range(20):
        q = rng.uniform(-3.0, 3.0, 2)
        qd = rng.uniform(-2.0, 2.0, 2)
        Mdot = (cart.mass_matrix(q + h * qd) - cart.mass_matrix(q - h * qd)) / (2 * h)
        C = cart.coriolis_matrix(q, qd)
        skew = Mdot - 2.0 * C
        npt.assert_allclose(skew, -skew.T, atol=1e-8)


def test_unforced_energy_conserved(cart):
    x = np.array([0.3, 0.7, -0.4, 0.9])
    dt = 1e-4
    u = np.zeros(1)
    e0 = total_energy(cart, x)
    for _ in range(2000):
        k1 = forward_dynamics(cart, x, u)
        k2 = forward_dynamics(cart, x + 0.5 * dt * k1, u)
        k3 = forward_dynamics(cart, x + 0.5 * dt * k2, u)
        k4 = forward_dynamics(cart, x + dt * k3, u)
        x = x + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
    assert abs(total_energy(cart, x) - e0) < 1e-9


def test_input_enters_cart_only(cart):
    x = np.array([0.1, 0.2, 0.0, 0.0])
    base = forward_dynamics(cart, x, np.zeros(1))
    pushed = forward_dynamics(cart, x, np.array([1.0]))
    dacc = pushed - base
    # generalized force (1, 0): acceleration response is M^{-1} e1
    Minv = np.linalg.inv(cart.mass_matrix(x[:2]))
    npt.assert_allclose(dacc[2:], Minv[:, 0], rtol=1e-12)
    npt.assert_allclose(dacc[:2], 0.0, atol=1e-15)


def test_left_inverse_property(cart):
    npt.assert_allclose(
        cart.input_left_inverse @ cart.input_matrix, np.eye(1), atol=1e-15
    )
