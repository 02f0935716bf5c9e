import numpy as np
import pytest

from fstationarity.errors import ConfigurationError
from fstationarity.fda import Grid
from fstationarity.simgen import (
    MODEL_IDS,
    N_BASIS,
    damping_fn,
    draw_operator,
    fourier_basis_eval,
    fourier_basis_matrix,
    get_model,
    innovation_sd,
    simulate,
    simulate_coefficients,
)


def test_basis_values():
    assert fourier_basis_eval(0, 0.3) == 1.0
    assert fourier_basis_eval(1, 0.25) == pytest.approx(np.sqrt(2))
    assert fourier_basis_eval(2, 0.0) == pytest.approx(np.sqrt(2))
    assert fourier_basis_eval(4, 0.25) == pytest.approx(-np.sqrt(2))
    with pytest.raises(IndexError):
        fourier_basis_eval(N_BASIS, 0.1)


def test_basis_orthonormal():
    B = fourier_basis_matrix(Grid(2000))
    np.testing.assert_allclose(B @ B.T / 2000, np.eye(N_BASIS), atol=1e-4)


@pytest.mark.parametrize(
    "j,u,expected",
    [(0, 0.3, 1.0), (1, 0.25, 0.75), (2, 0.0, 0.5), (2, 0.5, 1.5), (3, 0.49, 0.5), (3, 0.5, 1.5), (1, 2.0, 1.5)],
)
def test_damping_values(j, u, expected):
    assert damping_fn(j, u) == pytest.approx(expected)


def test_models():
    assert len(MODEL_IDS) == 10
    assert get_model("Mv2").noise_profile == 2
    assert get_model("Ma3").damping_profile == 3
    assert get_model("Mm1").mean_profile == 1
    with pytest.raises(ConfigurationError):
        get_model("Mx1")


@pytest.mark.parametrize("seed", range(5))
def test_operator_norms(seed):
    op = draw_operator(np.random.default_rng(seed))
    assert np.linalg.norm(op, "fro") == pytest.approx(1 / 3, abs=1e-12)
    # the largest damping is 1.5, so the effective operator stays a contraction
    assert 1.5 * np.linalg.norm(op, 2) <= 0.5 + 1e-12


def test_zero_noise_gives_zero_series():
    s = simulate(get_model("Ma2"), 20, G=5, seed=1, noise_off=True)
    np.testing.assert_array_equal(s.data, 0.0)


def test_mean_model_adds_level():
    s = simulate(get_model("Mm1"), 30, G=5, seed=1, noise_off=True)
    np.testing.assert_allclose(s.data[:, 0], 0.5 + np.arange(1, 31) / 30)


def test_seeded_reproducible():
    a = simulate(get_model("M0"), 16, G=4, seed=9)
    b = simulate(get_model("M0"), 16, G=4, seed=9)
    np.testing.assert_array_equal(a.data, b.data)


@pytest.mark.parametrize("model_id", ["M0", "Ma3", "Mv1"])
def test_burnin_forgets_start(model_id):
    rng = np.random.default_rng(4)
    op = draw_operator(rng)
    eps = rng.standard_normal((100 + 50, N_BASIS)) * innovation_sd()
    model = get_model(model_id)
    a = simulate_coefficients(model, 50, op, eps)
    b = simulate_coefficients(model, 50, op, eps, start=rng.standard_normal(N_BASIS) * 10)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_innovation_variance():
    sd = innovation_sd()
    assert sd[0] == 1.0 and sd[16] == pytest.approx(np.exp(-0.8))
    eps = np.random.default_rng(0).standard_normal((20000, N_BASIS)) * sd
    var = eps.var(axis=0)
    se = sd**2 * np.sqrt(2 / 20000)
    assert np.all(np.abs(var - sd**2) < 4 * se)


def test_lag_one_dependence_follows_operator():
    # the sign of the first coefficient's lag-1 autocorrelation follows the drawn operator
    model, T, agree, used = get_model("M0"), 512, 0, 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        op = draw_operator(rng)
        eps = rng.standard_normal((100 + T, N_BASIS)) * innovation_sd()
        y = simulate_coefficients(model, T, op, eps)[:, 0]
        # stationary lag-0 and lag-1 covariances of y_t = A^T y_{t-1} + e_t
        Q = np.diag(innovation_sd() ** 2)
        C0 = Q.copy()
        for _ in range(200):
            C0 = op.T @ C0 @ op + Q
        theory = (op.T @ C0)[0, 0] / C0[0, 0]
        if abs(theory) < 0.1:
            continue
        used += 1
        emp = np.corrcoef(y[:-1], y[1:])[0, 1]
        agree += np.sign(emp) == np.sign(theory)
    assert used >= 20
    assert agree >= 0.8 * used


def test_simulate_validation():
    with pytest.raises(ConfigurationError):
        simulate(get_model("M0"), 1)
    with pytest.raises(ConfigurationError):
        simulate(get_model("M0"), 10, burnin=-1)
