import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fstationarity.bootstrap import BootstrapConfig, BootstrapEnsemble
from fstationarity.combine import (
    WeightProfile,
    combined_test,
    inv_norm_cdf,
    midrank_pvalues,
    psi_combine,
)
from fstationarity.errors import ConfigurationError

from oracles import bisection_quantile

CFG = BootstrapConfig(m=1, n=1, H=0, K=1, seed=0)


def ensemble(observed, replicates):
    return BootstrapEnsemble(np.asarray(observed, float), np.asarray(replicates, float), CFG)


def test_weights():
    np.testing.assert_allclose(WeightProfile.default(0).w, [0.5, 0.5])
    np.testing.assert_allclose(WeightProfile.default(2).w, [1 / 3, 1 / 3, 1 / 6, 1 / 6])
    for H in range(6):
        assert WeightProfile.default(H).w.sum() == pytest.approx(1.0)
    with pytest.raises(ConfigurationError):
        WeightProfile(1, np.array([0.5, 0.5]))


def test_midrank_examples():
    reps = np.arange(1.0, 5.0)[:, None].repeat(2, axis=1)
    P = midrank_pvalues(ensemble([5.0, 0.0], reps))
    assert P[0, 0] == pytest.approx(0.1)  # nothing exceeds
    assert P[0, 1] == pytest.approx(0.9)  # everything exceeds
    tied = midrank_pvalues(ensemble([2.0, 2.0], np.full((4, 2), 2.0)))
    assert tied[0, 0] == pytest.approx(0.9)


def test_midrank_bounds(rng):
    K = 30
    P = midrank_pvalues(ensemble(rng.standard_normal(3), rng.standard_normal((K, 3))))
    assert P.min() >= 0.5 / (K + 1) and P.max() <= (K + 0.5) / (K + 1)


def test_inv_norm_cdf_examples():
    assert inv_norm_cdf(0.5) == 0.0
    assert inv_norm_cdf(0.975) == pytest.approx(1.959963984540054, abs=1e-12)
    assert inv_norm_cdf(1e-10) == pytest.approx(-6.361340902404056, abs=1e-9)
    for bad in (0.0, 1.0, -0.1, float("nan")):
        with pytest.raises(ValueError):
            inv_norm_cdf(bad)


@pytest.mark.parametrize("p", [1e-6, 0.01, 0.2, 0.5, 0.7, 0.99, 1 - 1e-5])
def test_inv_norm_cdf_against_bisection(p):
    assert inv_norm_cdf(p) == pytest.approx(bisection_quantile(p), abs=1e-8)


@settings(max_examples=80, deadline=None)
@given(st.floats(1e-6, 0.5))  # below this 1 - p rounds visibly
def test_inv_norm_cdf_symmetry(p):
    assert inv_norm_cdf(p) == pytest.approx(-inv_norm_cdf(1.0 - p), abs=1e-9)


def test_inv_norm_cdf_vectorised():
    out = inv_norm_cdf(np.array([[0.5, 0.975]]))
    assert out.shape == (1, 2)


def test_psi_examples():
    w = WeightProfile.default(0)
    assert psi_combine([0.5, 0.5], w) == pytest.approx(0.0, abs=1e-14)
    assert psi_combine([0.025, 0.025], w) == pytest.approx(1.959964, abs=1e-5)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0.001, 0.999), min_size=3, max_size=3),
    st.integers(0, 2),
    st.floats(0.0001, 0.9),
)
def test_psi_monotone(p, i, shrink):
    w = WeightProfile.default(1)
    q = list(p)
    q[i] = p[i] * (1 - shrink)
    assert psi_combine(q, w) >= psi_combine(p, w)


def test_dominant_observation():
    rng = np.random.default_rng(0)
    rep = combined_test(ensemble([10.0, 10.0, 10.0], rng.random((50, 3))))
    assert rep.global_p == 0.0
    assert rep.rejects(0.05)


def test_identical_rows():
    rep = combined_test(ensemble([1.0, 1.0, 1.0], np.ones((20, 3))))
    assert rep.global_p == 1.0
    assert not rep.rejects(0.05)


def test_hand_enumerated_example():
    # H = 1, K = 3
    obs = [2.0, 2.0, 0.5]
    reps = [[1.0, 3.0, 1.0], [3.0, 1.0, 0.0], [0.0, 0.0, 2.0]]
    rep = combined_test(ensemble(obs, reps))
    np.testing.assert_allclose(rep.per_hypothesis_p, [0.375, 0.375, 0.625])
    z = lambda p: inv_norm_cdf(1 - p)
    W0 = (z(0.375) + z(0.375)) / 3 + z(0.625) / 3
    W = [
        (z(0.625) + z(0.375)) / 3 + z(0.625) / 3,
        (z(0.375) + z(0.625)) / 3 + z(0.875) / 3,
        (z(0.875) + z(0.875)) / 3 + z(0.375) / 3,
    ]
    assert rep.combined_W == pytest.approx(W0)
    assert rep.global_p == pytest.approx(np.mean(np.array(W) >= W0))
    assert rep.p_combined[-1] == rep.global_p
    np.testing.assert_allclose(rep.individual_p, [1 / 3, 1 / 3, 2 / 3])


def test_rejects_is_strict():
    rep = combined_test(ensemble([1.0, 1.0], np.ones((19, 2))))
    rep.global_p = 0.05
    assert not rep.rejects(0.05)
    assert rep.rejects(0.06)
    assert rep.rejects(0.99, hypothesis=-1) == (rep.per_hypothesis_p[0] < 0.99)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_invariance(seed):
    r = np.random.default_rng(seed)
    obs, reps = r.standard_normal(3), r.standard_normal((15, 3))
    a = combined_test(ensemble(obs, reps))
    # a strictly increasing map per column leaves every rank, hence the test, unchanged
    b = combined_test(ensemble(np.exp(obs) * 3 + 1, np.exp(reps) * 3 + 1))
    assert a.global_p == b.global_p
    np.testing.assert_allclose(a.per_hypothesis_p, b.per_hypothesis_p)
