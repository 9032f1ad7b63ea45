import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pytest import approx
from scipy.stats import norm

from pceuq.errors import GridTooCoarse, LengthMismatch, ZeroReference
from pceuq.metrics import kl_divergence, mae, rel_moment_errors, rmae, support_grid

vectors = st.lists(st.floats(0.1, 100.0), min_size=1, max_size=30)


def test_mae_examples():
    t = np.array([1.0, 2.0, 3.0])
    assert mae(t, t) == 0.0
    assert mae(t + 1, t) == approx(1.0)
    assert mae([0.0, 2.0], [1.0, 1.0]) == approx(1.0)
    with pytest.raises(LengthMismatch):
        mae([1.0], [1.0, 2.0])


def test_rmae_examples():
    t = np.array([1.0, -2.0, 3.0])
    assert rmae(t, t) == 0.0
    assert rmae(1.01 * t, t) == approx(0.01)
    with pytest.raises(ZeroReference):
        rmae([1.0, 1.0], [1.0, 0.0])


def test_moment_error_examples():
    assert rel_moment_errors(2.0, 3.0, 2.0, 3.0) == (0.0, 0.0)
    assert rel_moment_errors(2.2, 3.0, 2.0, 3.0)[0] == approx(0.1)
    with pytest.raises(ZeroReference):
        rel_moment_errors(1.0, 1.0, 1.0, 0.0)


def test_kl_examples():
    grid = np.linspace(-8, 8, 4096)
    assert kl_divergence(norm.pdf, norm.pdf, grid) == approx(0.0, abs=1e-12)
    # closed form for unit-variance Gaussians: mu**2 / 2
    shifted = lambda x: norm.pdf(x, 0.1)
    assert kl_divergence(shifted, norm.pdf, grid) == approx(0.005, abs=5e-4)
    with pytest.raises(GridTooCoarse):
        kl_divergence(norm.pdf, norm.pdf, np.linspace(-8, 8, 64))


def test_kl_closed_form_scale():
    # KL(N(0,1) || N(0,s^2)) = log s + 1/(2 s^2) - 1/2
    grid = np.linspace(-12, 12, 8192)
    s = 1.5
    ref = np.log(s) + 1 / (2 * s**2) - 0.5
    assert kl_divergence(lambda x: norm.pdf(x, 0, s), norm.pdf, grid) == approx(ref, rel=1e-6)


def test_kl_accepts_arrays():
    grid = np.linspace(-8, 8, 1000)
    assert kl_divergence(norm.pdf(grid, 0.2), norm.pdf(grid), grid) == approx(0.02, rel=1e-4)


def test_support_grid_covers_samples(rng):
    a, b = rng.normal(size=1000), rng.normal(3, 1, size=1000)
    g = support_grid(a, b, n_nodes=500, tail=0.0)
    assert g.size == 500 and g[0] == a.min() and g[-1] == b.max()


@given(vectors, st.randoms())
def test_errors_permutation_invariant(truth, r):
    truth = np.array(truth)
    pred = truth * 1.1 + 0.5
    perm = np.array(r.sample(range(len(truth)), len(truth)))
    assert mae(pred[perm], truth[perm]) == approx(mae(pred, truth))
    assert rmae(pred[perm], truth[perm]) == approx(rmae(pred, truth))


@given(st.floats(-1, 1), st.floats(0.5, 2.0))
def test_kl_nonnegative(mu, s):
    grid = np.linspace(-10, 10, 2048)
    assert kl_divergence(lambda x: norm.pdf(x, mu, s), norm.pdf, grid) >= -1e-6
