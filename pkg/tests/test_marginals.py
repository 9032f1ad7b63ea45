import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pytest import approx
from scipy.integrate import quad
from scipy.stats import norm

from pceuq.errors import DegenerateSample, OutOfRange
from pceuq.marginals import (
    BoundedUniformMarginal,
    KdeMarginal,
    fit_kde,
    inverse_pit,
    kde_cdf,
    kde_pdf,
    kde_quantile,
    pit,
    silverman_bandwidth,
)

samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=40).filter(
    lambda xs: np.ptp(xs) > 1e-3)


def test_bandwidth_two_points():
    # oracle: Silverman's rule evaluated by hand; the std (n-1 denominator)
    # of {0, 1} is 1/sqrt(2) and is smaller than IQR/1.349 = 1/1.349
    expected = 1.06 * (1 / np.sqrt(2)) * 2 ** (-0.2)
    m = fit_kde([0.0, 1.0])
    assert m.bandwidth == approx(expected, rel=1e-12)
    assert m.bandwidth == approx(0.6528, abs=1e-3)


def test_degenerate_samples():
    with pytest.raises(DegenerateSample):
        fit_kde([0.0, 0.0, 0.0])
    with pytest.raises(DegenerateSample):
        fit_kde([1.0])


def test_kde_close_to_normal_density(rng):
    m = fit_kde(rng.standard_normal(10_000))
    x = np.linspace(-8, 8, 8001)
    l1 = np.trapezoid(np.abs(m.pdf(x) - norm.pdf(x)), x)
    assert l1 < 0.05


def test_single_kernel_pdf():
    m = KdeMarginal(np.array([0.0]), 1.0)
    assert kde_pdf(m, 0.0) == approx(0.3989422804, rel=1e-9)


def test_pdf_symmetry_and_tails():
    m = fit_kde([-1.0, 1.0])
    x = np.linspace(0, 5, 11)
    assert np.allclose(m.pdf(-x), m.pdf(x), rtol=0, atol=1e-15)
    assert m.pdf(1e3) == 0.0 and m.pdf(-1e3) == 0.0


def test_cdf_examples():
    m = fit_kde([-1.0, 1.0])
    assert kde_cdf(m, 0.0) == approx(0.5, abs=1e-15)
    assert m.cdf(-1.0 - 10 * m.bandwidth) < 1e-6


def test_cdf_derivative_is_pdf(rng):
    m = fit_kde(rng.gamma(2.0, size=300))
    x = rng.uniform(*m.support(3.0), size=100)
    eps = 1e-5 * m.bandwidth
    fd = (m.cdf(x + eps) - m.cdf(x - eps)) / (2 * eps)
    assert np.abs(fd - m.pdf(x)).max() < 1e-6


def test_quantile_examples():
    m = fit_kde([-1.0, 1.0])
    assert kde_quantile(m, 0.5) == approx(0.0, abs=1e-8)
    p = np.linspace(0.01, 0.99, 99)
    assert np.abs(m.cdf(m.quantile(p)) - p).max() < 1e-8
    with pytest.raises(OutOfRange):
        m.quantile(1.2)
    with pytest.raises(OutOfRange):
        m.quantile(0.0)


def test_fast_quantile_close_to_exact(rng):
    m = fit_kde(rng.lognormal(size=500))
    p = rng.uniform(1e-6, 1 - 1e-6, size=2000)
    assert np.abs(m.quantile_fast(p) - m.quantile(p)).max() < 1e-6 * m.bandwidth


def test_pit_examples(rng):
    u = pit([BoundedUniformMarginal(0.0, 1.0)], np.array([0.3]))
    assert u[0] == approx(0.3)
    margs = [fit_kde(rng.normal(size=50)), fit_kde(rng.exponential(size=50))]
    x = np.array([[0.1, 0.7], [0.5, 2.0]])
    u = pit(margs, x)
    assert u[:, 0] == approx(margs[0].cdf(x[:, 0]))
    assert u[:, 1] == approx(margs[1].cdf(x[:, 1]))
    assert inverse_pit(margs, u) == approx(x, abs=1e-8)


def test_pdf_mass_on_extended_hull(rng):
    m = fit_kde(rng.standard_t(3, size=200))
    lo, hi = m.support(10.0)
    mass, _ = quad(m.pdf, lo, hi, points=list(np.linspace(lo, hi, 50)), limit=500)
    assert 1 - 1e-6 <= mass <= 1 + 1e-12


def test_pit_of_self_samples_is_uniform(rng):
    m = fit_kde(rng.normal(size=100))
    N = 100_000
    x = rng.choice(m.centers, N) + m.bandwidth * rng.standard_normal(N)
    u = pit([m], x[:, None])[:, 0]
    assert abs(u.mean() - 0.5) < 3 / np.sqrt(N)
    assert u.var() == approx(1 / 12, abs=2e-3)


def test_binned_pdf_matches_exact(rng):
    m = fit_kde(rng.gamma(2.0, size=20_000))
    x = np.linspace(*m.support(3.0), 400)
    assert np.abs(m.pdf_binned(x) - m.pdf(x)).max() < 1e-5 * m.pdf(x).max()


def test_bandwidth_positive_for_tied_sample():
    assert silverman_bandwidth(np.array([0.0, 0.0, 0.0, 1.0])) > 0


@given(samples)
def test_cdf_monotone_and_bounded(xs):
    m = fit_kde(xs)
    grid = np.linspace(*m.support(12.0), 200)
    F = m.cdf(grid)
    assert np.all(np.diff(F) >= 0)
    assert F[0] < 1e-6 and F[-1] > 1 - 1e-6


@given(samples)
def test_quantile_inverts_cdf_on_hull(xs):
    m = fit_kde(xs)
    x = np.linspace(min(xs), max(xs), 9)
    F = np.clip(m.cdf(x), 1e-15, 1 - 1e-15)
    xr = m.quantile(F)
    # backward error holds everywhere; the forward error is only meaningful
    # where the density is not vanishingly small (inside wide gaps the cdf is
    # flat to machine precision)
    assert m.cdf(xr) == approx(F, abs=1e-11)
    ok = m.pdf(x) * m.bandwidth > 1e-6
    assert xr[ok] == approx(x[ok], abs=1e-8 * max(1.0, np.ptp(xs)))
