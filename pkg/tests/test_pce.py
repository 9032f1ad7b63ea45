import time

import numpy as np
import pytest
from pytest import approx

from pceuq import PceConfig, PceModel, fit
from pceuq.basis import truncated_set
from pceuq.benchmarks.ishigami import ishigami_eval, ishigami_sampler
from pceuq.copula import CvineModel
from pceuq.errors import InputError, InsufficientData, MissingCopula
from pceuq.marginals import BoundedUniformMarginal, pit
from pceuq.metrics import rmae
from pceuq.orthopoly import legendre_basis
from pceuq.pce import Mode, fit_table, resample_statistics


def constant_model(c, d=2):
    s = truncated_set(d, 2, 1.0, d)
    coef = np.zeros(len(s))
    coef[0] = c
    margs = tuple(BoundedUniformMarginal(0, 1) for _ in range(d))
    return PceModel(Mode.APCE_X, margs, CvineModel.independence(d), tuple(legendre_basis(0, 1, 2) for _ in range(d)),
                    s, coef, {"x_min": [0.0] * d, "x_max": [1.0] * d})


def test_mode_parsing():
    assert Mode.parse("apce-x") is Mode.APCE_X
    assert Mode.parse("lPCEonZ") is Mode.LPCE_Z
    with pytest.raises(InputError):
        Mode.parse("gpce")
    with pytest.raises(InputError):
        PceConfig(q=1.5)


def test_linear_recovery_one_dimension(rng):
    x = rng.uniform(0, 1, 60)
    m = fit(x[:, None], 3 * x)
    assert m.support.size == 2
    xt = rng.uniform(0, 1, (200, 1))
    assert m.predict(xt) == approx(3 * xt[:, 0], abs=1e-6)


@pytest.mark.parametrize("mode", list(Mode))
def test_exact_polynomial_recovery(mode, rng):
    X = rng.normal(size=(150, 2))
    f = lambda X: 1 + X[:, 0] - 0.5 * X[:, 1] ** 2 + 0.25 * X[:, 0] * X[:, 1]
    if mode is Mode.LPCE_Z:
        # a polynomial in z: build y on the transformed inputs
        m0 = fit(X, X[:, 0], mode=mode, p_range=(1,))
        Z = m0.to_model_space(X)
        y = 1 + Z[:, 0] - 0.5 * Z[:, 1] ** 2 + 0.25 * Z[:, 0] * Z[:, 1]
        m = fit(X, y, mode=mode)
        Xv = rng.normal(size=(100, 2))
        Zv = m.to_model_space(Xv)
        assert m.predict(Xv) == approx(1 + Zv[:, 0] - 0.5 * Zv[:, 1] ** 2 + 0.25 * Zv[:, 0] * Zv[:, 1], abs=1e-6)
    else:
        m = fit(X, f(X), mode=mode)
        assert np.mean(np.abs(m.predict(X) - f(X))) < 1e-8
        Xv = rng.normal(size=(100, 2)) * 0.8
        assert m.predict(Xv) == approx(f(Xv), abs=1e-6)


def test_constant_model():
    m = constant_model(2.5)
    assert np.all(m.predict(np.random.default_rng(0).random((10, 2))) == 2.5)
    assert m.moments() == (2.5, 0.0)
    st = resample_statistics(m, 10_000)
    assert st.mean == approx(2.5) and st.std == 0.0 and st.pdf_estimate is None


def test_moments_formula():
    s = truncated_set(1, 2, 1.0, 1)
    m = PceModel(Mode.APCE_X, (BoundedUniformMarginal(0, 1),), None, (legendre_basis(0, 1, 2),), s,
                 np.array([2.0, 0.5, -0.5]), {"x_min": [0.0], "x_max": [1.0]})
    assert m.moments() == approx((2.0, 0.5))


def test_preconditions(rng):
    with pytest.raises(InsufficientData):
        fit(rng.random((5, 2)), rng.random(5))
    with pytest.raises(InputError):
        fit(rng.random((20, 2)), rng.random(19))
    s = truncated_set(2, 1, 1.0, 2)
    with pytest.raises(MissingCopula):
        PceModel(Mode.LPCE_Z, (BoundedUniformMarginal(0, 1),) * 2, None, (legendre_basis(0, 1, 1),) * 2, s, np.zeros(3))


def test_ishigami_accuracy_n1000():
    X, y = ishigami_sampler(11_000, 5)
    m = fit(X[:1000], y[:1000])
    assert rmae(m.predict(X[1000:]), y[1000:]) < 1e-2


def test_lpce_z_single_input_skips_copula(rng):
    x = rng.gamma(2.0, size=(100, 1))
    m = fit(x, np.log(x[:, 0]), mode="lpce-z")
    assert m.copula is None
    assert m.to_model_space(x)[:, 0] == approx(pit(m.marginals, x)[:, 0])


def test_rosenblatt_reduces_to_pit_under_independence(rng):
    X = rng.uniform(-np.pi, np.pi, (200, 3))
    m = fit(X, ishigami_eval(X), mode="lpce-z", families=("independence",))
    assert m.to_model_space(X) == approx(pit(m.marginals, X), abs=1e-12)


def test_mode_equivalence_under_independence():
    ra, rz = [], []
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        X = rng.uniform(-np.pi, np.pi, (200, 3))
        Xv = rng.uniform(-np.pi, np.pi, (5000, 3))
        y, yv = ishigami_eval(X), ishigami_eval(Xv)
        ra.append(rmae(fit(X, y, mode="apce-x").predict(Xv), yv))
        rz.append(rmae(fit(X, y, mode="lpce-z").predict(Xv), yv))
    assert 0.5 < np.mean(rz) / np.mean(ra) < 2.0


def test_lpce_z_moments_match_resampling():
    X, y = ishigami_sampler(1000, 3)
    m = fit(X, y, mode="lpce-z")
    mu, var = m.moments()
    st = resample_statistics(m, 100_000, "pseudo_random", seed=1)
    band = 3 * st.std / np.sqrt(100_000)
    assert st.mean == approx(mu, abs=band)
    # the sample variance has standard error ~ var * sqrt(2 / N) for near-Gaussian output
    assert st.std**2 == approx(var, abs=3 * var * np.sqrt(2 / 100_000) * 2)


def test_independent_apce_mean_matches_coefficient(rng):
    X = rng.uniform(-1, 1, (300, 2))
    y = np.exp(X[:, 0]) + X[:, 1] ** 2
    m = fit(X, y, fit_copula=False)
    st = resample_statistics(m, 100_000, "pseudo_random", seed=2, clip_to_hull=False)
    assert st.mean == approx(m.moments()[0], abs=3 * st.std / np.sqrt(100_000))


def test_batch_prediction_speed(rng):
    X = rng.normal(size=(100, 3))
    m = fit(X, X @ [1.0, 2.0, 3.0] + X[:, 0] ** 2, p_range=(1, 2, 3))
    Xb = rng.normal(size=(1_000_000, 3))
    t0 = time.perf_counter()
    m.evaluate_basis_space(Xb)
    assert time.perf_counter() - t0 < 5.0


def test_determinism(tmp_path):
    X, y = ishigami_sampler(150, 1)
    a, b = fit(X, y, seed=3), fit(X, y, seed=3)
    assert np.array_equal(a.coefficients, b.coefficients)
    a.save(tmp_path / "m.json")
    c = PceModel.load(tmp_path / "m.json")
    assert np.array_equal(c.predict(X), a.predict(X))
    assert c.metadata["q"] == 0.75


def test_fit_table(rng):
    data = rng.random((40, 3))
    data[:, 2] = data[:, 0] + data[:, 1]
    m = fit_table(data, "lpce-x")
    assert m.mode is Mode.LPCE_X
    assert m.predict(data[:, :2]) == approx(data[:, 2], abs=1e-8)


def test_out_of_hull_fraction(rng):
    X = rng.random((50, 2))
    m = fit(X, X[:, 0])
    assert m.out_of_hull_fraction(X) == 0.0
    assert m.out_of_hull_fraction(np.array([[2.0, 0.5], [0.5, 0.5]])) == 0.5


def test_statistics_pdf_grid():
    X, y = ishigami_sampler(200, 2)
    st = resample_statistics(fit(X, y), 20_000)
    grid, dens = st.pdf_on_grid()
    assert grid.size == 512 and np.trapezoid(dens, grid) == approx(1.0, abs=1e-3)
    with pytest.raises(InputError):
        resample_statistics(fit(X, y), 100)
