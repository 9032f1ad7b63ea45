import numpy as np
import pytest
from pytest import approx
from scipy.stats import kstest

from pceuq.benchmarks import (
    NoiseSpec,
    PceFactory,
    get_benchmark,
    inject_noise,
    ishigami_eval,
    ishigami_sampler,
    reference_statistics,
    run_validation,
    truss_eval,
    truss_sampler,
    truss_solve,
)
from pceuq.benchmarks.truss import BARS, gumbel_params, lognormal_params
from pceuq.copula import kendall_tau_empirical
from pceuq.errors import InputError, UnknownBenchmark
from pceuq.pce import PceConfig
from truss_oracle import force_method, stiffness_method

MEAN_X = np.array([2.1e11, 2.1e11, 2e-3, 1e-3] + [5e4] * 6)


def test_ishigami_values():
    denom = 9 + np.pi**4 / 5
    assert ishigami_eval([0, 0, 0])[0] == approx(1 + (1 + np.pi**4 / 10) / denom, rel=1e-14)
    assert ishigami_eval([0, 0, 0])[0] == approx(1.3771, abs=1e-4)
    assert ishigami_eval([np.pi / 2, np.pi / 2, 0])[0] == approx(1.6580, abs=1e-4)


def test_ishigami_range(rng):
    y = ishigami_eval(rng.uniform(-np.pi, np.pi, (100_000, 3)))
    assert y.min() >= 1.0 and y.max() <= 2.0


def test_ishigami_sampler_dependence():
    X, _ = ishigami_sampler(100_000, 0)
    assert kendall_tau_empirical(X[:, [0, 1]]) == approx(0.5, abs=0.02)
    assert kendall_tau_empirical(X[:, [0, 2]]) == approx(2 / np.pi * np.arcsin(0.5), abs=0.02)
    for i in range(3):
        assert kstest((X[:, i] + np.pi) / (2 * np.pi), "uniform").statistic < 0.01


def test_sampler_determinism():
    for name in ("ishigami", "truss"):
        sampler, _ = get_benchmark(name)
        a, b = sampler(500, 9), sampler(500, 9)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    with pytest.raises(UnknownBenchmark):
        get_benchmark("borehole")


def test_truss_geometry():
    assert len(BARS) == 23


def test_truss_linearity():
    P0 = MEAN_X.copy()
    P0[4:] = 0
    assert truss_eval(P0)[0] == approx(0.0, abs=1e-18)
    X2 = MEAN_X.copy()
    X2[4:] *= 2
    assert truss_eval(X2)[0] == approx(2 * truss_eval(MEAN_X)[0], rel=1e-12)
    Xh = MEAN_X.copy()
    Xh[:2] /= 2
    assert truss_eval(Xh)[0] == approx(2 * truss_eval(MEAN_X)[0], rel=1e-12)


def test_truss_monotone_in_loads(rng):
    X, y = truss_sampler(50, 4)
    for i in range(4, 10):
        Xp = X.copy()
        Xp[:, i] *= 1.1
        assert np.all(truss_eval(Xp) > y)


def test_truss_mean_value_matches_oracles():
    d = truss_solve(*MEAN_X[:4], MEAN_X[4:])
    assert d == approx(force_method(MEAN_X), rel=1e-10)
    assert d == approx(stiffness_method(MEAN_X), rel=1e-10)
    assert 0.05 < d < 0.12


def test_truss_random_draws_match_oracles():
    X, y = truss_sampler(100, 17)
    for x, v in zip(X, y):
        assert v == approx(force_method(x), rel=1e-10)
        assert v == approx(stiffness_method(x), rel=1e-10)


def test_truss_input_model():
    X, y = truss_sampler(100_000, 1)
    assert gumbel_params(5e4, 7.5e3)[1] == approx(np.sqrt(6) * 7.5e3 / np.pi)
    for j in range(4, 10):
        assert X[:, j].mean() == approx(5e4, abs=150)
    for j in range(5, 10):
        assert kendall_tau_empirical(X[:, [4, j]]) == approx(1 - 1 / 1.1, abs=0.02)
    assert X[:, 0].mean() == approx(2.1e11, rel=0.01)
    mu, sig = lognormal_params(2e-3, 2e-4)
    assert np.exp(mu + sig**2 / 2) == approx(2e-3)
    with pytest.raises(InputError):
        truss_eval(np.ones((2, 9)))


def test_inject_noise(rng):
    y = rng.random(100_000)
    assert np.array_equal(inject_noise(y, NoiseSpec(0.0)), y)
    noisy = inject_noise(y, NoiseSpec(0.15, seed=3))
    assert np.std(noisy - y, ddof=1) == approx(0.15, abs=0.002)
    assert np.array_equal(noisy, inject_noise(y, NoiseSpec(0.15, seed=3)))
    with pytest.raises(InputError):
        NoiseSpec(-1.0)


def test_oracle_model_has_zero_error():
    res = run_validation("oracle", ishigami_sampler, [20, 50], n_val=200, reps=2)
    assert all(c.report.rmae == 0.0 for c in res.cells)
    assert len(res.cells) == 4


def test_validation_csv(tmp_path):
    res = run_validation(PceFactory(PceConfig()), ishigami_sampler, [30], n_val=500, reps=3,
                         benchmark="ishigami", mode="aPCEonX")
    res.to_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "benchmark,mode,n_train,rep,rmae,mean_err,std_err,kl,wall_seconds"
    assert len(lines) == 4
    assert set(res.aggregate()) == {30}


def test_reference_statistics_stability():
    a = reference_statistics(ishigami_sampler, 10**6, seed=1)
    b = reference_statistics(ishigami_sampler, 10**6, seed=2)
    assert a.mean == approx(b.mean, abs=4 * a.std / 1e3)
