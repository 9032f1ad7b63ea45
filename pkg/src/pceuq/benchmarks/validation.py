"""Validation protocol: training-size sweeps with repeated fresh draws,
optional output noise, and pointwise/statistical error reports."""
from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import InputError, PceUqError, UnknownBenchmark
from ..marginals import fit_kde
from ..metrics import ErrorReport, kl_divergence, rel_moment_errors, rmae, support_grid
from ..pce import PceConfig, fit, resample_statistics
from .ishigami import ishigami_eval, ishigami_sampler
from .truss import truss_eval, truss_sampler

log = logging.getLogger(__name__)

CSV_COLUMNS = ("benchmark", "mode", "n_train", "rep", "rmae", "mean_err", "std_err", "kl", "wall_seconds")
# degree range used by the benchmark protocol (see README)
PROTOCOL_P_RANGE = tuple(range(1, 11))

BENCHMARKS: dict[str, tuple[Callable, Callable]] = {
    "ishigami": (ishigami_sampler, ishigami_eval),
    "truss": (truss_sampler, truss_eval),
}


def get_benchmark(name: str) -> tuple[Callable, Callable]:
    try:
        return BENCHMARKS[name.lower()]
    except KeyError:
        raise UnknownBenchmark(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}") from None


@dataclass(frozen=True)
class NoiseSpec:
    sigma_eps: float
    seed: int = 0

    def __post_init__(self):
        if not self.sigma_eps >= 0:
            raise InputError(f"sigma_eps must be nonnegative, got {self.sigma_eps}")


def inject_noise(y, spec: NoiseSpec) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if spec.sigma_eps == 0:
        return y.copy()
    return y + np.random.default_rng(spec.seed).normal(0.0, spec.sigma_eps, y.shape)


@dataclass(frozen=True)
class Reference:
    """Large-sample statistics of the true model output."""
    mean: float
    std: float
    kde: object
    grid: np.ndarray


def reference_statistics(sampler: Callable, n_ref: int = 10**6, seed: int = 12345) -> Reference:
    _, y = sampler(n_ref, seed)
    kde = fit_kde(y)
    grid = support_grid(y, pad=5.0 * kde.bandwidth)
    return Reference(float(np.mean(y)), float(np.std(y, ddof=1)), kde, grid)


@dataclass(frozen=True)
class PceFactory:
    """Picklable model factory for ``run_validation``."""
    config: PceConfig = PceConfig()

    def __call__(self, X, y):
        return fit(X, y, self.config)


@dataclass
class ValidationCell:
    n_train: int
    rep: int
    seed: int
    report: ErrorReport | None
    wall_seconds: float
    sample_mean_err: float | None = None
    sample_std_err: float | None = None
    error: str | None = None


@dataclass
class ValidationResult:
    benchmark: str
    mode: str
    cells: list = field(default_factory=list)

    def values(self, metric: str, n_train: int) -> np.ndarray:
        out = []
        for c in self.cells:
            if c.n_train == n_train and c.report is not None:
                v = getattr(c.report, metric)
                if v is not None:
                    out.append(v)
        return np.asarray(out, dtype=float)

    def aggregate(self, metric: str = "rmae") -> dict[int, tuple[float, float, float]]:
        """(mean, min, max) of ``metric`` per training size over successful cells."""
        agg = {}
        for n in sorted({c.n_train for c in self.cells}):
            v = self.values(metric, n)
            agg[n] = (float(v.mean()), float(v.min()), float(v.max())) if v.size else (np.nan,) * 3
        return agg

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for c in self.cells:
                r = c.report or ErrorReport()
                w.writerow([self.benchmark, self.mode, c.n_train, c.rep,
                            *("" if v is None else repr(float(v))
                              for v in (r.rmae, r.rel_mean_err, r.rel_std_err, r.kl_div)),
                            f"{c.wall_seconds:.3f}"])


def _run_cell(model_factory, sampler, n_train, rep, seed, n_val, noise, reference, n_resample):
    t0 = time.perf_counter()
    X, y = sampler(n_train + n_val, seed)
    Xt, yt, Xv, yv = X[:n_train], y[:n_train], X[n_train:], y[n_train:]
    if noise is not None:
        yt = inject_noise(yt, NoiseSpec(noise.sigma_eps, noise.seed + seed))
    try:
        if model_factory == "oracle":
            pred, model = yv, None
        else:
            model = model_factory(Xt, yt)
            pred = model.predict(Xv)
        err = rmae(pred, yv)
        mean_err = std_err = kl = s_mean = s_std = None
        if reference is not None:
            s_mean, s_std = rel_moment_errors(float(np.mean(yt)), float(np.std(yt, ddof=1)),
                                              reference.mean, reference.std)
            if model is not None:
                st = resample_statistics(model, n_resample, "sobol", seed)
                mean_err, std_err = rel_moment_errors(st.mean, st.std, reference.mean, reference.std)
                if st.pdf_estimate is not None:
                    kl = kl_divergence(st.pdf_estimate.pdf_binned, reference.kde.pdf_binned, reference.grid)
            else:
                mean_err = std_err = kl = 0.0
        report = ErrorReport(rmae=err, rel_mean_err=mean_err, rel_std_err=std_err, kl_div=kl)
        return ValidationCell(n_train, rep, seed, report, time.perf_counter() - t0, s_mean, s_std)
    except PceUqError as exc:
        log.warning("cell n=%d rep=%d failed: %s", n_train, rep, exc)
        return ValidationCell(n_train, rep, seed, None, time.perf_counter() - t0, error=str(exc))


def run_validation(model_factory, sampler: Callable, n_train_list, n_val: int = 10_000, reps: int = 10,
                   noise: NoiseSpec | None = None, seed_base: int = 0, reference: Reference | None = None,
                   n_resample: int = 10**5, benchmark: str = "", mode: str = "", jobs: int = 1) -> ValidationResult:
    """Fit on fresh draws for every (n_train, rep) cell and score on a fresh
    validation set. Cell ``c`` uses seed ``seed_base + c`` for its data.

    ``model_factory`` maps (X, y) to an object with ``predict``; the string
    ``"oracle"`` uses the true outputs. Statistics (moment errors, KL) are
    computed only when a ``reference`` is given. Failing cells are recorded
    and do not abort the sweep.
    """
    if reps < 1:
        raise InputError("reps must be >= 1")
    tasks = []
    for i, n in enumerate(n_train_list):
        for rep in range(reps):
            cell = i * reps + rep
            tasks.append((model_factory, sampler, int(n), rep, seed_base + cell, n_val, noise, reference, n_resample))
    result = ValidationResult(benchmark, mode)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            result.cells = list(pool.map(_run_cell, *zip(*tasks)))
    else:
        result.cells = [_run_cell(*t) for t in tasks]
    return result
