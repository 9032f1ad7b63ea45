"""Data-driven sparse PCE: the aPCEonX, lPCEonZ and lPCEonX pipelines,
prediction, coefficient moments and resampling-based output statistics.

* ``aPCEonX`` -- KDE marginals, bases orthonormal to each fitted marginal
  (Stieltjes), regression on the raw inputs. Dependence is ignored by the
  basis; a C-vine is still fitted so that statistics can be resampled.
* ``lPCEonZ`` -- KDE marginals + C-vine, inputs mapped to independent
  uniforms by the Rosenblatt transform, Legendre bases on [0, 1].
* ``lPCEonX`` -- Legendre bases on the observed ranges widened by 1% per side,
  regression on the raw inputs.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .basis import MultiIndexSet, truncated_set, univariate_values
from .copula.families import DEFAULT_FAMILIES
from .copula.vine import CvineModel, fit_cvine
from .errors import InputError, InsufficientData, MissingCopula, QuadratureFailure, SchemaMismatch
from .marginals import KdeMarginal, fit_kde, inverse_pit, marginal_from_dict, pit
from .orthopoly import MAX_DEGREE, OrthonormalBasis1D, legendre_basis, stieltjes_basis
from .regression import HyperparamResult, default_ranges, select_hyperparams
from .sobol import MAX_DIM, sobol_points

log = logging.getLogger(__name__)

MIN_TRAIN = 10
MIN_RESAMPLE = 10_000
_PREDICT_BATCH = 200_000
SCHEMA_VERSION = 1


class Mode(str, Enum):
    APCE_X = "aPCEonX"
    LPCE_Z = "lPCEonZ"
    LPCE_X = "lPCEonX"

    @classmethod
    def parse(cls, name) -> "Mode":
        if isinstance(name, Mode):
            return name
        key = str(name).replace("-", "").replace("_", "").lower()
        aliases = {"apceonx": cls.APCE_X, "apcex": cls.APCE_X, "lpceonz": cls.LPCE_Z, "lpcez": cls.LPCE_Z,
                   "lpceonx": cls.LPCE_X, "lpcex": cls.LPCE_X}
        if key not in aliases:
            raise InputError(f"unknown PCE mode {name!r}; expected aPCEonX, lPCEonZ or lPCEonX")
        return aliases[key]


@dataclass(frozen=True)
class PceConfig:
    mode: Mode = Mode.APCE_X
    p_range: tuple | None = None
    r_range: tuple | None = None
    q: float = 0.75
    families: tuple = DEFAULT_FAMILIES
    # aPCEonX/lPCEonX only: fit the input copula too (needed for dependent resampling)
    fit_copula: bool = True
    range_margin: float = 0.01
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if not 0 < self.q <= 1:
            raise InputError(f"q must lie in (0, 1], got {self.q}")
        for name in ("p_range", "r_range"):
            val = getattr(self, name)
            if val is not None:
                val = tuple(sorted(int(v) for v in val))
                if not val or val[0] < (0 if name == "p_range" else 1):
                    raise InputError(f"{name} must be nonempty with valid entries")
                object.__setattr__(self, name, val)


@dataclass(frozen=True, eq=False)
class PceModel:
    mode: Mode
    marginals: tuple
    copula: CvineModel | None
    bases: tuple
    index_set: MultiIndexSet
    coefficients: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float).ravel()
        if coef.size != len(self.index_set):
            raise InputError(f"{coef.size} coefficients for {len(self.index_set)} basis terms")
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        object.__setattr__(self, "marginals", tuple(self.marginals))
        object.__setattr__(self, "bases", tuple(self.bases))
        if self.mode is Mode.LPCE_Z and self.d > 1 and self.copula is None:
            raise MissingCopula("lPCEonZ needs a copula to define the Rosenblatt map")

    @property
    def d(self) -> int:
        return self.index_set.d

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coefficients)

    def to_model_space(self, X) -> np.ndarray:
        """Map raw inputs to the variables the polynomials are defined on."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise SchemaMismatch(f"model expects {self.d} inputs, got {X.shape[1]}")
        if self.mode is not Mode.LPCE_Z:
            return X
        U = pit(self.marginals, X)
        return U if self.copula is None else self.copula.rosenblatt(U)

    def evaluate_basis_space(self, F) -> np.ndarray:
        """Evaluate the expansion on model-space inputs (``z`` for lPCEonZ)."""
        F = np.atleast_2d(np.asarray(F, dtype=float))
        sup = self.support
        out = np.full(F.shape[0], 0.0)
        if sup.size == 0:
            return out
        s = self.index_set.subset(sup)
        # subset re-sorts, but the set is already sorted so the order is preserved
        coef = self.coefficients[sup]
        for start in range(0, F.shape[0], _PREDICT_BATCH):
            sl = slice(start, start + _PREDICT_BATCH)
            vals = univariate_values(self.bases, F[sl], s.max_degrees)
            A = np.ones((F[sl].shape[0], len(s)))
            for i, V in enumerate(vals):
                col = s.indices[:, i]
                if np.any(col):
                    A *= V[:, col]
            out[sl] = A @ coef
        return out

    def predict(self, X) -> np.ndarray:
        return self.evaluate_basis_space(self.to_model_space(X))

    def out_of_hull_fraction(self, X) -> float:
        """Fraction of rows outside the bounding box of the training inputs."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[0] == 0:
            return 0.0
        lo = np.asarray(self.metadata["x_min"])
        hi = np.asarray(self.metadata["x_max"])
        return float(np.mean(np.any((X < lo) | (X > hi), axis=1)))

    def moments(self) -> tuple[float, float]:
        zero = np.flatnonzero(self.index_set.indices.sum(axis=1) == 0)
        mean = float(self.coefficients[zero[0]]) if zero.size else 0.0
        rest = np.delete(self.coefficients, zero)
        return mean, float(np.sum(rest**2))

    # ------------------------------------------------------------ persistence
    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "mode": self.mode.value,
            "d": self.d,
            "marginals": [m.to_dict() for m in self.marginals],
            "copula": None if self.copula is None else self.copula.to_dict(),
            "bases": [b.to_dict() for b in self.bases],
            "index_set": self.index_set.indices.tolist(),
            "index_params": {"p": self.index_set.p, "q": self.index_set.q, "r": self.index_set.r},
            "coefficients": self.coefficients.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PceModel":
        try:
            d = int(data["d"])
            ip = data.get("index_params", {})
            s = MultiIndexSet(d, int(ip.get("p", 0)), float(ip.get("q", 1.0)), int(ip.get("r", d)),
                              np.asarray(data["index_set"], dtype=np.int64).reshape(-1, d))
            return cls(
                Mode.parse(data["mode"]),
                tuple(marginal_from_dict(m) for m in data["marginals"]),
                None if data.get("copula") is None else CvineModel.from_dict(data["copula"]),
                tuple(OrthonormalBasis1D.from_dict(b) for b in data["bases"]),
                s,
                np.asarray(data["coefficients"], dtype=float),
                dict(data.get("metadata", {})),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaMismatch(f"malformed model record: {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "PceModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------- fitting

def _stieltjes_bases(marginals, p_max: int) -> tuple[list[OrthonormalBasis1D], int]:
    """Bases orthonormal to each marginal, lowering the degree until the
    quadrature orthonormality check passes in every dimension."""
    for p in range(p_max, -1, -1):
        try:
            return [stieltjes_basis(m, p) for m in marginals], p
        except QuadratureFailure as exc:
            log.warning("degree %d basis failed (%s); lowering", p, exc)
    raise QuadratureFailure("could not build an orthonormal basis of any degree")


def _input_model(X: np.ndarray, config: PceConfig, need_copula: bool):
    marginals = tuple(fit_kde(X[:, i]) for i in range(X.shape[1]))
    copula = None
    U = None
    if X.shape[1] > 1 and need_copula:
        U = pit(marginals, X)
        copula = fit_cvine(U, config.families)
    return marginals, copula, U


def fit(X, y, config: PceConfig | None = None, **overrides) -> PceModel:
    """Fit a sparse PCE to input rows ``X`` (n, d) and responses ``y`` (n,)."""
    config = PceConfig(**overrides) if config is None else config
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float).ravel()
    n, d = X.shape
    if y.size != n:
        raise InputError(f"X has {n} rows but y has {y.size} entries")
    if n < MIN_TRAIN:
        raise InsufficientData(f"need at least {MIN_TRAIN} observations, got {n}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise InputError("training data contain non-finite values")

    p_def, r_def = default_ranges(d, n)
    p_range = list(config.p_range or p_def)
    r_range = list(config.r_range or r_def)
    p_max = min(max(p_range), MAX_DEGREE)
    mode = config.mode

    need_copula = mode is Mode.LPCE_Z or config.fit_copula
    marginals, copula, U = _input_model(X, config, need_copula)
    meta: dict = {"x_min": X.min(axis=0).tolist(), "x_max": X.max(axis=0).tolist()}

    if mode is Mode.APCE_X:
        bases, p_max = _stieltjes_bases(marginals, p_max)
        F = X
    elif mode is Mode.LPCE_Z:
        U = pit(marginals, X) if U is None else U
        F = U if copula is None else copula.rosenblatt(U)
        bases = [legendre_basis(0.0, 1.0, p_max) for _ in range(d)]
    else:
        lo, hi = X.min(axis=0), X.max(axis=0)
        width = np.where(hi > lo, hi - lo, 1.0)
        lo, hi = lo - config.range_margin * width, hi + config.range_margin * width
        bases = [legendre_basis(lo[i], hi[i], p_max) for i in range(d)]
        meta["legendre_ranges"] = np.column_stack([lo, hi]).tolist()
        F = X
    p_range = [p for p in p_range if p <= p_max] or [p_max]

    vals = univariate_values(bases, F, [p_max] * d)

    def build(p: int, r: int):
        s = truncated_set(d, p, config.q, min(r, d))
        A = np.ones((n, len(s)))
        for i, V in enumerate(vals):
            col = s.indices[:, i]
            if np.any(col):
                A *= V[:, col]
        return A, s

    res: HyperparamResult = select_hyperparams(build, y, p_range, r_range, q=config.q)
    meta.update({
        "p": res.p, "r": res.r, "q": config.q, "loo": res.solution.loo_error, "n_train": n,
        "seed": config.seed, "n_terms": len(res.index_set), "n_nonzero": int(res.solution.support.size),
    })
    log.info("%s: p=%d r=%d loo=%.3e (%d/%d terms)", mode.value, res.p, res.r,
             res.solution.loo_error, res.solution.support.size, len(res.index_set))
    return PceModel(mode, marginals, copula, tuple(bases), res.index_set, res.solution.coefficients, meta)


def fit_table(data, mode=Mode.APCE_X, config: PceConfig | None = None) -> PceModel:
    """Fit on an (n, d+1) table whose last column is the response."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise InputError("data table needs at least one input column and a response column")
    if config is None:
        config = PceConfig(mode=mode)
    return fit(data[:, :-1], data[:, -1], config)


# ------------------------------------------------------------- statistics

@dataclass(frozen=True, eq=False)
class StatisticsReport:
    mean: float
    std: float
    pdf_estimate: KdeMarginal | None
    n_resample: int
    sampler: str

    def pdf_on_grid(self, n_points: int = 512, width: float = 4.0) -> tuple[np.ndarray, np.ndarray]:
        """Density on an equispaced grid; a constant output gives a single spike."""
        if self.pdf_estimate is None:
            return np.array([self.mean]), np.array([np.inf])
        grid = np.linspace(*self.pdf_estimate.support(width), n_points)
        return grid, self.pdf_estimate.pdf_binned(grid)

    def pdf(self, x) -> np.ndarray:
        if self.pdf_estimate is None:
            raise InputError("output is constant; its density is a point mass")
        return self.pdf_estimate.pdf_binned(x)


def uniform_points(d: int, n: int, sampler: str = "sobol", seed: int | None = None) -> tuple[np.ndarray, str]:
    if sampler not in ("sobol", "pseudo_random"):
        raise InputError(f"unknown sampler {sampler!r}")
    if sampler == "sobol" and d <= MAX_DIM:
        return sobol_points(d, n), "sobol"
    if sampler == "sobol":
        log.warning("no Sobol direction numbers for d=%d; using seeded pseudo-random points", d)
    return np.random.default_rng(seed).random((n, d)), "pseudo_random"


def resample_outputs(m: PceModel, n_resample: int = 10**6, sampler: str = "sobol",
                     seed: int | None = None, clip_to_hull: bool = True) -> tuple[np.ndarray, str]:
    """Model outputs at ``n_resample`` points drawn from the inferred input model.

    With ``clip_to_hull`` the resampled raw inputs are clamped to the bounding
    box of the training data: KDE marginals leak mass beyond the observed
    range, where a high-degree expansion is not supported by any data.
    """
    if n_resample < MIN_RESAMPLE:
        raise InputError(f"n_resample must be at least {MIN_RESAMPLE}")
    W, used = uniform_points(m.d, n_resample, sampler, seed)
    if m.mode is Mode.LPCE_Z:
        if m.d > 1 and m.copula is None:
            raise MissingCopula("lPCEonZ statistics need the fitted copula")
        # the expansion lives on the independent uniforms: evaluate there directly
        return m.evaluate_basis_space(W), used
    if m.copula is not None:
        U = m.copula.inverse_rosenblatt(W)
    else:
        if m.d > 1:
            log.warning("model has no copula; resampling with independent inputs")
        U = W
    X = inverse_pit(m.marginals, U, fast=True)
    if clip_to_hull:
        X = np.clip(X, m.metadata["x_min"], m.metadata["x_max"])
    return m.evaluate_basis_space(X), used


def resample_statistics(m: PceModel, n_resample: int = 10**6, sampler: str = "sobol",
                        seed: int | None = None, clip_to_hull: bool = True) -> StatisticsReport:
    y, used = resample_outputs(m, n_resample, sampler, seed, clip_to_hull)
    mean, std = float(np.mean(y)), float(np.std(y, ddof=1))
    pdf = fit_kde(y) if np.ptp(y) > 1e-12 * max(1.0, abs(mean)) else None
    if pdf is None:
        std = 0.0
    return StatisticsReport(mean, std, pdf, n_resample, used)
