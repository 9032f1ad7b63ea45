"""Error measures for pointwise predictions, moments and densities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import GridTooCoarse, LengthMismatch, ZeroReference

DENSITY_FLOOR = 1e-300
MIN_GRID = 128
DEFAULT_GRID = 4096


@dataclass(frozen=True)
class ErrorReport:
    mae: float | None = None
    rmae: float | None = None
    rel_mean_err: float | None = None
    rel_std_err: float | None = None
    kl_div: float | None = None


def _pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if pred.size != truth.size or pred.size == 0:
        raise LengthMismatch(f"pred has {pred.size} entries, truth has {truth.size}")
    return pred, truth


def mae(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    return float(np.mean(np.abs(truth - pred)))


def rmae(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    if np.any(truth == 0):
        raise ZeroReference("relative error undefined where the reference is 0")
    return float(np.mean(np.abs(1.0 - pred / truth)))


def rel_moment_errors(est_mean: float, est_std: float, ref_mean: float, ref_std: float) -> tuple[float, float]:
    if ref_mean == 0 or ref_std == 0:
        raise ZeroReference("reference mean and std must be nonzero")
    return abs(1.0 - est_mean / ref_mean), abs(1.0 - est_std / ref_std)


def kl_divergence(f_est, f_ref, grid) -> float:
    """KL(f_ref || f_est) by the trapezoid rule on ``grid``.

    ``f_est`` and ``f_ref`` are callables or arrays of values on the grid;
    both are floored at 1e-300 before taking logs. The absolute value is
    returned so that round-off never yields a tiny negative divergence.
    """
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size < MIN_GRID:
        raise GridTooCoarse(f"KL grid needs at least {MIN_GRID} nodes, got {grid.size}")
    fe = np.asarray(f_est(grid) if callable(f_est) else f_est, dtype=float)
    fr = np.asarray(f_ref(grid) if callable(f_ref) else f_ref, dtype=float)
    if fe.shape != grid.shape or fr.shape != grid.shape:
        raise LengthMismatch("density values must match the grid")
    fe = np.maximum(fe, DENSITY_FLOOR)
    fr = np.maximum(fr, DENSITY_FLOOR)
    return abs(float(trapezoid(fr * np.log(fr / fe), grid)))


def support_grid(*samples, n_nodes: int = DEFAULT_GRID, tail: float = 1e-6, pad: float = 0.0) -> np.ndarray:
    """Uniform grid over the union of the central 1 - tail mass of each sample
    (widened by ``pad`` on both sides, e.g. a few KDE bandwidths)."""
    lo = min(float(np.quantile(np.asarray(s), tail / 2)) for s in samples) - pad
    hi = max(float(np.quantile(np.asarray(s), 1 - tail / 2)) for s in samples) + pad
    return np.linspace(lo, hi, n_nodes)
