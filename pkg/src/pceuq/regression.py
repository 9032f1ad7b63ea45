"""Coefficient estimation: OLS, hybrid least angle regression, LOO error,
and the (p, r) hyperparameter search."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np
from scipy.linalg import solve_triangular

from .errors import LeverageOne, NoFeasibleModel, NumericalBreakdown, NumericalError, RankDeficient

log = logging.getLogger(__name__)

LEVERAGE_TOL = 1e-10
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    A: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        if A.shape[0] != y.size or y.size < 1:
            raise ValueError(f"design has {A.shape[0]} rows but y has {y.size} entries")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
            raise NumericalBreakdown("design matrix or response has non-finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True, eq=False)
class SparseSolution:
    coefficients: np.ndarray
    support: np.ndarray
    loo_error: float
    path_loo: np.ndarray = field(default_factory=lambda: np.empty(0))


def _relative(mse: float, y: np.ndarray) -> float:
    var = np.var(y, ddof=1) if y.size > 1 else 0.0
    return mse / var if var > 0 else mse


def ols_solve(dm: DesignMatrix) -> SparseSolution:
    n, P = dm.A.shape
    if n <= P:
        raise RankDeficient(f"OLS needs n > |A| (n={n}, |A|={P})")
    Q, R = np.linalg.qr(dm.A)
    diag = np.abs(np.diag(R))
    if diag.min() == 0 or np.linalg.cond(R) > 1e12:
        raise RankDeficient("design matrix is numerically rank deficient")
    coef = solve_triangular(R, Q.T @ dm.y)
    h = np.sum(Q * Q, axis=1)
    res = dm.y - Q @ (Q.T @ dm.y)
    loo = _loo_from(res, h, dm.y) if h.max() < 1 - LEVERAGE_TOL else np.inf
    return SparseSolution(coef, np.arange(P), loo)


def _loo_from(res: np.ndarray, h: np.ndarray, y: np.ndarray) -> float:
    return _relative(float(np.mean((res / (1.0 - h)) ** 2)), y)


def loo_error(dm: DesignMatrix, support) -> float:
    """Relative leave-one-out error of the OLS fit on ``support``, from leverages."""
    support = np.asarray(support, dtype=int)
    As = dm.A[:, support]
    if As.shape[1] >= dm.n:
        raise LeverageOne("support as large as the sample interpolates the data")
    Q, R = np.linalg.qr(As)
    if np.abs(np.diag(R)).min() <= 1e-12 * np.abs(np.diag(R)).max():
        raise RankDeficient("active columns are collinear")
    h = np.sum(Q * Q, axis=1)
    if h.max() >= 1 - LEVERAGE_TOL:
        raise LeverageOne(f"max leverage {h.max():.12f}")
    res = dm.y - Q @ (Q.T @ dm.y)
    return _loo_from(res, h, dm.y)


def lar_select(dm: DesignMatrix, max_steps: int | None = None, early_stop: bool = True) -> SparseSolution:
    """Hybrid LAR: follow the LARS path for the order in which columns enter,
    refit OLS on each active set and keep the one with the smallest LOO error.

    The active columns are held in an incrementally grown thin QR factorisation,
    so leverages and fitted values are updated in O(n) per step. With
    ``early_stop`` the path is abandoned once the LOO error has not improved
    for max(10, 10% of max_steps) steps.
    """
    A, y = dm.A, dm.y
    n, P = A.shape
    norms = np.linalg.norm(A, axis=0)
    usable = norms > 0
    X = np.where(usable, A / np.where(usable, norms, 1.0), 0.0)
    limit = min(n - 1, int(usable.sum()))
    max_steps = limit if max_steps is None else min(max_steps, limit)
    if max_steps < 1:
        raise RankDeficient("no usable columns or too few samples for LAR")

    Q = np.zeros((n, max_steps))
    R = np.zeros((max_steps, max_steps))
    active: list[int] = []
    is_active = np.zeros(P, dtype=bool)
    blocked = ~usable
    lev = np.zeros(n)
    fitted = np.zeros(n)
    mu = np.zeros(n)
    path_loo = []
    best_loo, since_best = np.inf, 0
    stall_limit = max(10, max_steps // 10)

    c = X.T @ (y - mu)
    j = int(np.argmax(np.where(blocked, -np.inf, np.abs(c))))
    for _ in range(max_steps):
        k = len(active)
        v = X[:, j]
        r = Q[:, :k].T @ v
        w = v - Q[:, :k] @ r
        r2 = Q[:, :k].T @ w
        w -= Q[:, :k] @ r2
        r += r2
        rnorm = np.linalg.norm(w)
        if rnorm < 1e-9:
            # column lies in the span of the active set; exclude it
            blocked[j] = True
            cand = np.where(blocked | is_active, -np.inf, np.abs(c))
            if not np.isfinite(cand.max()):
                break
            j = int(np.argmax(cand))
            continue
        Q[:, k] = w / rnorm
        R[:k, k] = r
        R[k, k] = rnorm
        active.append(j)
        is_active[j] = True
        k += 1

        qk = Q[:, k - 1]
        lev += qk * qk
        fitted += qk * (qk @ y)
        if lev.max() >= 1 - LEVERAGE_TOL:
            path_loo.append(np.inf)
        else:
            path_loo.append(_loo_from(y - fitted, lev, y))
        if path_loo[-1] < best_loo:
            best_loo, since_best = path_loo[-1], 0
        else:
            since_best += 1
        if early_stop and since_best >= stall_limit:
            break

        free = ~(is_active | blocked)
        if not free.any() or k >= max_steps:
            break
        s = np.sign(c[active])
        s[s == 0] = 1.0
        Rk = R[:k, :k]
        g = solve_triangular(Rk, solve_triangular(Rk, s, trans="T"))
        norm_sq = float(s @ g)
        if not (norm_sq > 0 and np.isfinite(norm_sq)):
            raise NumericalBreakdown("LARS equiangular direction is undefined")
        AA = 1.0 / np.sqrt(norm_sq)
        wdir = AA * g
        u = Q[:, :k] @ (Rk @ wdir)
        a = X.T @ u
        C = np.max(np.abs(c[active]))
        with np.errstate(divide="ignore", invalid="ignore"):
            g1 = (C - c) / (AA - a)
            g2 = (C + c) / (AA + a)
        g1 = np.where(free & (g1 > 1e-14) & np.isfinite(g1), g1, np.inf)
        g2 = np.where(free & (g2 > 1e-14) & np.isfinite(g2), g2, np.inf)
        gam = np.minimum(g1, g2)
        j = int(np.argmin(gam))
        gamma = gam[j]
        if not np.isfinite(gamma):
            break
        mu += gamma * u
        c = X.T @ (y - mu)
        if not np.all(np.isfinite(c)):
            raise NumericalBreakdown("non-finite correlations on the LARS path")

    if not active:
        raise RankDeficient("LAR could not activate any column")
    path_loo = np.asarray(path_loo)
    # sparsest active set within TIE_TOL of the minimum
    best = int(np.argmax(path_loo <= path_loo.min() + TIE_TOL))
    if not np.isfinite(path_loo[best]):
        raise LeverageOne("every LAR path step interpolates the data")
    k = best + 1
    beta = solve_triangular(R[:k, :k], Q[:, :k].T @ y)
    support = np.array(active[:k])
    coef = np.zeros(P)
    coef[support] = beta / norms[support]
    order = np.argsort(support)
    return SparseSolution(coef, support[order], float(path_loo[best]), path_loo)


@dataclass(frozen=True, eq=False)
class HyperparamResult:
    p: int
    r: int
    solution: SparseSolution
    index_set: object
    history: dict


def default_ranges(d: int, n: int) -> tuple[list[int], list[int]]:
    p_max = 1
    while p_max < 10 and comb(d + p_max + 1, p_max + 1) <= n:
        p_max += 1
    return list(range(1, p_max + 1)), list(range(1, min(d, 4) + 1))


def select_hyperparams(
    build: Callable[[int, int], tuple[np.ndarray, object]],
    y,
    p_range,
    r_range,
    q: float = 0.75,
    patience: int = 2,
) -> HyperparamResult:
    """Search (p, r) with LAR, r in the outer loop and p in the inner one.

    ``build(p, r)`` returns the design matrix and the index set for that
    truncation (q fixed by the caller). Each loop stops once the error has
    not improved for ``patience`` consecutive steps.
    """
    y = np.asarray(y, dtype=float)
    p_range, r_range = sorted(p_range), sorted(r_range)
    if not p_range or not r_range:
        raise ValueError("p_range and r_range must be nonempty")
    history: dict[tuple[int, int], float] = {}
    fits: dict[tuple[int, int], tuple] = {}
    cache: dict[bytes, tuple] = {}

    def evaluate(p: int, r: int) -> float:
        try:
            A, s = build(p, r)
            key = np.ascontiguousarray(s.indices).tobytes()
            if key not in cache:
                cache[key] = (lar_select(DesignMatrix(A, y)), s)
            fits[(p, r)] = cache[key]
            err = cache[key][0].loo_error
        except NumericalError as exc:
            log.debug("candidate p=%d r=%d failed: %s", p, r, exc)
            err = np.inf
        history[(p, r)] = err
        return err

    best_overall = np.inf
    stall_r = 0
    for r in r_range:
        best_r = np.inf
        stall_p = 0
        for p in p_range:
            err = evaluate(p, r)
            if err < best_r - TIE_TOL:
                best_r, stall_p = err, 0
            else:
                stall_p += 1
                if stall_p >= patience:
                    break
        if best_r < best_overall - TIE_TOL:
            best_overall, stall_r = best_r, 0
        else:
            stall_r += 1
            if stall_r >= patience:
                break

    finite = [(e, p, r) for (p, r), e in history.items() if np.isfinite(e)]
    if not finite:
        raise NoFeasibleModel("every (p, r) candidate failed")
    e_min = min(e for e, _, _ in finite)
    p_best, r_best = min((p, r) for e, p, r in finite if e <= e_min + TIE_TOL)
    sol, s = fits[(p_best, r_best)]
    return HyperparamResult(p_best, r_best, sol, s, history)
