"""Canonical vine (C-vine) copulas: fitting, density, Rosenblatt transform.

For a C-vine with variable order ``w_0, ..., w_{d-1}`` tree ``t`` holds the
pair copulas ``C_{w_t, w_k | w_0..w_{t-1}}`` for ``k > t``; the root ``w_t``
is always the first copula argument. Since the root of tree ``t`` has already
been conditioned on all earlier roots, its conditional value is exactly the
``t``-th Rosenblatt coordinate, which keeps both transforms a simple double
loop.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import FitFailure, InputError
from .families import DEFAULT_FAMILIES, EPS, INDEPENDENCE, PairCopula, fit_pair, kendall_tau_empirical

log = logging.getLogger(__name__)


def _clip(u):
    return np.clip(u, EPS, 1.0 - EPS)


@dataclass(frozen=True, eq=False)
class CvineModel:
    order: tuple
    pairs: tuple  # pairs[t][i] couples order[t] with order[t + 1 + i]

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        d = len(order)
        if sorted(order) != list(range(d)):
            raise InputError(f"order {order} is not a permutation of 0..{d - 1}")
        pairs = tuple(tuple(row) for row in self.pairs)
        if len(pairs) != d - 1 or any(len(pairs[t]) != d - 1 - t for t in range(d - 1)):
            raise InputError("pairs must be a triangular array with d-1-t copulas in tree t")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "pairs", pairs)

    @property
    def d(self) -> int:
        return len(self.order)

    @classmethod
    def independence(cls, d: int) -> "CvineModel":
        return cls(tuple(range(d)), tuple(tuple(INDEPENDENCE for _ in range(d - 1 - t)) for t in range(d - 1)))

    def pair(self, tree: int, var: int) -> PairCopula:
        """Copula of tree ``tree`` that links the root with original variable ``var``."""
        pos = self.order.index(var)
        return self.pairs[tree][pos - tree - 1]

    def rosenblatt(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        W = _clip(u[:, self.order])
        Z = np.empty_like(W)
        for k in range(self.d):
            x = W[:, k]
            for t in range(k):
                x = _clip(self.pairs[t][k - t - 1].hu(Z[:, t], x))
            Z[:, k] = x
        out = np.empty_like(Z)
        out[:, self.order] = Z
        return out

    def inverse_rosenblatt(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        Z = _clip(z[:, self.order])
        W = np.empty_like(Z)
        for k in range(self.d):
            x = Z[:, k]
            for t in range(k - 1, -1, -1):
                x = _clip(self.pairs[t][k - t - 1].hu_inv(x, Z[:, t]))
            W[:, k] = x
        out = np.empty_like(W)
        out[:, self.order] = W
        return out

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.inverse_rosenblatt(rng.random((n, self.d)))

    def logpdf(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        cur = _clip(u[:, self.order]).copy()
        ll = np.zeros(u.shape[0])
        for t in range(self.d - 1):
            root = cur[:, t].copy()
            for k in range(t + 1, self.d):
                pc = self.pairs[t][k - t - 1]
                ll += pc.logpdf(root, cur[:, k])
                cur[:, k] = _clip(pc.hu(root, cur[:, k]))
        return ll

    def loglik(self, u) -> float:
        return float(np.sum(self.logpdf(u)))

    def to_dict(self) -> dict:
        records = []
        for t, row in enumerate(self.pairs):
            for i, pc in enumerate(row):
                records.append({"tree": t + 1, "position": i, **pc.to_dict()})
        return {"type": "cvine", "order": list(self.order), "pairs": records}

    @classmethod
    def from_dict(cls, data: dict) -> "CvineModel":
        order = data["order"]
        d = len(order)
        rows = [[None] * (d - 1 - t) for t in range(d - 1)]
        for rec in data["pairs"]:
            rows[int(rec["tree"]) - 1][int(rec["position"])] = PairCopula.from_dict(rec)
        if any(pc is None for row in rows for pc in row):
            raise InputError("copula record is missing pair copulas")
        return cls(tuple(order), tuple(tuple(r) for r in rows))

    def summary(self) -> list[dict]:
        out = []
        for t, row in enumerate(self.pairs):
            for i, pc in enumerate(row):
                out.append({"tree": t + 1, "root": self.order[t], "var": self.order[t + 1 + i],
                            "given": list(self.order[:t]), "family": pc.family.value,
                            "rotation": pc.rotation, "params": list(pc.params), "tau": pc.tau()})
        return out


def tau_matrix(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    d = u.shape[1]
    T = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            T[i, j] = T[j, i] = kendall_tau_empirical(u[:, [i, j]])
    return T


def _pick_root(cur: np.ndarray, remaining: list[int]) -> int:
    if len(remaining) == 1:
        return remaining[0]
    sub = np.abs(tau_matrix(cur[:, remaining]))
    score = sub.sum(axis=1) - 1.0
    return remaining[int(np.argmax(score))]  # argmax takes the first (lowest index) on ties


def fit_cvine(pseudo_obs, families=DEFAULT_FAMILIES, order=None) -> CvineModel:
    """Sequential C-vine inference.

    The root of each tree maximises the summed |tau| with the remaining
    variables, computed on the current (conditional) pseudo-observations.
    Pair families are chosen by AIC; deeper trees are fitted on h-function
    outputs of the shallower ones. No joint likelihood refinement is done.
    """
    u = np.asarray(pseudo_obs, dtype=float)
    if u.ndim != 2 or u.shape[1] < 2:
        raise InputError("C-vine fitting needs an (n, d) array with d >= 2")
    n, d = u.shape
    if n < 10:
        raise FitFailure(f"C-vine fitting needs n >= 10, got {n}")
    cur = _clip(u).copy()
    remaining = list(range(d))
    chosen: list[int] = []
    fitted: dict[tuple[int, int], PairCopula] = {}
    for t in range(d - 1):
        root = int(order[t]) if order is not None else _pick_root(cur, remaining)
        remaining.remove(root)
        chosen.append(root)
        for j in remaining:
            pc = fit_pair(cur[:, [root, j]], families).copula
            fitted[(t, j)] = pc
            log.debug("tree %d: (%d, %d) -> %s", t + 1, root, j, pc)
        new = cur.copy()
        for j in remaining:
            new[:, j] = _clip(fitted[(t, j)].hu(cur[:, root], cur[:, j]))
        cur = new
    chosen.append(remaining[0])
    pairs = tuple(tuple(fitted[(t, chosen[k])] for k in range(t + 1, d)) for t in range(d - 1))
    return CvineModel(tuple(chosen), pairs)


def select_cvine_order(pseudo_obs, families=DEFAULT_FAMILIES) -> tuple:
    return fit_cvine(pseudo_obs, families).order


def rosenblatt(c: CvineModel, u) -> np.ndarray:
    return c.rosenblatt(u)


def inverse_rosenblatt(c: CvineModel, z) -> np.ndarray:
    return c.inverse_rosenblatt(z)
