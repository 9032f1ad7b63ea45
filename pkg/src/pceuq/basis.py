"""Truncated multi-index sets and the tensor-product design matrix."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DegreeMismatch, InputError, SizeOverflow
from .orthopoly import OrthonormalBasis1D, eval_basis

MAX_SET_SIZE = 10**7


def q_norm(alpha: np.ndarray, q: float) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    return np.sum(alpha**q, axis=-1) ** (1.0 / q)


def rank(alpha: np.ndarray) -> np.ndarray:
    return np.count_nonzero(alpha, axis=-1)


def _sort_key(indices: np.ndarray) -> np.ndarray:
    """Order by total degree, then lexicographically descending on the leading
    dimensions, so (1,0) precedes (0,1)."""
    keys = [-indices[:, i] for i in range(indices.shape[1] - 1, -1, -1)]
    keys.append(indices.sum(axis=1))
    return np.lexsort(keys)


@dataclass(frozen=True, eq=False)
class MultiIndexSet:
    d: int
    p: int
    q: float
    r: int
    indices: np.ndarray  # (size, d) int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1, self.d)
        idx = np.unique(idx, axis=0)
        idx = idx[_sort_key(idx)]
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return self.indices.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiIndexSet) and np.array_equal(self.indices, other.indices)

    @property
    def max_degrees(self) -> np.ndarray:
        return self.indices.max(axis=0)

    def as_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.indices]

    def subset(self, mask) -> "MultiIndexSet":
        return MultiIndexSet(self.d, self.p, self.q, self.r, self.indices[np.asarray(mask)])


def total_degree_set(d: int, p: int) -> MultiIndexSet:
    if d < 1 or p < 0:
        raise InputError(f"need d >= 1 and p >= 0, got d={d}, p={p}")
    size = comb(d + p, p)
    if size > MAX_SET_SIZE:
        raise SizeOverflow(f"total-degree set has {size} > {MAX_SET_SIZE} elements")
    return MultiIndexSet(d, p, 1.0, d, _enumerate(d, p, 1.0, d))


def hyperbolic_filter(s: MultiIndexSet, q: float) -> MultiIndexSet:
    if not 0 < q <= 1:
        raise InputError(f"q must lie in (0, 1], got {q}")
    keep = q_norm(s.indices, q) <= s.p + 1e-10
    return MultiIndexSet(s.d, s.p, min(q, s.q), s.r, s.indices[keep])


def interaction_filter(s: MultiIndexSet, r: int) -> MultiIndexSet:
    if r < 1:
        raise InputError(f"r must be >= 1, got {r}")
    keep = rank(s.indices) <= r
    return MultiIndexSet(s.d, s.p, s.q, min(r, s.r), s.indices[keep])


def _enumerate(d: int, p: int, q: float, r: int) -> np.ndarray:
    """Depth-first enumeration with pruning on q-norm and rank."""
    out: list[tuple[int, ...]] = []
    budget = p**q + 1e-10
    prefix = [0] * d

    def rec(i: int, used: float, nnz: int, total: int):
        if i == d:
            out.append(tuple(prefix))
            return
        for k in range(p - total + 1):
            cost = used + (k**q if k else 0.0)
            if cost > budget:
                break
            if k and nnz >= r:
                break
            prefix[i] = k
            rec(i + 1, cost, nnz + (k > 0), total + k)
        prefix[i] = 0

    rec(0, 0.0, 0, 0)
    return np.array(out, dtype=np.int64).reshape(-1, d)


def truncated_set(d: int, p: int, q: float = 1.0, r: int | None = None) -> MultiIndexSet:
    """Combined total-degree, hyperbolic and maximum-interaction truncation,
    generated directly without materialising the full total-degree set."""
    r = d if r is None else r
    if d < 1 or p < 0:
        raise InputError(f"need d >= 1 and p >= 0, got d={d}, p={p}")
    if not 0 < q <= 1:
        raise InputError(f"q must lie in (0, 1], got {q}")
    if r < 1:
        raise InputError(f"r must be >= 1, got {r}")
    idx = _enumerate(d, p, q, r)
    if idx.shape[0] > MAX_SET_SIZE:
        raise SizeOverflow(f"truncated set has {idx.shape[0]} elements")
    return MultiIndexSet(d, p, q, min(r, d), idx)


def univariate_values(bases, X: np.ndarray, degrees) -> list[np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    vals = []
    for i, b in enumerate(bases):
        if degrees[i] > b.degree_max:
            raise DegreeMismatch(f"basis {i} has degree {b.degree_max} < {degrees[i]}")
        vals.append(eval_basis(b, X[:, i], int(degrees[i])))
    return vals


def design_matrix(bases: list[OrthonormalBasis1D], s: MultiIndexSet, X) -> np.ndarray:
    """Rows ``Psi_alpha(x) = prod_i phi_{alpha_i}(x_i)`` for every row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != s.d or len(bases) != s.d:
        raise DegreeMismatch(f"expected {s.d} input columns/bases")
    vals = univariate_values(bases, X, s.max_degrees)
    A = np.ones((X.shape[0], len(s)))
    for i, V in enumerate(vals):
        col = s.indices[:, i]
        if np.any(col):
            A *= V[:, col]
    return A


def eval_design_row(bases, s: MultiIndexSet, x) -> np.ndarray:
    return design_matrix(bases, s, np.asarray(x, dtype=float)[None, :])[0]
