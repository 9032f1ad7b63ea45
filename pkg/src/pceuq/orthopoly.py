"""Univariate orthonormal polynomials via three-term recurrences.

A basis is stored as the monic recurrence coefficients ``(a_k, b_k)``:

    pi_{k+1}(x) = (x - a_k) pi_k(x) - b_k pi_{k-1}(x),   b_0 = 1 (total mass)

The orthonormal polynomials are ``phi_k = pi_k / sqrt(b_0 b_1 ... b_k)``,
evaluated with the normalised recurrence

    sqrt(b_{k+1}) phi_{k+1} = (x - a_k) phi_k - sqrt(b_k) phi_{k-1}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeMismatch, InputError, InvalidInterval, QuadratureFailure
from .marginals import BoundedUniformMarginal, KdeMarginal

MAX_DEGREE = 15
_GL_NODES = 64


@dataclass(frozen=True, eq=False)
class OrthonormalBasis1D:
    recurrence_a: np.ndarray
    recurrence_b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.recurrence_a, dtype=float)
        b = np.asarray(self.recurrence_b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise InputError("recurrence_a and recurrence_b must be 1-D of equal length")
        if np.any(b <= 0):
            raise InputError("recurrence_b must be positive")
        object.__setattr__(self, "recurrence_a", a)
        object.__setattr__(self, "recurrence_b", b)

    @property
    def degree_max(self) -> int:
        return self.recurrence_a.size - 1

    @property
    def normalizers(self) -> np.ndarray:
        """Norms ``||pi_k||`` of the monic polynomials (with b_0 = 1)."""
        return np.sqrt(np.cumprod(self.recurrence_b))

    def __call__(self, x, degree: int | None = None) -> np.ndarray:
        return eval_basis(self, x, degree)

    def to_dict(self) -> dict:
        return {"recurrence_a": self.recurrence_a.tolist(), "recurrence_b": self.recurrence_b.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "OrthonormalBasis1D":
        return cls(np.asarray(d["recurrence_a"], float), np.asarray(d["recurrence_b"], float))


def eval_basis(b: OrthonormalBasis1D, x, degree: int | None = None) -> np.ndarray:
    """Values ``phi_0(x), ..., phi_p(x)`` stacked along a new last axis."""
    p = b.degree_max if degree is None else degree
    if p > b.degree_max:
        raise DegreeMismatch(f"basis has degree {b.degree_max}, asked for {p}")
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (p + 1,))
    out[..., 0] = 1.0
    if p == 0:
        return out
    a, sb = b.recurrence_a, np.sqrt(b.recurrence_b)
    out[..., 1] = (x - a[0]) / sb[1]
    for k in range(1, p):
        out[..., k + 1] = ((x - a[k]) * out[..., k] - sb[k] * out[..., k - 1]) / sb[k + 1]
    return out


def _check_degree(p: int) -> None:
    if p < 0:
        raise InputError("degree must be nonnegative")
    if p > MAX_DEGREE:
        raise InputError(f"degree {p} exceeds the hard cap {MAX_DEGREE}")


def legendre_basis(lo: float, hi: float, p: int) -> OrthonormalBasis1D:
    """Orthonormal shifted Legendre polynomials for the uniform density on [lo, hi]."""
    if not lo < hi:
        raise InvalidInterval(f"need lo < hi, got [{lo}, {hi}]")
    _check_degree(p)
    k = np.arange(p + 1, dtype=float)
    a = np.full(p + 1, 0.5 * (lo + hi))
    half = 0.5 * (hi - lo)
    b = np.ones(p + 1)
    b[1:] = half**2 * k[1:] ** 2 / (4 * k[1:] ** 2 - 1)
    return OrthonormalBasis1D(a, b)


def quadrature_rule(density, n_nodes: int = _GL_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights ``w_k ~ f(x_k) dx`` integrating smooth functions against ``density``.

    Composite Gauss-Legendre: a KDE is covered by panels no wider than one
    bandwidth over [min - 10h, max + 10h]; a uniform density is a single
    panel split in 8.
    """
    if isinstance(density, BoundedUniformMarginal):
        edges = np.linspace(density.lo, density.hi, 9)
    elif isinstance(density, KdeMarginal):
        lo, hi = density.support(10.0)
        n_panels = int(np.ceil((hi - lo) / density.bandwidth))
        edges = np.linspace(lo, hi, n_panels + 1)
    else:
        lo, hi = density.support(10.0)
        edges = np.linspace(lo, hi, 257)
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    left, right = edges[:-1, None], edges[1:, None]
    half = 0.5 * (right - left)
    nodes = (left + half * (t[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel() * density.pdf(nodes)
    return nodes, weights


def _stieltjes(nodes: np.ndarray, weights: np.ndarray, p: int) -> OrthonormalBasis1D:
    """Discretised Stieltjes procedure in its normalised (Lanczos-like) form."""
    mass = weights.sum()
    w = weights / mass
    a = np.zeros(p + 1)
    b = np.ones(p + 1)
    prev = np.zeros_like(nodes)
    cur = np.ones_like(nodes)
    for k in range(p + 1):
        a[k] = np.sum(w * nodes * cur * cur)
        if k == p:
            break
        nxt = (nodes - a[k]) * cur - (np.sqrt(b[k]) * prev if k > 0 else 0.0)
        # one re-orthogonalisation pass against the two previous polynomials
        nxt -= np.sum(w * nxt * cur) * cur
        if k > 0:
            nxt -= np.sum(w * nxt * prev) * prev
        b[k + 1] = np.sum(w * nxt * nxt)
        if not b[k + 1] > 0:
            raise QuadratureFailure(f"Stieltjes breakdown at degree {k + 1}")
        prev, cur = cur, nxt / np.sqrt(b[k + 1])
    return OrthonormalBasis1D(a, b)


def gram_matrix(b: OrthonormalBasis1D, density, nodes=None, weights=None) -> np.ndarray:
    if nodes is None:
        nodes, weights = quadrature_rule(density)
    V = eval_basis(b, nodes)
    return (V * weights[:, None]).T @ V


def stieltjes_basis(density, p: int, tol: float = 1e-4) -> OrthonormalBasis1D:
    """Polynomials orthonormal w.r.t. an arbitrary marginal density."""
    _check_degree(p)
    nodes, weights = quadrature_rule(density)
    basis = _stieltjes(nodes, weights, p)
    err = np.abs(gram_matrix(basis, density, nodes, weights) - np.eye(p + 1)).max()
    if err > tol:
        raise QuadratureFailure(f"orthonormality defect {err:.2e} exceeds {tol:.0e} at degree {p}")
    return basis
