"""23-bar planar truss solved by the direct stiffness method, with its
lognormal / Gumbel input model.

Geometry: bottom-chord nodes at x = 0, 4, ..., 24 (y = 0), top nodes at
x = 2, 6, ..., 22 (y = 2). Bars: 6 bottom chord, 5 top chord, and two
diagonals from every top node to its neighbouring bottom nodes. Pin at
(0, 0), roller at (24, 0); loads P1..P6 act downward on the top nodes and
the response is the downward deflection of the node at (12, 0).
Input columns are (E1, E2, A1, A2, P1, ..., P6); E1/A1 belong to the chords,
E2/A2 to the diagonals.
"""
from __future__ import annotations

import numpy as np

from ..copula.families import INDEPENDENCE, PairCopula
from ..copula.vine import CvineModel
from ..errors import InputError, SingularStiffness

EULER_GAMMA = 0.5772156649015329
N_INPUTS = 10

BOTTOM = [(4.0 * i, 0.0) for i in range(7)]
TOP = [(2.0 + 4.0 * i, 2.0) for i in range(6)]
NODES = np.array(BOTTOM + TOP)
_T = 7  # index of the first top node


def _bars():
    bars, group = [], []
    for i in range(6):
        bars.append((i, i + 1)); group.append(0)
    for i in range(5):
        bars.append((_T + i, _T + i + 1)); group.append(0)
    for i in range(6):
        bars.append((i, _T + i)); group.append(1)
        bars.append((_T + i, i + 1)); group.append(1)
    return np.array(bars), np.array(group)


BARS, BAR_GROUP = _bars()
LOAD_NODES = np.arange(_T, _T + 6)
MIDSPAN_NODE = 3
# fixed dofs: pin (ux, uy at node 0), roller (uy at node 6)
FIXED_DOFS = np.array([0, 1, 2 * 6 + 1])
FREE_DOFS = np.setdiff1d(np.arange(2 * len(NODES)), FIXED_DOFS)

E_MEAN, E_STD = 2.1e11, 2.1e10
A1_MEAN, A1_STD = 2.0e-3, 2.0e-4
A2_MEAN, A2_STD = 1.0e-3, 1.0e-4
P_MEAN, P_STD = 5.0e4, 7.5e3
P_THETA = 1.1


def _bar_geometry():
    d = NODES[BARS[:, 1]] - NODES[BARS[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    c, s = d[:, 0] / length, d[:, 1] / length
    # unit stiffness blocks k/(EA/L) for each bar in global coordinates
    v = np.stack([-c, -s, c, s], axis=1)
    blocks = v[:, :, None] * v[:, None, :] / length[:, None, None]
    dofs = np.stack([2 * BARS[:, 0], 2 * BARS[:, 0] + 1, 2 * BARS[:, 1], 2 * BARS[:, 1] + 1], axis=1)
    return length, blocks, dofs


BAR_LENGTH, _BLOCKS, _DOFS = _bar_geometry()


def _group_stiffness() -> np.ndarray:
    """Free-dof stiffness of each bar group per unit EA: K = EA_1 K_0 + EA_2 K_1."""
    n = 2 * len(NODES)
    K = np.zeros((2, n, n))
    for b in range(len(BARS)):
        K[BAR_GROUP[b]][np.ix_(_DOFS[b], _DOFS[b])] += _BLOCKS[b]
    return K[:, FREE_DOFS][:, :, FREE_DOFS]


_K_GROUPS = _group_stiffness()
_LOAD_ROWS = np.searchsorted(FREE_DOFS, 2 * LOAD_NODES + 1)
_OUT_ROW = int(np.searchsorted(FREE_DOFS, 2 * MIDSPAN_NODE + 1))


def truss_eval(X, batch: int = 20_000) -> np.ndarray:
    """Midspan deflection (m, downward positive) for each row of ``X`` (n, 10)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != N_INPUTS:
        raise InputError(f"truss inputs have {N_INPUTS} columns, got {X.shape[1]}")
    if np.any(X[:, :4] <= 0):
        raise InputError("Young's moduli and areas must be positive")
    out = np.empty(X.shape[0])
    for start in range(0, X.shape[0], batch):
        x = X[start:start + batch]
        K = (x[:, 0] * x[:, 2])[:, None, None] * _K_GROUPS[0] + (x[:, 1] * x[:, 3])[:, None, None] * _K_GROUPS[1]
        F = np.zeros((x.shape[0], FREE_DOFS.size))
        F[:, _LOAD_ROWS] = -x[:, 4:]
        try:
            U = np.linalg.solve(K, F[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError as exc:
            raise SingularStiffness("truss stiffness matrix is singular") from exc
        if not np.all(np.isfinite(U)):
            raise SingularStiffness("truss stiffness matrix is singular")
        out[start:start + batch] = -U[:, _OUT_ROW]
    return out


def truss_solve(E1: float, E2: float, A1: float, A2: float, P) -> float:
    P = np.asarray(P, dtype=float).ravel()
    if P.size != 6:
        raise InputError("the truss carries exactly 6 loads")
    return float(truss_eval(np.concatenate([[E1, E2, A1, A2], P]))[0])


def lognormal_params(mean: float, std: float) -> tuple[float, float]:
    """(mu, sigma) of log X for a lognormal with the given mean and std."""
    s2 = np.log1p((std / mean) ** 2)
    return float(np.log(mean) - 0.5 * s2), float(np.sqrt(s2))


def gumbel_params(mean: float, std: float) -> tuple[float, float]:
    """Location alpha and scale beta of a Gumbel (max) law with the given moments."""
    beta = np.sqrt(6.0) * std / np.pi
    return float(mean - EULER_GAMMA * beta), float(beta)


TRUSS_LOAD_VINE = CvineModel(
    tuple(range(6)),
    tuple(tuple(PairCopula("gumbel", 0, (P_THETA,)) if t == 0 else INDEPENDENCE for _ in range(5 - t))
          for t in range(5)),
)


def truss_inputs(n: int, rng: np.random.Generator) -> np.ndarray:
    X = np.empty((n, N_INPUTS))
    for col, (m, s) in enumerate([(E_MEAN, E_STD), (E_MEAN, E_STD), (A1_MEAN, A1_STD), (A2_MEAN, A2_STD)]):
        mu, sig = lognormal_params(m, s)
        X[:, col] = rng.lognormal(mu, sig, n)
    alpha, beta = gumbel_params(P_MEAN, P_STD)
    U = TRUSS_LOAD_VINE.sample(n, rng)
    X[:, 4:] = alpha - beta * np.log(-np.log(U))
    return X


def truss_sampler(n: int, seed: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    X = truss_inputs(n, np.random.default_rng(seed))
    return X, truss_eval(X)
