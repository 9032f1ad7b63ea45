"""Rescaled Ishigami function with a Gumbel / Student-t C-vine input model."""
from __future__ import annotations

import numpy as np

from ..copula.families import INDEPENDENCE, PairCopula
from ..copula.vine import CvineModel
from ..marginals import BoundedUniformMarginal

A, B = 7.0, 0.1
LOWER, UPPER = -np.pi, np.pi
_SHIFT = 1.0 + np.pi**4 / 10.0
_SCALE = 9.0 + np.pi**4 / 5.0

ISHIGAMI_VINE = CvineModel(
    (0, 1, 2),
    ((PairCopula("gumbel", 0, (2.0,)), PairCopula("student_t", 0, (0.5, 3.0))), (INDEPENDENCE,)),
)
ISHIGAMI_MARGINALS = tuple(BoundedUniformMarginal(LOWER, UPPER) for _ in range(3))


def ish(x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s1 = np.sin(x[:, 0])
    return s1 + A * np.sin(x[:, 1]) ** 2 + B * x[:, 2] ** 4 * s1


def ishigami_eval(x) -> np.ndarray:
    """Ishigami function rescaled to take values in [1, 2]."""
    return 1.0 + (ish(x) + _SHIFT) / _SCALE


def ishigami_inputs(n: int, rng: np.random.Generator) -> np.ndarray:
    u = ISHIGAMI_VINE.sample(n, rng)
    return LOWER + (UPPER - LOWER) * u


def ishigami_sampler(n: int, seed: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    X = ishigami_inputs(n, np.random.default_rng(seed))
    return X, ishigami_eval(X)
