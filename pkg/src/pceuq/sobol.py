"""Unscrambled Sobol' sequence (Joe-Kuo direction numbers, up to 10 dimensions)."""
from __future__ import annotations

import numpy as np

from .errors import DimensionUnsupported, InputError

MAX_DIM = 10
_BITS = 32
# (degree s, polynomial coefficient a, initial direction numbers m_1..m_s) for dims 2..10
_JOE_KUO = (
    (1, 0, (1,)),
    (2, 1, (1, 3)),
    (3, 1, (1, 3, 1)),
    (3, 2, (1, 1, 1)),
    (4, 1, (1, 1, 3, 3)),
    (4, 4, (1, 3, 5, 13)),
    (5, 2, (1, 1, 5, 5, 17)),
    (5, 4, (1, 1, 5, 5, 5)),
    (5, 7, (1, 1, 7, 11, 19)),
)


def _directions(d: int) -> np.ndarray:
    V = np.zeros((d, _BITS), dtype=np.uint64)
    V[0] = [1 << (_BITS - 1 - i) for i in range(_BITS)]
    for j in range(1, d):
        s, a, m = _JOE_KUO[j - 1]
        v = [int(m[i]) << (_BITS - 1 - i) for i in range(s)]
        for i in range(s, _BITS):
            x = v[i - s] ^ (v[i - s] >> s)
            for k in range(1, s):
                if (a >> (s - 1 - k)) & 1:
                    x ^= v[i - k]
            v.append(x)
        V[j] = v
    return V


def sobol_points(d: int, n: int) -> np.ndarray:
    """First ``n`` points after the origin, as an (n, d) array in (0, 1)^d."""
    if d < 1 or n < 0:
        raise InputError(f"need d >= 1 and n >= 0, got d={d}, n={n}")
    if d > MAX_DIM:
        raise DimensionUnsupported(f"Sobol direction numbers are embedded for d <= {MAX_DIM}")
    if n >= 2**_BITS - 1:
        raise InputError("too many Sobol points requested")
    V = _directions(d)
    idx = np.arange(1, n + 1, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    X = np.zeros((n, d), dtype=np.uint64)
    for bit in range(_BITS):
        on = ((gray >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        if not on.any():
            break
        X[on] ^= V[:, bit]
    return X.astype(float) / 2.0**_BITS
