"""Hot numerical kernels: matrix exp/log and structure-constant contractions.

Two implementations are provided for each kernel: a numba ``@njit`` version
and a pure-numpy fallback.  The active path is chosen at import time; set
``WALLACH_GEO_NO_NUMBA=1`` to force the numpy path (the same fallback is
used automatically when numba is not installed).  ``benchmarks/bench_kernels.py``
compares both paths.
"""

import math
import os

import numpy as np

_NO_NUMBA_ENV = os.environ.get("WALLACH_GEO_NO_NUMBA", "0").lower() in ("1", "true", "yes")

HAVE_NUMBA = False
if not _NO_NUMBA_ENV:
    try:
        from numba import njit as _njit

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _NO_NUMBA_ENV

# Pade-13 coefficients for the scaling-and-squaring exponential (Higham 2005).
_PADE13_B = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def _expm_impl(A):
    # scaling-and-squaring with a degree-13 Pade core; relative accuracy
    # ~1e-15 for the skew/orthogonal-type inputs this package produces
    n = A.shape[0]
    norm1 = np.abs(A).sum(axis=0).max()
    s = 0
    if norm1 > _THETA13:
        s = int(math.ceil(math.log2(norm1 / _THETA13)))
    As = A / (2.0**s)
    I = np.eye(n)
    A2 = As @ As
    A4 = A2 @ A2
    A6 = A2 @ A4
    b = _PADE13_B
    U = As @ (
        A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
        + b[7] * A6
        + b[5] * A4
        + b[3] * A2
        + b[1] * I
    )
    V = (
        A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
        + b[6] * A6
        + b[4] * A4
        + b[2] * A2
        + b[0] * I
    )
    R = np.ascontiguousarray(np.linalg.solve(V - U, V + U))
    for _ in range(s):
        R = np.ascontiguousarray(R @ R)
    return R


def _logm_impl(A):
    # principal logarithm by inverse scaling-and-squaring: Denman-Beavers
    # square roots until ||A - I|| is small, then a truncated log series.
    # Caller guarantees the principal branch applies (no eigenvalue near -1).
    n = A.shape[0]
    I = np.eye(n)
    X = A.copy()
    k = 0
    while np.abs(X - I).sum(axis=0).max() > 0.25 and k < 40:
        Y = X
        Z = I.copy()
        for _ in range(60):
            Yn = 0.5 * (Y + np.linalg.inv(Z))
            Zn = 0.5 * (Z + np.linalg.inv(Y))
            delta = np.abs(Yn - Y).sum(axis=0).max()
            Y = Yn
            Z = Zn
            if delta < 1e-15:
                break
        X = Y
        k += 1
    E = X - I
    # log(I+E) = sum (-1)^(j+1) E^j / j, ||E|| < 0.25 so 40 terms suffice
    S = np.zeros((n, n))
    P = I.copy()
    sign = 1.0
    for j in range(1, 41):
        P = P @ E
        S = S + (sign / j) * P
        sign = -sign
    return S * (2.0**k)


def _bracket_py(c, x, y):
    """Coefficients of [x, y] from the structure-constant tensor."""
    return np.einsum("i,ijk,j->k", x, c, y)


def _ad_matrix_py(c, x):
    """Matrix of ad(x) in the basis: (ad x)[k, j] = sum_i x_i c[i, j, k]."""
    return np.einsum("i,ijk->kj", x, c)


if USE_NUMBA:
    _expm_nb = _njit(cache=True)(_expm_impl)
    _logm_nb = _njit(cache=True)(_logm_impl)

    @_njit(cache=True)
    def _bracket_nb(c, x, y):
        dim = c.shape[0]
        out = np.zeros(dim)
        for i in range(dim):
            xi = x[i]
            if xi == 0.0:
                continue
            for j in range(dim):
                yj = y[j]
                if yj == 0.0:
                    continue
                for k in range(dim):
                    out[k] += xi * c[i, j, k] * yj
        return out

    @_njit(cache=True)
    def _ad_matrix_nb(c, x):
        dim = c.shape[0]
        out = np.zeros((dim, dim))
        for i in range(dim):
            xi = x[i]
            if xi == 0.0:
                continue
            for j in range(dim):
                for k in range(dim):
                    out[k, j] += xi * c[i, j, k]
        return out

    def expm(A):
        return _expm_nb(np.ascontiguousarray(A, dtype=np.float64))

    def logm(A):
        return _logm_nb(np.ascontiguousarray(A, dtype=np.float64))

    def bracket_coeffs(c, x, y):
        return _bracket_nb(c, np.ascontiguousarray(x), np.ascontiguousarray(y))

    def ad_matrix(c, x):
        return _ad_matrix_nb(c, np.ascontiguousarray(x))

else:

    def expm(A):
        return _expm_impl(np.asarray(A, dtype=np.float64))

    def logm(A):
        return _logm_impl(np.asarray(A, dtype=np.float64))

    bracket_coeffs = _bracket_py
    ad_matrix = _ad_matrix_py
