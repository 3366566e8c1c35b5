"""Small dense complex linear algebra used by the engine and its oracles.

The production path uses LAPACK (``numpy.linalg.solve``).  The determinant
oracle deliberately does not: :func:`lu_det` is a hand-written LU
factorization with partial pivoting so that the two routes share no code.
"""
from __future__ import annotations

import numpy as np

COND_LIMIT = 1e14


def lu_factor(a: np.ndarray):
    """Doolittle LU with partial pivoting.  Returns (LU, perm, sign)."""
    lu = np.array(a, dtype=complex, copy=True)
    n = lu.shape[0]
    if lu.shape != (n, n):
        raise ValueError("square matrix required")
    perm = np.arange(n)
    sign = 1.0
    for j in range(n):
        piv = j + int(np.argmax(np.abs(lu[j:, j])))
        if piv != j:
            lu[[j, piv]] = lu[[piv, j]]
            perm[[j, piv]] = perm[[piv, j]]
            sign = -sign
        d = lu[j, j]
        if d == 0:
            continue
        for i in range(j + 1, n):
            f = lu[i, j] / d
            lu[i, j] = f
            lu[i, j + 1 :] -= f * lu[j, j + 1 :]
    return lu, perm, sign


def lu_det(a: np.ndarray) -> complex:
    a = np.asarray(a)
    if a.shape == (0, 0):
        return 1.0 + 0j
    lu, _, sign = lu_factor(a)
    d = complex(sign)
    for v in np.diagonal(lu):
        d *= v
    return d


def equilibrate(a: np.ndarray):
    """Row then column scaling factors (powers of two) for a stack of matrices.

    Powers of two keep the scaling exact in floating point.
    """
    a = np.asarray(a)
    rmax = np.abs(a).max(axis=-1)
    r = np.where(rmax > 0, np.exp2(-np.round(np.log2(np.where(rmax > 0, rmax, 1.0)))), 1.0)
    ar = a * r[..., :, None]
    cmax = np.abs(ar).max(axis=-2)
    c = np.where(cmax > 0, np.exp2(-np.round(np.log2(np.where(cmax > 0, cmax, 1.0)))), 1.0)
    return r, c


def cond_estimate(a: np.ndarray) -> np.ndarray:
    """1-norm condition number of the row/column-equilibrated matrix.

    Works on a single matrix or a stack ``(..., n, n)``.  Diagonal scaling
    removes the trivial ill-conditioning from exponentially large columns and
    from rows carrying powers of tiny spectral points; the solve below works
    on the same scaled matrix, so this is the number that bounds its error.
    """
    a = np.asarray(a)
    r, c = equilibrate(a)
    b = a * r[..., :, None] * c[..., None, :]
    with np.errstate(all="ignore"):
        k = np.linalg.cond(b, 1)
    k = np.real(k)
    return np.where(np.isfinite(k), k, np.inf)


def batched_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a[i] x[i] = b[i]`` for a stack; singular members give NaN.

    The system is equilibrated first (``(R A C) y = R b``, ``x = C y``).
    """
    r, c = equilibrate(a)
    a_s = a * r[..., :, None] * c[..., None, :]
    b_s = b * r
    try:
        y = np.linalg.solve(a_s, b_s[..., None])[..., 0]
    except np.linalg.LinAlgError:
        y = np.full(b.shape, np.nan + 0j)
        for i in np.ndindex(a.shape[:-2]):
            try:
                y[i] = np.linalg.solve(a_s[i], b_s[i])
            except np.linalg.LinAlgError:
                pass
    return y * c
