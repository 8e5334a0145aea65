"""Small dense determinants in extended precision.

Toeplitz-like matrices of Laurent coefficients span many orders of magnitude,
so each row is scaled by its largest entry before an LU with partial
pivoting carried out in ``np.longdouble``.  The pivoting loop runs once per
column and is vectorised over a leading batch axis.
"""
from __future__ import annotations

import numpy as np


def slogdet_batch(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log|det| for a stack of square matrices, shape (..., n, n)."""
    a = np.array(mats, dtype=np.longdouble)
    if a.ndim == 2:
        s, l = slogdet_batch(a[None])
        return s[0], l[0]
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape(-1, n, n)
    m = a.shape[0]
    if n == 0:
        return np.ones(batch_shape), np.zeros(batch_shape)
    sign = np.ones(m, dtype=np.longdouble)
    logdet = np.zeros(m, dtype=np.longdouble)
    scale = np.max(np.abs(a), axis=2)
    zero_row = np.any(scale == 0, axis=1)
    scale[scale == 0] = 1
    a /= scale[:, :, None]
    logdet += np.sum(np.log(scale), axis=1)
    rows = np.arange(m)
    for col in range(n):
        piv = col + np.argmax(np.abs(a[:, col:, col]), axis=1)
        swap = piv != col
        if np.any(swap):
            r = rows[swap]
            tmp = a[r, col, :].copy()
            a[r, col, :] = a[r, piv[swap], :]
            a[r, piv[swap], :] = tmp
            sign[swap] = -sign[swap]
        d = a[:, col, col]
        singular = d == 0
        d_safe = np.where(singular, 1, d)
        if col + 1 < n:
            f = a[:, col + 1 :, col] / d_safe[:, None]
            a[:, col + 1 :, col:] -= f[:, :, None] * a[:, col, None, col:]
        sign *= np.sign(d_safe)
        logdet += np.log(np.abs(d_safe))
        zero_row |= singular
    sign = np.where(zero_row, 0, sign)
    logdet = np.where(zero_row, -np.inf, logdet)
    return sign.reshape(batch_shape).astype(float), logdet.reshape(batch_shape)


def det_batch(mats: np.ndarray) -> np.ndarray:
    s, l = slogdet_batch(mats)
    with np.errstate(under="ignore"):
        return (s * np.exp(l)).astype(float)
