"""Numba-compiled zero-boundary correlation kernel."""

import numpy as np
from numba import njit, prange


@njit(parallel=True, cache=True)
def _correlate2d_zero_impl(x, w, ai, aj, out):
    h, wd, t = x.shape
    kh, kw = w.shape
    for i in prange(h):
        for j in range(wd):
            for c in range(t):
                acc = 0.0
                for u in range(kh):
                    ii = i + u - ai
                    if 0 <= ii < h:
                        for v in range(kw):
                            jj = j + v - aj
                            if 0 <= jj < wd:
                                acc += w[u, v] * x[ii, jj, c]
                out[i, j, c] = acc


def correlate2d_zero(x, w, ai, aj):
    """Same contract as the numpy fallback; x has shape (H, W, T)."""
    out = np.empty_like(x)
    _correlate2d_zero_impl(x, w, ai, aj, out)
    return out
