"""Pure-numpy fallback for the zero-boundary correlation kernel."""

import numpy as np


def correlate2d_zero(x, w, ai, aj):
    """Apply ``out[i, j, t] = sum_{u,v} w[u, v] * x[i+u-ai, j+v-aj, t]``.

    `x` has shape (H, W, T); entries outside the spatial extent count as
    zero.  Implemented as one shifted slice-add per stencil tap.
    """
    h, wd = x.shape[:2]
    kh, kw = w.shape
    out = np.zeros_like(x)
    for u in range(kh):
        du = u - ai
        i0, i1 = max(0, -du), min(h, h - du)
        if i0 >= i1:
            continue
        for v in range(kw):
            dv = v - aj
            j0, j1 = max(0, -dv), min(wd, wd - dv)
            if j0 >= j1 or w[u, v] == 0.0:
                continue
            out[i0:i1, j0:j1] += w[u, v] * x[i0 + du:i1 + du, j0 + dv:j1 + dv]
    return out
