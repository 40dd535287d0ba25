"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

Set LATENTSEAL_NO_NUMBA=1 to force the fallback path (used by the
benchmark and by CI environments without a working numba).
Both paths compute bit-identical results: the orbit loop is straight
IEEE double arithmetic in a fixed evaluation order, and the windowed
moment loop only rearranges exact sums.
"""

import os

import numpy as np

_DISABLE = os.environ.get("LATENTSEAL_NO_NUMBA", "").lower() in ("1", "true", "yes")


def _henon_orbit_py(x0, y0, a, b, burn_in, n, guard):
    """Iterate the map; return (xs, ys, diverged_at).

    xs/ys hold the n post-burn-in states; diverged_at is the 0-based
    step index at which the guard tripped, or -1 if it never did.
    """
    xs = np.empty(n, dtype=np.float64)
    ys = np.empty(n, dtype=np.float64)
    x = x0
    y = y0
    for i in range(burn_in + n):
        xn = 1.0 - a * x * x + y
        yn = b * x
        if abs(xn) > guard or abs(yn) > guard:
            return xs, ys, i
        x = xn
        y = yn
        if i >= burn_in:
            xs[i - burn_in] = x
            ys[i - burn_in] = y
    return xs, ys, -1


def _ssim_windows_py(a, b, w, c1, c2):
    """Mean of per-window structural similarity over all w*w windows."""
    h, wid = a.shape
    inv = 1.0 / (w * w)
    total = 0.0
    count = 0
    for i in range(h - w + 1):
        for j in range(wid - w + 1):
            sa = 0.0
            sb = 0.0
            saa = 0.0
            sbb = 0.0
            sab = 0.0
            for di in range(w):
                for dj in range(w):
                    va = a[i + di, j + dj]
                    vb = b[i + di, j + dj]
                    sa += va
                    sb += vb
                    saa += va * va
                    sbb += vb * vb
                    sab += va * vb
            mu_a = sa * inv
            mu_b = sb * inv
            var_a = saa * inv - mu_a * mu_a
            var_b = sbb * inv - mu_b * mu_b
            cov = sab * inv - mu_a * mu_b
            num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
            den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
            total += num / den
            count += 1
    return total / count


if not _DISABLE:
    try:
        from numba import njit

        henon_orbit = njit(cache=True)(_henon_orbit_py)
        ssim_windows = njit(cache=True)(_ssim_windows_py)
        HAS_NUMBA = True
    except ImportError:
        henon_orbit = _henon_orbit_py
        ssim_windows = _ssim_windows_py
        HAS_NUMBA = False
else:
    henon_orbit = _henon_orbit_py
    ssim_windows = _ssim_windows_py
    HAS_NUMBA = False
