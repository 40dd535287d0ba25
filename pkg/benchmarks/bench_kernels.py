"""Compare the numba-jitted kernels against the pure-numpy fallback.

Runs both implementations in-process (the fallback functions are always
importable) and prints a small table.  Usage:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from latentseal import _kernels


def bench(label, fn, *args, repeats=5):
    fn(*args)  # warm-up / jit compile
    best = min(
        (lambda t0: (fn(*args), time.perf_counter() - t0))(time.perf_counter())[1]
        for _ in range(repeats)
    )
    print(f"{label:<46} {best * 1e3:10.3f} ms")
    return best


def main():
    print(f"numba active: {_kernels.HAS_NUMBA}")
    print()

    orbit_args = (0.1, 0.1, 1.4, 0.3, 1000, 1_000_000, 100.0)
    jit_orbit = bench("henon orbit 1e6 points (selected kernel)", _kernels.henon_orbit, *orbit_args)
    py_orbit = bench("henon orbit 1e6 points (pure python/numpy)", _kernels._henon_orbit_py, *orbit_args)

    rng = np.random.default_rng(0)
    a = rng.random((128, 128))
    b = rng.random((128, 128))
    ssim_args = (a, b, 7, 6.5025, 58.5225)
    jit_ssim = bench("windowed ssim 128x128 w=7 (selected kernel)", _kernels.ssim_windows, *ssim_args)
    py_ssim = bench("windowed ssim 128x128 w=7 (pure python/numpy)", _kernels._ssim_windows_py, *ssim_args)

    if _kernels.HAS_NUMBA:
        print()
        print(f"speedup: orbit {py_orbit / jit_orbit:6.1f}x, windowed ssim {py_ssim / jit_ssim:6.1f}x")

    # parity check: both paths must agree bitwise
    xs_a, ys_a, _ = _kernels.henon_orbit(0.1, 0.1, 1.4, 0.3, 100, 1000, 100.0)
    xs_b, ys_b, _ = _kernels._henon_orbit_py(0.1, 0.1, 1.4, 0.3, 100, 1000, 100.0)
    assert np.array_equal(xs_a, xs_b) and np.array_equal(ys_a, ys_b)
    s_a = _kernels.ssim_windows(*ssim_args)
    s_b = _kernels._ssim_windows_py(*ssim_args)
    assert abs(s_a - s_b) < 1e-12
    print("parity check: selected kernel matches fallback")


if __name__ == "__main__":
    main()
