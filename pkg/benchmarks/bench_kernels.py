"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from sixform import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000, help="forms per q_batch call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not kernels.HAVE_NUMBA:
        print("numba unavailable (or SIXFORM_NUMBA=0); only the numpy path will run")

    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=(args.n, 20))
    j = rng.normal(size=(6, 6))
    dj = rng.normal(size=(6, 6, 6))

    # warm up the JIT
    kernels.q_batch(coeffs[:2], use_numba=kernels.HAVE_NUMBA)
    kernels.nijenhuis_tensor(j, dj, use_numba=kernels.HAVE_NUMBA)

    cases = {
        f"q_batch (n={args.n})": lambda use: kernels.q_batch(coeffs, use_numba=use),
        "nijenhuis_tensor x1000": lambda use: [kernels.nijenhuis_tensor(j, dj, use_numba=use) for _ in range(1000)],
    }
    print(f"{'kernel':28s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        t_np = best_of(lambda: fn(False), args.repeat)
        if kernels.HAVE_NUMBA:
            t_nb = best_of(lambda: fn(True), args.repeat)
            print(f"{name:28s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:28s} {t_np:10.4f} {'-':>10s} {'-':>8s}")

    if kernels.HAVE_NUMBA:
        a = kernels.q_batch(coeffs[:500], use_numba=True)
        b = kernels.q_batch(coeffs[:500], use_numba=False)
        print(f"max |numba - numpy| on q_batch: {np.max(np.abs(a - b)):.1e}")


if __name__ == "__main__":
    main()
