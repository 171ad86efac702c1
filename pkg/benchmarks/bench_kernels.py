"""Times the hot kernels on both execution paths.

The array kernels exist in two genuine flavors -- loop-style JIT and
vectorized plain numpy -- and both live in the module, so they are timed
side by side here. The scalar vehicle step is single-source; it is timed
on whichever path this process selected (rerun with DBWSIM_NO_NUMBA=1 to
see the interpreted speed).

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from dbwsim import kernels

GEOM = (120.0, 320.0, -40.0, 500.0, 500.0, 390.0, 230.0)
LIMITS = (-math.pi / 4, math.pi / 4)


def bench(fn, repeat):
    fn()  # warm (JIT compile / cache fill)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    thetas = np.linspace(LIMITS[0], LIMITS[1], 100_000)
    exts = kernels.linkage_extension(thetas, *GEOM)
    rng = np.random.default_rng(1)
    alpha = rng.uniform(0, 2 * math.pi, 100_000)
    beta = rng.uniform(0, 2 * math.pi, 100_000)
    d = rng.uniform(0, 8.0, 100_000)

    pairs = [
        ("linkage forward x100k",
         lambda: kernels._linkage_extension_np(thetas, *GEOM),
         lambda: kernels.linkage_extension(thetas, *GEOM)),
        ("linkage bisection x100k",
         lambda: kernels._linkage_angle_np(exts, *GEOM, *LIMITS),
         lambda: kernels.linkage_angle(exts, *GEOM, *LIMITS)),
        ("path-word solve x100k",
         lambda: kernels._dubins_words_np(alpha, beta, d),
         lambda: kernels.dubins_words(alpha, beta, d)),
    ]

    label = "numba jit" if kernels.NUMBA_ENABLED else "selected=np"
    print(f"{'workload':<28} {'plain numpy':>12} {label:>12} {'speedup':>9}")
    for name, plain_fn, fast_fn in pairs:
        tp = bench(plain_fn, args.repeat)
        tf = bench(fast_fn, args.repeat)
        print(f"{name:<28} {tp * 1e3:>10.1f}ms {tf * 1e3:>10.1f}ms "
              f"{tp / tf:>8.1f}x")

    def run_steps():
        x = y = heading = v = 0.0
        ext, steer = 114.7, 0.0
        for i in range(20_000):
            x, y, heading, v, ext, steer = kernels.vehicle_step(
                x, y, heading, v, ext, steer, 0.2,
                60.0 if i % 400 < 200 else 180.0, 0.01, 0.5, 8.0,
                0.0, 250.0, 1.0, *GEOM, *LIMITS)

    ts = bench(run_steps, args.repeat)
    mode = "jit" if kernels.NUMBA_ENABLED else "plain"
    print(f"{'vehicle integration x20k':<28} {'':>12} {ts * 1e3:>10.1f}ms "
          f"  ({mode} path)")


if __name__ == "__main__":
    main()
