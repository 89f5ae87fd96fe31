"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-N wall time for each backend and
the speedup. A full greedy exploration is timed under both backends too, by
re-importing the package with ``PXPROBE_PURE_PYTHON`` set.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from pxprobe import _kernels


def cases(rng):
    P2 = rng.random((20_000, 3))
    Q = rng.random((2_000, 3))
    lows = rng.random((200_000, 3)) * 0.9
    sides = np.full(200_000, 1 / 64)
    depths = np.full(200_000, 6, dtype=np.int64)
    live = np.ones(200_000, dtype=np.uint8)
    balls = rng.random((50, 3))
    radii = rng.uniform(0.05, 0.2, 50)
    mind = rng.random(200_000)
    c = np.full(3, 0.5)
    return {
        "nearest": lambda k: _kernels.nearest(P2, c, impl=k),
        "nearest_many": lambda k: _kernels.nearest_many(P2[:2000], Q, impl=k),
        "min_dist_update": lambda k: _kernels.min_dist_update(lows, c, mind.copy(), impl=k),
        "inside_any_ball": lambda k: _kernels.inside_any_ball(lows[:50_000], sides[:50_000],
                                                              balls, radii, impl=k),
        "adversarial_pick": lambda k: _kernels.adversarial_pick(P2, c, 1.3, impl=k),
        "carve_scan": lambda k: _kernels.carve_scan(lows, sides, depths, live, c, 0.3,
                                                    0.075, 20, impl=k),
        "bound_scan": lambda k: _kernels.bound_scan(mind, sides, depths, 3, 20, 0.5, impl=k),
    }


EXPLORE = ("import time, numpy as np; from pxprobe import explore, FiniteSetOracle, BACKEND;"
           "P = np.random.default_rng(1).random((300, 3)); t = time.perf_counter();"
           "explore(FiniteSetOracle(P), 150); print(BACKEND, time.perf_counter() - t)")


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases(rng).items():
        times = {b: min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat))
                 for b, impl in backends.items()}
        line = f"{name:<18}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times.values())
        if "cython" in times:
            line += f"{times['python'] / times['cython']:>9.1f}x"
        print(line)
    print("\nexplore(300 points, d=3, 150 probes):")
    for pure in ("0", "1"):
        env = dict(os.environ, PXPROBE_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", EXPLORE], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"  {out[0]:<8} {float(out[1]):.2f}s")


if __name__ == "__main__":
    main()
