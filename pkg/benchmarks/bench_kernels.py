"""Time the compiled kernels against the numpy fallback and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from confal import _kernels
from confal.models import ATSurrogate, TrackerSurrogate

AT = ATSurrogate()
TR = TrackerSurrogate()


def workloads(rng):
    n = 300
    thr = np.repeat(rng.uniform(0, 100, 5), n // 5)
    brk = np.repeat(rng.uniform(0, 325, 5), n // 5)
    ref = np.repeat(rng.uniform(1, 3, 5), 200 // 5)
    left = rng.normal(size=n)
    right = rng.normal(size=n)
    at_args = (thr, brk, 0.1, AT.mass, np.asarray(AT.ratios), AT.c_throttle, AT.c_brake,
               AT.c_drag, AT.rpm_factor, AT.up_rpm, AT.down_rpm, 10)
    return {
        "until_profile[0,30]": ("until_profile", (left, right, 0, 30)),
        "until_profile[0,inf]": ("until_profile", (left, right, 0, -1)),
        "eventually_profile[0,30]": ("eventually_profile", (right, 0, 30)),
        "simulate_at": ("simulate_at", at_args),
        "simulate_tracker": ("simulate_tracker", (ref, 0.1, TR.pos0, TR.stiffness, TR.damping)),
    }


def timeit(fn, args, repeat):
    fn(*args)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _kernels.core is None:
        print("compiled core not available; only the fallback is installed")
        return
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<26}{'python us':>12}{'cython us':>12}{'speedup':>10}  equal")
    for label, (name, kargs) in workloads(rng).items():
        py = getattr(_kernels.fallback, name)
        cy = getattr(_kernels.core, name)
        t_py = timeit(py, kargs, args.repeat)
        t_cy = timeit(cy, kargs, args.repeat)
        eq = same(py(*kargs), cy(*kargs))
        print(f"{label:<26}{t_py * 1e6:>12.1f}{t_cy * 1e6:>12.1f}{t_py / t_cy:>10.1f}  {eq}")


if __name__ == "__main__":
    main()
