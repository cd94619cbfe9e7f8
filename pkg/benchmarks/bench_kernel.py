"""Time the compiled simulation kernel against the pure-Python engine.

Both kernels get identical inputs; their outputs are compared before any
timing is reported.

    python3 benchmarks/bench_kernel.py --days 5 --repeat 3
"""
import argparse
import timeit

import numpy as np

from traconflow.sim import _engine
from traconflow.synthetic import PRESETS, gen_scenario
from traconflow.travel_time import sample_many

try:
    from traconflow.sim._ckernel import run_kernel as c_kernel
except ImportError:
    c_kernel = None


def kernel_args(name, days, seed, cap):
    sc = gen_scenario(name, np.random.default_rng(seed), days=days, seed=seed)
    cfg = sc.config
    H = cfg.horizon_slots
    arrivals = sc.demand.padded(H)
    nominals = sample_many(sc.distribution, np.random.default_rng(cfg.seed), int(arrivals.sum()))
    mask = sc.schedule.open_mask(cfg.n_runways, H)
    return (H, cfg.n_runways, cfg.lockout_slots, arrivals, nominals, mask, cap), int(arrivals.sum())


def same(a, b):
    return all(np.array_equal(np.asarray(a[k]), np.asarray(b[k])) for k in a)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--days", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if c_kernel is None:
        print("compiled kernel not built; only the Python engine is available")
    print(f"{'scenario':<26}{'cap':>5}{'planes':>8}{'python s':>11}{'cython s':>11}{'speedup':>9}")
    for name in PRESETS:
        for cap in (-1, 10):
            kargs, n = kernel_args(name, args.days, args.seed, cap)
            py = min(timeit.repeat(lambda: _engine.run_engine(*kargs), number=1, repeat=args.repeat))
            if c_kernel is None:
                print(f"{name:<26}{cap if cap > 0 else 'inf':>5}{n:>8}{py:>11.4f}")
                continue
            if not same(_engine.run_engine(*kargs), c_kernel(*kargs)):
                raise SystemExit(f"kernels disagree on {name} cap={cap}")
            cy = min(timeit.repeat(lambda: c_kernel(*kargs), number=1, repeat=args.repeat))
            print(f"{name:<26}{cap if cap > 0 else 'inf':>5}{n:>8}{py:>11.4f}{cy:>11.4f}{py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
