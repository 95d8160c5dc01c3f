"""Time the compiled kernels against their numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from corrph import _pykernels, hyperexponential
from corrph.montecarlo import PHSampler

try:
    from corrph import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    z = rng.normal(scale=4, size=200_000) + 1j * rng.uniform(-3, 3, 200_000)
    sampler = PHSampler(hyperexponential([0.3, 0.7], [0.5, 3.0]))
    counts = rng.poisson(10.0, 200_000).astype(np.int64)

    def faddeeva(mod):
        return lambda: mod.faddeeva(z)

    def ph_sums(mod):
        def run():
            bitgen = np.random.Philox(1)
            mod.ph_sums(bitgen, counts, sampler.init_cum, sampler.jump_cum, sampler.rates)
        return run

    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<10} {'backend':<8} {'seconds':>9} {'speedup':>8}")
    for name, make in (("faddeeva", faddeeva), ("ph_sums", ph_sums)):
        base = None
        for label, mod in backends:
            secs = best_of(make(mod), args.repeat)
            base = base or secs
            print(f"{name:<10} {label:<8} {secs:9.4f} {base / secs:8.1f}x")
    if _ckernels is None:
        print("compiled extension not available; build it with 'python3 setup.py build_ext --inplace'")


if __name__ == "__main__":
    main()
