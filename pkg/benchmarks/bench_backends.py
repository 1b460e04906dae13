"""Benchmark the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_backends.py [--repeats N]

Covers the three hot paths: the cavity-field accumulation driving
population dynamics, the violation-histogram enumeration behind log Z,
and the Gibbs-moment enumeration.  The first numba call is excluded
from timing (JIT warmup).
"""

import argparse
import math
import time

import numpy as np

from ksat_cavity import ModelParams, rng_stream, sample_instance
from ksat_cavity.kernels import get_backend


def _time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_cavity_case(n_units, rate, p, seed=0):
    rng = rng_stream(seed, 1)
    r_counts = rng.poisson(rate, n_units)
    offsets = np.zeros(n_units + 1, dtype=np.int64)
    np.cumsum(r_counts, out=offsets[1:])
    total = int(offsets[-1])
    signs = (rng.integers(0, 2, size=(total, p)) * 2 - 1).astype(np.float64)
    zvals = rng.uniform(-1, 1, size=(total, p - 1))
    em1 = math.expm1(-1.0)
    return offsets, signs, zvals, em1


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    numba_backend = get_backend("numba")
    numpy_backend = get_backend("numpy")

    cases = []

    off, sg, zv, em1 = make_cavity_case(100_000, 0.15, 3)
    cases.append(("cavity_fields M=1e5 rate=0.15 p=3",
                  lambda b: b.cavity_fields(off, sg, zv, em1)))
    off2, sg2, zv2, em12 = make_cavity_case(100_000, 3.0, 3, seed=1)
    cases.append(("cavity_fields M=1e5 rate=3.0  p=3",
                  lambda b: b.cavity_fields(off2, sg2, zv2, em12)))

    inst = sample_instance(ModelParams(p=3, alpha=1.5, beta=1.0), 20, rng_stream(2, 1))
    cases.append((f"violation_counts N=20 m={inst.n_clauses}",
                  lambda b: b.violation_counts(inst.n_sites, inst.sites, inst.signs)))

    inst2 = sample_instance(ModelParams(p=3, alpha=1.0, beta=1.0), 16, rng_stream(3, 1))
    cases.append((f"gibbs_sums       N=16 m={inst2.n_clauses}",
                  lambda b: b.gibbs_sums(inst2.n_sites, inst2.sites, inst2.signs, 1.0)))

    print(f"{'kernel':<38} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, call in cases:
        call(numba_backend)  # JIT warmup
        t_nb = _time(lambda: call(numba_backend), args.repeats)
        t_np = _time(lambda: call(numpy_backend), args.repeats)
        print(f"{name:<38} {t_nb*1e3:>8.2f}ms {t_np*1e3:>8.2f}ms {t_np/t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
