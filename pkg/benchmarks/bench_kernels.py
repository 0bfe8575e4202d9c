#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times each backend on the four hot kernels plus one end-to-end Monte Carlo
cap integration, printing per-call medians and the speedup.  Run directly:

    python benchmarks/bench_kernels.py [--size 1000000] [--repeats 7]
"""

import argparse
import math
import time

import numpy as np

from sphlis._kernels import available_backends


def bench(fn, args, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def mc_cap_power(mod, tau, u):
    c = float(u.min())
    return 0.5 * (1.0 - c) * float(np.mean(mod.cap_integrand(tau, u)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=1_000_000)
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend unavailable; timing the pure backend only")

    rng = np.random.default_rng(0)
    n = args.size
    tau = 2.0
    u = rng.uniform(0.5, 1.0, n)
    r = rng.uniform(0.0, 1.0, n)
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    amp = rng.uniform(0.0, 1.0, n)
    phase = rng.uniform(0.0, 2.0 * math.pi, n)

    cases = [
        ("cap_integrand", lambda m: (m.cap_integrand, (tau, u))),
        ("cap_integrand_clamped", lambda m: (m.cap_integrand_clamped, (tau, u))),
        ("disk_density", lambda m: (m.disk_density, (2.0, 0.6, 0.8, r, phi))),
        ("coherent_power", lambda m: (m.coherent_power, (amp, phase))),
        ("mc_cap_power", lambda m: (mc_cap_power, (m, tau, u))),
    ]

    print(f"n = {n:,} elements, best of {args.repeats}")
    header = f"{'kernel':<24}" + "".join(f"{name:>14}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, make in cases:
        times = {}
        values = {}
        for name, mod in backends.items():
            fn, fn_args = make(mod)
            out = fn(*fn_args)
            values[name] = np.asarray(out, dtype=np.float64).ravel()[:1]
            times[name] = bench(fn, fn_args, args.repeats)
        row = f"{label:<24}" + "".join(
            f"{times[name] * 1e3:>12.2f}ms" for name in backends
        )
        if len(backends) == 2:
            row += f"{times['pure'] / times['compiled']:>9.2f}x"
        print(row)
        if len(values) == 2:
            a, b = values["pure"], values["compiled"]
            if not np.allclose(a, b, rtol=1e-12, atol=1e-300):
                print(f"  WARNING: backend mismatch on {label}: {a} vs {b}")


if __name__ == "__main__":
    main()
