"""Time the hot kernels under each available compute backend.

Runs the low-level convolutions plus the two end-to-end hot paths
(channel separation and one map row) under the pure-numpy backend and,
when numba is importable, the jit backend. Prints best-of-N wall times
and the resulting speedup. Useful after touching anything in
gammasep.backends to confirm the jit path still earns its keep.

Usage:
    python3 benchmarks/backend_bench.py [--samples N] [--repeats R]
"""

import argparse
import timeit

import numpy as np

from gammasep import (
    MorletParams,
    SimConfig,
    available_backends,
    build_realization,
    centered_conv,
    centered_conv_complex,
    circular_conv,
    map_row,
    separate,
    use_backend,
    wavelet_filters,
)


def build_cases(n_samples):
    rng = np.random.default_rng(99)
    x = rng.standard_normal(n_samples)
    signal, _ = build_realization(SimConfig(n_samples=n_samples), 0)
    ch = signal.data[2]
    fs = signal.sample_rate_hz
    lo = wavelet_filters("db4").dec_lo
    long_taps = np.hanning(339)
    params = MorletParams.for_band((80.0, 90.0), fs)
    kernel = np.exp(1j * np.arange(151) / 8.0) * np.hanning(151)
    return {
        "circular_conv db4 s=4": lambda: circular_conv(x, lo, 4),
        "centered_conv 339 taps": lambda: centered_conv(x, long_taps),
        "centered_conv_complex": lambda: centered_conv_complex(x, kernel),
        "separate 85 Hz": lambda: separate(ch, 85.0, fs),
        "map_row 80-90 Hz": lambda: map_row(ch, (80.0, 90.0), params),
    }


def best_time(fn, repeats):
    fn()  # warm-up, lets jit compilation happen off the clock
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=5000)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    backends = available_backends()
    results = {}
    for name in backends:
        use_backend(name)
        cases = build_cases(args.samples)
        results[name] = {label: best_time(fn, args.repeats) for label, fn in cases.items()}

    labels = list(next(iter(results.values())))
    width = max(len(s) for s in labels)
    header = f"{'kernel':<{width}}" + "".join(f"  {b:>12}" for b in backends)
    if len(backends) > 1:
        header += f"  {'speedup':>8}"
    print(f"n_samples={args.samples}, best of {args.repeats}")
    print(header)
    print("-" * len(header))
    for label in labels:
        row = f"{label:<{width}}"
        for b in backends:
            row += f"  {results[b][label] * 1e3:>10.3f}ms"
        if len(backends) > 1:
            row += f"  {results[backends[0]][label] / results[backends[-1]][label]:>7.2f}x"
        print(row)


if __name__ == "__main__":
    main()
