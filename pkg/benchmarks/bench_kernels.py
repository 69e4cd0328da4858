"""Compare the compiled kernels against the pure-Python fallback.

Times each hot kernel with both backends in one process, then (optionally)
times a full BER probe in subprocesses so the end-to-end effect of
RYDBERG_SIM_FORCE_PY=1 is visible too.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--end-to-end]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from rydberg_ofdm.kernels import _kernels_py

try:
    from rydberg_ofdm.kernels import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(func, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(repeat):
    rng = np.random.Generator(np.random.PCG64(0))

    steps = rng.standard_normal(1_000_000)
    walk_args = (steps, 1.0, 8e-4, 0.1, 10.0)

    amplitudes = np.abs(rng.standard_normal(1_000_000)) * 1e6
    eit_args = (amplitudes, 2 * np.pi * 2.6e6, 2 * np.pi * 1e3,
                2 * np.pi * 1e3, 2 * np.pi * 3e6, 0.0, 2.0)

    symbols = (rng.standard_normal(200_000)
               + 1j * rng.standard_normal(200_000))
    grid = (np.arange(8) - 3.5) / np.sqrt(42.0)
    constellation = (grid[:, None] + 1j * grid[None, :]).reshape(-1)
    demap_args = (np.ascontiguousarray(symbols.real),
                  np.ascontiguousarray(symbols.imag),
                  np.ascontiguousarray(constellation.real),
                  np.ascontiguousarray(constellation.imag))

    cases = [
        ("random_walk_gain (1M steps)", "random_walk_gain", walk_args),
        ("eit_transmission (1M samples)", "eit_transmission", eit_args),
        ("qam_hard_demap (200k x 64-QAM)", "qam_hard_demap", demap_args),
    ]

    print(f"{'kernel':<32} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, name, args in cases:
        py_time = best_of(getattr(_kernels_py, name), args, repeat)
        if _compiled is None:
            print(f"{label:<32} {py_time * 1e3:9.2f}ms {'n/a':>10} {'':>8}")
            continue
        c_time = best_of(getattr(_compiled, name), args, repeat)
        print(f"{label:<32} {py_time * 1e3:9.2f}ms {c_time * 1e3:9.2f}ms "
              f"{py_time / c_time:7.1f}x")


END_TO_END = """
import time
from rydberg_ofdm import OfdmConfig, probe_ber
from rydberg_ofdm.config import default_fading_channel
from rydberg_ofdm.kernels import BACKEND

start = time.perf_counter()
probe_ber(OfdmConfig(), default_fading_channel(), seed=0, n_bits=200_000)
print(f"{BACKEND} {time.perf_counter() - start:.3f}")
"""


def bench_end_to_end():
    print()
    print("end-to-end probe (200k bits, default channel):")
    for force in ("0", "1"):
        env = dict(os.environ, RYDBERG_SIM_FORCE_PY=force)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env,
                             capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        print(f"  {backend:<10} {float(seconds):6.3f}s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions per kernel (best is kept)")
    parser.add_argument("--end-to-end", action="store_true",
                        help="also time a full BER probe per backend")
    args = parser.parse_args()
    if _compiled is None:
        print("note: compiled extension not importable, python numbers only")
    bench_kernels(args.repeat)
    if args.end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
