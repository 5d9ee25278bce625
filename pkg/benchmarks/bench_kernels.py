"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--samples 1000000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from qmultimeter.kernels import _fallback
from qmultimeter.states import bloch_states, sample_bloch_angles

try:
    from qmultimeter.kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    theta, phi = sample_bloch_angles(0, args.samples)
    signals = bloch_states(theta, phi)
    programs = bloch_states(*sample_bloch_angles(1, args.samples))
    cases = {
        "accumulate (0,0)": lambda m: m.accumulate_product_outer(theta, phi, np.array([0, 0], np.uint8)),
        "accumulate (0,0,1)": lambda m: m.accumulate_product_outer(theta, phi, np.array([0, 0, 1], np.uint8)),
        "accumulate (0,0,0,0)": lambda m: m.accumulate_product_outer(theta, phi, np.zeros(4, np.uint8)),
        "swap test p0": lambda m: m.swap_test_p0_batch(signals, programs),
    }
    print(f"samples={args.samples}, best of {args.repeat}")
    print(f"{'kernel':<22}{'numpy [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max |diff|':>12}")
    for name, fn in cases.items():
        t_py, out_py = best_of(lambda: fn(_fallback), args.repeat)
        if _core is None:
            print(f"{name:<22}{t_py:>12.4f}{'n/a':>12}{'':>10}{'':>12}")
            continue
        t_c, out_c = best_of(lambda: fn(_core), args.repeat)
        diff = float(np.max(np.abs(out_c - out_py)))
        print(f"{name:<22}{t_py:>12.4f}{t_c:>12.4f}{t_py / t_c:>10.1f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
