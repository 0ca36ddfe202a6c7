"""Time the pure-Python kernels against the compiled extension.

Usage:
    python3 benchmarks/bench_backends.py [--steps N] [--repeats R]

Both backends produce bit-identical arrays (see tests/test_backends.py);
this script only reports how long each takes.  The closed-loop case runs
in lifted mode with a synthetic 8x10 projector so the inner projection
loop is exercised.
"""

import argparse
import time

import numpy as np

from koopesc.backend import (
    closed_loop,
    compiled_kernels,
    pure_kernels,
    simulate_trajectory,
    static_sweep,
)
from koopesc.plant import InterferenceParams, PlantParams
from koopesc.signal import DetectorConfig, RelayConfig


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=100000,
                    help="integration steps per case (default 100000)")
    ap.add_argument("--repeats", type=int, default=3,
                    help="repeats per case, best time kept (default 3)")
    args = ap.parse_args()

    plant = PlantParams()
    interf = InterferenceParams()
    det = DetectorConfig(dt=plant.dt)
    relay = RelayConfig(step_k=plant.dt / 15.0)
    rng = np.random.default_rng(0)
    vp_re = np.ascontiguousarray(rng.normal(size=(8, 10)))
    vp_im = np.ascontiguousarray(rng.normal(size=(8, 10)))
    n = args.steps

    cases = {
        "trajectory": lambda kern: simulate_trajectory(
            7.0, 0.5, -1.0, n, plant, interf, kern=kern
        ),
        "static sweep": lambda kern: static_sweep(
            7.0, 0.0, 2.0, -5.0, n, 1, plant, interf,
            8, vp_re, vp_im, det, kern=kern,
        ),
        "closed loop": lambda kern: closed_loop(
            7.0, 0.0, n, 1, plant, interf,
            8, vp_re, vp_im, det, relay, kern=kern,
        ),
    }

    backends = [("python", pure_kernels())]
    compiled = compiled_kernels()
    if compiled is None:
        print("compiled extension not built; timing the pure backend only")
    else:
        backends.append(("cython", compiled))

    print(f"{n} steps per case, best of {args.repeats}")
    print(f"{'case':<14} " + " ".join(f"{name:>12}" for name, _ in backends)
          + ("      speedup" if compiled is not None else ""))
    for case, make in cases.items():
        times = [_time(lambda: make(kern), args.repeats) for _, kern in backends]
        row = f"{case:<14} " + " ".join(f"{t * 1e3:>10.1f} ms" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
