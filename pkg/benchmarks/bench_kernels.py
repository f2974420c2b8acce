"""Compare the compiled fill/P&L kernel against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [n_events]

Both kernels consume identical pre-drawn event arrays; the benchmark also
re-asserts that their outputs are bit-identical.
"""

import sys
import time

import numpy as np

from lobeq.equilibrium import ModelParams, shape_tick
from lobeq.kernels import accumulate_pnl_cy, accumulate_pnl_py
from lobeq.laws import NormalVolume, Pareto
from lobeq.simulator import _nmm_level_split, draw_events


def prepare(n_events: int):
    params = ModelParams(r=0.9, f=0.9, jump=Pareto(3.0, 0.005),
                         volume=NormalVolume(10.0), tick=0.01, offset_d=0.0)
    book = shape_tick(params, 8)
    draws = draw_events(params, n_events, np.random.default_rng(7))
    eff = np.diff(book.informed, prepend=0.0)
    inputs = (
        draws.is_jump, draws.it_wins, draws.jump_size,
        (draws.noise_sign > 0).astype(np.uint8), draws.noise_mag, draws.drift,
        book.grid, book.informed, book.noise, eff,
        _nmm_level_split(eff, book.noise),
    )
    return inputs


def run(kernel, inputs, m=8, repeats=3):
    best = float("inf")
    outs = None
    for _ in range(repeats):
        outs = [np.zeros(m, np.int64), np.zeros(m), np.zeros(m),
                np.zeros(m, np.int64), np.zeros(m), np.zeros(m),
                np.zeros(m), np.zeros(3, np.int64)]
        t0 = time.perf_counter()
        kernel(*inputs, *outs)
        best = min(best, time.perf_counter() - t0)
    return best, outs


def main() -> int:
    n_events = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    inputs = prepare(n_events)

    t_py, outs_py = run(accumulate_pnl_py, inputs)
    print(f"pure python : {t_py * 1e3:9.1f} ms  ({n_events / t_py / 1e6:6.1f} M events/s)")
    if accumulate_pnl_cy is None:
        print("cython      : extension not built (python setup.py build_ext --inplace)")
        return 0
    t_cy, outs_cy = run(accumulate_pnl_cy, inputs)
    print(f"cython      : {t_cy * 1e3:9.1f} ms  ({n_events / t_cy / 1e6:6.1f} M events/s)")
    print(f"speedup     : {t_py / t_cy:9.1f} x")

    identical = all(np.array_equal(a, b) for a, b in zip(outs_py, outs_cy))
    print(f"bit-identical outputs: {identical}")
    return 0 if identical else 1


if __name__ == "__main__":
    sys.exit(main())
