"""Event-loop kernels for the Monte Carlo simulator.

The per-event fill/P&L accumulation is the hot inner loop of the package.
It exists twice with identical semantics: a Cython extension
(``_pnl_cy``, built by setup.py) and a pure-Python fallback (``_pnl_py``).
The compiled version is selected at import time when available; both
consume the same pre-drawn event arrays and produce bit-identical output,
which the test suite asserts.

``benchmarks/bench_kernels.py`` compares the two implementations.
"""

from . import _pnl_py

try:
    from . import _pnl_cy
except ImportError:  # extension not built; plain Python does the job
    _pnl_cy = None

BACKEND = "cython" if _pnl_cy is not None else "python"
accumulate_pnl = (_pnl_cy or _pnl_py).accumulate_pnl
accumulate_pnl_py = _pnl_py.accumulate_pnl
accumulate_pnl_cy = _pnl_cy.accumulate_pnl if _pnl_cy is not None else None

__all__ = ["accumulate_pnl", "accumulate_pnl_py", "accumulate_pnl_cy", "BACKEND"]
