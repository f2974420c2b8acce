"""Bracketed bisection for the monotone implicit equations of the model.

Every implicit equation solved in this package is strictly monotone in the
unknown, so derivative-free bisection is unconditionally convergent.  The
solver expands the upper bracket by doubling until it straddles the root,
then bisects to a relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["RootResult", "bisect_decreasing"]

MAX_ITER = 200
REL_TOL = 1e-12
_MAX_EXPANSIONS = 200


class BracketError(RuntimeError):
    """No sign change could be bracketed."""


@dataclass(frozen=True)
class RootResult:
    x: float
    iterations: int


def bisect_decreasing(g, lo: float, hi: float | None = None,
                      rel_tol: float = REL_TOL, max_iter: int = MAX_ITER) -> RootResult:
    """Root of a strictly decreasing ``g`` with ``g(lo) >= 0``.

    ``hi`` is expanded by doubling from ``lo`` until ``g(hi) < 0`` when not
    supplied (or when the supplied one does not straddle the root).
    """
    if lo <= 0.0:
        raise ValueError("bisect_decreasing requires a positive lower bracket")
    g_lo = g(lo)
    if g_lo == 0.0:
        return RootResult(lo, 0)
    if g_lo < 0.0:
        raise BracketError(f"g(lo) = {g_lo} < 0 at lo = {lo}: no root above lo")

    if hi is None:
        hi = 2.0 * lo
    for _ in range(_MAX_EXPANSIONS):
        if g(hi) < 0.0:
            break
        lo = hi
        hi *= 2.0
    else:
        raise BracketError("upper bracket expansion failed to find a sign change")

    iters = 0
    for iters in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * mid:
            break
    return RootResult(0.5 * (lo + hi), iters)
