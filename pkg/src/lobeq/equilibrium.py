"""Closed-form book shapes and implicit spread equations.

Market makers add depth until a new infinitesimal order at the back of the
queue breaks even on average, conditional on being filled right now.  An
order at distance ``x`` from the efficient price is filled either by an
informed market order after a price jump larger than ``x`` (adverse
selection, with the jump channel discounted by the race parameter ``f`` for
informed makers, who cancel first with probability ``1 - f``) or by a noise
market order whose signed volume exceeds the depth ahead of it.

Setting the conditional gain to zero and inverting the volume CDF yields
the cumulative depth curves.  With the tail functional
``emax(x) = E[max(B/x, 1)]`` of the jump law:

    informed makers:  F_u(L_i(x)) = 1 + (f*r/(1-r)) * (1 - emax(x))
    noise makers:     F_u(L_u(x)) = 1 + (r/(1-r))   * (1 - emax(x))

The half-spread is the distance at which the informed curve crosses zero
depth, i.e. the root of ``emax(phi) = 1 + (1/(2f)) * (1/r - 1)`` (the 1/2
enters through the zero median of the volume law).  Noise-trader toxicity
(a mean post-trade drift ``theta_bar``) multiplies the depth coefficient by
``x / (x - theta_bar)`` and tilts the spread equation accordingly.  With
several independent jump sources each specialised maker prices his own
source's race and everybody else's jumps at full adverse-selection weight;
the visible book is the pointwise maximum of the per-source curves.

Depth values are clamped: break-even arguments at or below 1/2 mean "no
depth here" (L = 0), arguments at or above 1 mean unbounded depth and are
reported as ``math.inf`` so downstream code can tell the three regimes
apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laws import JumpLaw, VolumeLaw
from .solvers import BracketError, RootResult, bisect_decreasing

__all__ = [
    "ModelParams",
    "JumpSource",
    "MultiSourceParams",
    "BookShape",
    "SpreadSolution",
    "UnfillableLevelError",
    "ZeroSpreadRegime",
    "SolverError",
    "UNBOUNDED",
    "theta_bar",
    "gain_imm",
    "gain_nmm",
    "gain_imm_multi",
    "book_curves",
    "shape_continuous",
    "shape_tick",
    "shape_toxic",
    "shape_multi",
    "spread_continuous",
    "spread_tick",
    "spread_toxic",
    "strict_ceil",
]

#: Sentinel for "unbounded depth" (break-even argument >= 1).
UNBOUNDED = math.inf


class UnfillableLevelError(RuntimeError):
    """Both fill channels have zero probability: the gain is undefined."""


class ZeroSpreadRegime(RuntimeError):
    """f = 0: informed makers always cancel first, depth is unbounded and
    the spread collapses to zero; there is no positive root to report."""


class SolverError(RuntimeError):
    """An implicit equation could not be bracketed or solved."""


# ---------------------------------------------------------------------------
# Parameter containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    """Full single-source parameterization.

    ``r`` is the fraction of market events that are price jumps,
    ``lambda_i / (lambda_i + lambda_u)``.  Either ``r`` or both intensities
    may be supplied; when both are populated they must agree to 1e-12.
    ``f`` is the race parameter: the probability that the informed trader's
    market order is processed before the informed maker's cancel.
    """

    r: float | None = None
    f: float = 1.0
    jump: JumpLaw = None
    volume: VolumeLaw = None
    lambda_i: float | None = None
    lambda_u: float | None = None
    theta: float = 0.0
    rho: float = 0.0
    tick: float = 0.0
    offset_d: float = 0.0

    def __post_init__(self):
        if self.jump is None or self.volume is None:
            raise ValueError("ModelParams requires a jump law and a volume law")
        if self.lambda_i is not None or self.lambda_u is not None:
            if self.lambda_i is None or self.lambda_u is None:
                raise ValueError("lambda_i and lambda_u must be supplied together")
            if self.lambda_i < 0.0 or self.lambda_u <= 0.0:
                raise ValueError("lambda_i must be >= 0 and lambda_u > 0")
            r_from_rates = self.lambda_i / (self.lambda_i + self.lambda_u)
            if self.r is None:
                object.__setattr__(self, "r", r_from_rates)
            elif abs(self.r - r_from_rates) > 1e-12:
                raise ValueError(
                    f"r = {self.r} inconsistent with lambda_i/(lambda_i+lambda_u) = {r_from_rates}"
                )
        if self.r is None:
            raise ValueError("either r or both event intensities must be supplied")
        # r = 0 (no jump source) is allowed as the degenerate price-path case
        if not 0.0 <= self.r < 1.0:
            raise ValueError("r must lie in [0, 1)")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError("f must lie in [0, 1]")
        if self.theta < 0.0:
            raise ValueError("theta must be nonnegative")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly between -1 and 1")
        if self.tick < 0.0:
            raise ValueError("tick must be nonnegative")
        if self.tick > 0.0:
            if not 0.0 <= self.offset_d < self.tick:
                raise ValueError("offset_d must lie in [0, tick)")
        elif self.offset_d != 0.0:
            raise ValueError("offset_d requires a positive tick")

    @property
    def gamma(self) -> float:
        """Sign-persistence probability P(X_j = X_{j-1}) = (1 + rho) / 2."""
        return 0.5 * (1.0 + self.rho)

    @property
    def rates(self) -> tuple[float, float]:
        """(lambda_i, lambda_u); defaults to a unit total event rate."""
        if self.lambda_i is not None:
            return (self.lambda_i, self.lambda_u)
        return (self.r, 1.0 - self.r)


@dataclass(frozen=True)
class JumpSource:
    """One jump source: its event fraction, race parameter and jump law."""

    r: float
    f: float
    jump: JumpLaw

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError("source fraction r must be nonnegative")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError("f must lie in [0, 1]")


@dataclass(frozen=True)
class MultiSourceParams:
    """Several independent jump sources, each with its own specialised
    informed makers.  All sources must share one common race parameter;
    heterogeneous values are rejected rather than averaged."""

    sources: tuple[JumpSource, ...]
    volume: VolumeLaw

    def __post_init__(self):
        if not self.sources:
            raise ValueError("at least one jump source is required")
        object.__setattr__(self, "sources", tuple(self.sources))
        total = sum(s.r for s in self.sources)
        if not total < 1.0:
            raise ValueError("source fractions must sum to less than 1")
        f0 = self.sources[0].f
        if any(s.f != f0 for s in self.sources):
            raise ValueError("all sources must share a common race parameter f")

    @property
    def common_f(self) -> float:
        return self.sources[0].f

    @property
    def total_r(self) -> float:
        return sum(s.r for s in self.sources)


@dataclass
class BookShape:
    """Cumulative depth evaluated on a grid of distances from the efficient
    price.  ``informed`` is the visible book; ``noise`` is the noise
    makers' (smaller) break-even curve.  Unbounded depth is ``inf``."""

    grid: np.ndarray
    informed: np.ndarray
    noise: np.ndarray
    effective: np.ndarray
    tick: float = 0.0
    offset_d: float = 0.0
    per_level: np.ndarray | None = None
    source_books: tuple[np.ndarray, ...] | None = None

    def validate(self) -> None:
        for name in ("informed", "noise", "effective"):
            curve = getattr(self, name)
            if len(curve) != len(self.grid):
                raise ValueError(f"{name} curve length does not match the grid")
            finite = curve[np.isfinite(curve)]
            if np.any(finite < 0.0):
                raise ValueError(f"{name} cumulative depth must be nonnegative")
            if np.any(np.diff(curve) < 0.0):
                raise ValueError(f"{name} cumulative depth must be nondecreasing")


@dataclass
class SpreadSolution:
    """Half-spread solves with solver diagnostics.

    ``phi`` is the informed-maker half-spread, ``mu`` the noise-maker one
    (the f = 1 equation); ``phi <= mu`` always, with equality iff f = 1.
    Tick quantities (``k_d``, ``spread_tick``) and the toxic half-spread
    ``phi_theta`` are filled by the variant solvers that compute them.
    """

    phi: float
    mu: float
    phi_theta: float | None = None
    k_d: int | None = None
    spread_tick: float | None = None
    solver_iters: int = 0
    residual: float = 0.0


# ---------------------------------------------------------------------------
# Gains of a marginal order, conditional on a fill
# ---------------------------------------------------------------------------


def theta_bar(p: ModelParams) -> float:
    """Mean efficient-price drift conditional on a noise buy.

    Under the stationary symmetric two-state sign chain the previous sign
    given a buy has mean rho, so the conditional surprise drift is
    theta * (1 - rho**2).
    """
    return p.theta * (1.0 - p.rho * p.rho)


def _gain(x: float, l_at_x: float, r: float, f_eff: float, jump: JumpLaw,
          volume: VolumeLaw, tb: float) -> float:
    if x <= 0.0:
        raise ValueError("gain requires a positive distance x")
    p_noise = (1.0 - r) * volume.p_gt(l_at_x)
    p_jump = f_eff * r * jump.p_gt(x)
    denom = p_noise + p_jump
    if denom == 0.0:
        raise UnfillableLevelError(
            f"no fill channel open at x = {x} with depth {l_at_x} ahead"
        )
    adverse = f_eff * r * jump.tail_expectation(x) + tb * p_noise
    return x - adverse / denom


def gain_imm(p: ModelParams, x: float, l_at_x: float) -> float:
    """Conditional average profit of a marginal informed-maker order at
    distance ``x`` with cumulative depth ``l_at_x`` ahead of it.

    The jump channel is discounted by the race parameter ``f``; at f = 0
    the maker always cancels first and the gain is exactly ``x``.
    """
    return _gain(x, l_at_x, p.r, p.f, p.jump, p.volume, theta_bar(p))


def gain_nmm(p: ModelParams, x: float, l_at_x: float) -> float:
    """Same as :func:`gain_imm` with the jump channel at full weight: noise
    makers never win the cancellation race."""
    return _gain(x, l_at_x, p.r, 1.0, p.jump, p.volume, theta_bar(p))


def gain_imm_multi(mp: MultiSourceParams, j: int, x: float, l_at_x: float) -> float:
    """Conditional gain of a marginal order of the maker specialised in
    source ``j``: his own source's jump channel is discounted by f, every
    other source hits him at full weight."""
    if not 0 <= j < len(mp.sources):
        raise ValueError(f"source index {j} out of range")
    if x <= 0.0:
        raise ValueError("gain requires a positive distance x")
    p_noise = (1.0 - mp.total_r) * mp.volume.p_gt(l_at_x)
    denom = p_noise
    adverse = 0.0
    for k, src in enumerate(mp.sources):
        weight = src.r * (src.f if k == j else 1.0)
        denom += weight * src.jump.p_gt(x)
        adverse += weight * src.jump.tail_expectation(x)
    if denom == 0.0:
        raise UnfillableLevelError(
            f"no fill channel open at x = {x} with depth {l_at_x} ahead"
        )
    return x - adverse / denom


# ---------------------------------------------------------------------------
# Cumulative depth curves
# ---------------------------------------------------------------------------


_H_SNAP = 1e-12


def _invert_break_even(volume: VolumeLaw, h: np.ndarray) -> np.ndarray:
    """Map break-even CDF arguments to depth: h <= 1/2 -> 0 (no depth),
    h >= 1 -> unbounded sentinel, otherwise the volume quantile.

    Arguments within 1e-12 of 1/2 count as 1/2 so a spread landing exactly
    on a grid point leaves that level empty instead of carrying solver
    noise worth of depth.
    """
    out = np.zeros_like(h)
    out[h >= 1.0] = UNBOUNDED
    mid = (h > 0.5 + _H_SNAP) & (h < 1.0)
    if np.any(mid):
        out[mid] = volume.quantile(h[mid])
    return out


def book_curves(p: ModelParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative depth (informed, noise) at each distance in ``x``.

    Handles toxicity uniformly: the depth coefficient is multiplied by
    ``x / (x - theta_bar)`` and distances at or below the drift carry no
    depth.  Grid entries at x = 0 map to zero depth.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("distances must be nonnegative")
    tb = theta_bar(p)
    h_i = np.full(x.shape, -np.inf)
    h_u = np.full(x.shape, -np.inf)
    live = x > tb if tb > 0.0 else x > 0.0
    if np.any(live):
        xl = x[live]
        emax = p.jump.emax_ratio(xl)
        base = p.r / (1.0 - p.r)
        factor = xl / (xl - tb) if tb > 0.0 else 1.0
        h_i[live] = 1.0 + p.f * base * factor * (1.0 - emax)
        h_u[live] = 1.0 + base * factor * (1.0 - emax)
    return _invert_break_even(p.volume, h_i), _invert_break_even(p.volume, h_u)


def shape_continuous(p: ModelParams, x_grid) -> BookShape:
    """Visible book on a continuous price axis (no tick, no toxicity)."""
    if p.tick != 0.0:
        raise ValueError("shape_continuous requires tick = 0; use shape_tick")
    if p.theta != 0.0:
        raise ValueError("shape_continuous requires theta = 0; use shape_toxic")
    x = np.asarray(x_grid, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("the continuous grid must be strictly positive")
    l_i, l_u = book_curves(p, x)
    return BookShape(grid=x, informed=l_i, noise=l_u, effective=l_i)


def shape_toxic(p: ModelParams, x_grid) -> BookShape:
    """Visible book with noise-trader toxicity; reduces exactly to
    :func:`shape_continuous` when theta = 0."""
    if p.tick != 0.0:
        raise ValueError("shape_toxic requires tick = 0")
    x = np.asarray(x_grid, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("the grid must be strictly positive")
    l_i, l_u = book_curves(p, x)
    return BookShape(grid=x, informed=l_i, noise=l_u, effective=l_i)


def shape_tick(p: ModelParams, n_levels: int) -> BookShape:
    """Book on the tick grid: level i sits at distance d + (i-1)*tick.

    The first level at distance zero (d = 0) carries no depth.  Per-level
    quantities are first differences of the cumulative curve.
    """
    if p.tick <= 0.0:
        raise ValueError("shape_tick requires a positive tick")
    if n_levels < 1:
        raise ValueError("n_levels must be at least 1")
    x = p.offset_d + p.tick * np.arange(n_levels, dtype=float)
    l_i, l_u = book_curves(p, x)
    with np.errstate(invalid="ignore"):
        # consecutive unbounded levels difference to nan: level size is
        # undefined once the cumulative book is infinite
        per_level = np.diff(l_i, prepend=0.0)
    return BookShape(
        grid=x,
        informed=l_i,
        noise=l_u,
        effective=l_i,
        tick=p.tick,
        offset_d=p.offset_d,
        per_level=per_level,
    )


def shape_multi(mp: MultiSourceParams, x_grid) -> BookShape:
    """Per-source break-even curves and their pointwise maximum (the
    visible book) under several independent jump sources."""
    x = np.asarray(x_grid, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("the grid must be strictly positive")
    total = mp.total_r
    scale = 1.0 / (1.0 - total)
    emax = [src.jump.emax_ratio(x) for src in mp.sources]

    h_sources = []
    for k, src in enumerate(mp.sources):
        linear = src.r * src.f
        weighted = src.r * src.f * emax[k]
        for j, other in enumerate(mp.sources):
            if j == k:
                continue
            linear += other.r
            weighted += other.r * emax[j]
        h_sources.append(1.0 + scale * (linear - weighted))

    h_noise = 1.0 + scale * sum(
        src.r * (1.0 - emax[k]) for k, src in enumerate(mp.sources)
    )
    h_eff = np.maximum.reduce(h_sources)

    volume = mp.volume
    books = tuple(_invert_break_even(volume, h) for h in h_sources)
    l_eff = _invert_break_even(volume, h_eff)
    l_u = _invert_break_even(volume, np.asarray(h_noise, dtype=float))
    return BookShape(
        grid=x,
        informed=l_eff,
        noise=l_u,
        effective=l_eff,
        source_books=books,
    )


# ---------------------------------------------------------------------------
# Spread solvers
# ---------------------------------------------------------------------------


def _solve_emax_equation(jump: JumpLaw, rhs: float) -> RootResult:
    """Solve ``emax(x) = rhs`` for the unique positive root (rhs > 1).

    Below the support infimum ``emax(x) = E[B]/x`` gives the root in closed
    form; that branch is checked first to avoid bracketing across the
    support kink.  Otherwise ``E[B]/rhs`` is a guaranteed lower bracket
    because ``emax(x) >= E[B]/x`` everywhere.
    """
    if rhs <= 1.0:
        raise SolverError(f"emax equation needs rhs > 1, got {rhs}")
    x0 = jump.mean / rhs
    if x0 <= jump.support_inf:
        return RootResult(x0, 0)
    try:
        return bisect_decreasing(lambda x: jump.emax_ratio(x) - rhs, x0)
    except BracketError as exc:  # pragma: no cover - defensive
        raise SolverError(str(exc)) from exc


def spread_continuous(p: ModelParams) -> SpreadSolution:
    """Half-spread on the continuous price axis (theta = 0).

    ``phi`` solves ``emax(phi) = 1 + (1/(2f)) * (1/r - 1)``; ``mu`` is the
    noise-maker spread from the same equation at f = 1, so ``phi <= mu``
    with equality iff f = 1.
    """
    if p.theta != 0.0:
        raise ValueError("spread_continuous requires theta = 0; use spread_toxic")
    if p.f == 0.0 or p.r == 0.0:
        raise ZeroSpreadRegime(
            "no adverse selection (f = 0 or r = 0): depth is unbounded and "
            "the spread collapses to zero"
        )
    rhs = 1.0 + (1.0 / (2.0 * p.f)) * (1.0 / p.r - 1.0)
    root = _solve_emax_equation(p.jump, rhs)
    rhs_mu = 1.0 + 0.5 * (1.0 / p.r - 1.0)
    root_mu = _solve_emax_equation(p.jump, rhs_mu)
    residual = abs(p.jump.emax_ratio(root.x) - rhs) / rhs
    return SpreadSolution(
        phi=root.x,
        mu=root_mu.x,
        solver_iters=root.iterations,
        residual=residual,
    )


def strict_ceil(y: float, snap_tol: float = 1e-9) -> int:
    """Smallest integer strictly greater than ``y``.

    Values within ``snap_tol`` (relative) of an integer are treated as that
    integer, so a spread landing exactly on a tick boundary leaves the
    boundary level empty rather than depending on float noise.
    """
    nearest = round(y)
    if abs(y - nearest) <= snap_tol * max(1.0, abs(y)):
        return int(nearest) + 1
    return math.floor(y) + 1


def spread_tick(p: ModelParams) -> SpreadSolution:
    """Tick-grid spread quantities derived from the continuous root.

    ``k_d`` is the first occupied level, the smallest k with
    ``d + (k-1)*tick > phi``; the quoted spread adds the symmetric bid-side
    ceiling at offset ``tick - d``.
    """
    if p.tick <= 0.0:
        raise ValueError("spread_tick requires a positive tick")
    sol = spread_continuous(p)
    steps_ask = strict_ceil((sol.phi - p.offset_d) / p.tick)
    steps_bid = strict_ceil((sol.phi + p.offset_d) / p.tick)
    sol.k_d = 1 + steps_ask
    sol.spread_tick = p.tick * (steps_ask + steps_bid)
    return sol


def spread_toxic(p: ModelParams) -> SpreadSolution:
    """Half-spread with noise-trader toxicity.

    Solves ``emax(phi) = 1 + ((1-r)/(2rf)) * (phi - theta_bar)/phi`` on
    ``(theta_bar, inf)``; the left side decreases and the right side
    increases in phi, so the difference is monotone.  Reduces exactly to
    :func:`spread_continuous` when theta = 0, and always returns
    ``phi_theta > theta_bar`` and ``phi_theta >= phi``.
    """
    if p.f == 0.0 or p.r == 0.0:
        raise ZeroSpreadRegime(
            "no adverse selection (f = 0 or r = 0): depth is unbounded and "
            "the spread collapses to zero"
        )
    tb = theta_bar(p)
    base = spread_continuous(
        p if p.theta == 0.0 else ModelParams(
            r=p.r, f=p.f, jump=p.jump, volume=p.volume,
            tick=p.tick if p.tick > 0 else 0.0, offset_d=p.offset_d,
        )
    )
    if tb == 0.0:
        base.phi_theta = base.phi
        return base

    c = (1.0 - p.r) / (2.0 * p.r * p.f)

    def g(phi: float) -> float:
        return p.jump.emax_ratio(phi) - 1.0 - c * (phi - tb) / phi

    lo = max(base.phi, tb * (1.0 + 1e-12))
    if g(lo) < 0.0:
        raise SolverError(
            f"toxic spread equation has no root above {lo}; "
            "the jump law's emax is already at its floor"
        )
    try:
        root = bisect_decreasing(g, lo)
    except BracketError as exc:
        raise SolverError(str(exc)) from exc
    rhs_at_root = 1.0 + c * (root.x - tb) / root.x
    base.phi_theta = root.x
    base.solver_iters = root.iterations
    base.residual = abs(p.jump.emax_ratio(root.x) - rhs_at_root) / rhs_at_root
    return base
