"""Trade signatures and participant clustering over replayed event logs.

The signature of a trade cohort at horizon ``k`` is its volume-normalized
P&L against a reference price series read ``k`` later::

    ST(k) = eps * sum_t Q_t * (X_{t+k} - P_t) / sum_t |Q_t|

with ``Q_t`` signed by the liquidity taker (positive = buyer-initiated),
``eps = +1`` for the aggressive side and ``-1`` for the passive side.
Informed cohorts should drift positive with the horizon, uninformed ones
stay negative: everybody starts by paying the spread.

The reference series is piecewise constant and evaluated as its left
limit, i.e. the value prevailing when ``t + k`` arrives; at ``k = 0`` a
trade therefore sees the quote it actually crossed, not the post-trade
state stamped at the same nanosecond.

Clustering works on order-lifecycle metrics.  Cluster 0 is always the
most-informed bucket: durations below the first threshold for the time
metrics, values above the last threshold for volume ratio and update
count.  Records whose metric has no predecessor (first trade of a file,
first add at a level) land in the distinguished bucket ``-1`` and are
excluded from signatures.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .mbo import Replay

__all__ = [
    "REFERENCES",
    "METRICS",
    "micro_price",
    "mid_price",
    "QuoteSeries",
    "TradeRecord",
    "build_trade_records",
    "ClusterSpec",
    "classify",
    "trade_signature",
    "SignatureCurve",
    "signature_curves",
]

REFERENCES = ("micro", "mid", "touched")

#: metric -> (record attribute, side, ascending informedness order?)
METRICS = {
    "trade_to_add": ("trade_to_add_ns", "passive", True),
    "add_to_add": ("add_to_add_ns", "passive", True),
    "update_count": ("update_count", "passive", False),
    "trade_to_trade": ("trade_to_trade_ns", "aggressive", True),
    "volume_ratio": ("volume_ratio", "aggressive", False),
}

UNDEFINED_CLUSTER = -1


def micro_price(bid: float, ask: float, v_b: float, v_a: float) -> float:
    """Queue-imbalance weighted quote: pulled toward the thinner side."""
    if not bid < ask:
        raise ValueError(f"micro price needs bid < ask, got {bid} >= {ask}")
    if v_b < 0 or v_a < 0:
        raise ValueError("queue volumes must be nonnegative")
    if v_b == 0 and v_a == 0:
        raise ValueError("micro price undefined with both queues empty")
    return (bid * v_a + ask * v_b) / (v_a + v_b)


def mid_price(bid: float, ask: float) -> float:
    if not bid < ask:
        raise ValueError(f"mid price needs bid < ask, got {bid} >= {ask}")
    return 0.5 * (bid + ask)


# ---------------------------------------------------------------------------
# Reference series
# ---------------------------------------------------------------------------


class QuoteSeries:
    """Best-quote snapshots indexed by timestamp, left-limit evaluated."""

    def __init__(self, ts, bid, ask, bid_qty, ask_qty):
        self.ts = np.asarray(ts, dtype=np.int64)
        if np.any(np.diff(self.ts) <= 0):
            raise ValueError("snapshot timestamps must be strictly increasing")
        self.bid = np.array([np.nan if b is None else b for b in bid], dtype=float)
        self.ask = np.array([np.nan if a is None else a for a in ask], dtype=float)
        self.bid_qty = np.asarray(bid_qty, dtype=float)
        self.ask_qty = np.asarray(ask_qty, dtype=float)

    @classmethod
    def from_replay(cls, replay: Replay) -> "QuoteSeries":
        return cls(replay.quote_ts, replay.quote_bid, replay.quote_ask,
                   replay.quote_bid_qty, replay.quote_ask_qty)

    def index_before(self, t_ns: int) -> int:
        """Index of the snapshot prevailing at ``t_ns`` (strictly before)."""
        return int(np.searchsorted(self.ts, t_ns, side="left")) - 1

    def reference(self, t_ns: int, kind: str, trade_qty: int = 0) -> float:
        idx = self.index_before(t_ns)
        if idx < 0:
            raise ValueError(f"no reference snapshot before t = {t_ns}")
        bid, ask = self.bid[idx], self.ask[idx]
        if kind == "mid":
            if np.isnan(bid) or np.isnan(ask):
                raise ValueError(f"one-sided book at t = {t_ns}: mid undefined")
            return mid_price(bid, ask)
        if kind == "micro":
            if np.isnan(bid) or np.isnan(ask):
                raise ValueError(f"one-sided book at t = {t_ns}: micro undefined")
            return micro_price(bid, ask, self.bid_qty[idx], self.ask_qty[idx])
        if kind == "touched":
            quote = ask if trade_qty > 0 else bid
            if np.isnan(quote):
                raise ValueError(f"touched quote missing at t = {t_ns}")
            return float(quote)
        raise ValueError(f"unknown reference {kind!r}; expected one of {REFERENCES}")


# ---------------------------------------------------------------------------
# Trade records
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TradeRecord:
    """One execution with its clustering inputs.

    ``qty`` is signed by the liquidity taker.  Sweep-level metrics
    (trade-to-trade duration, volume ratio at the touched best limit) are
    shared by every fill of the sweep; passive metrics come from the
    resting order's lifecycle.  ``None`` marks an undefined metric.
    """

    t_ns: int
    qty: int
    price: float
    order_id: int
    participant_label: str | None
    aggressor: bool
    trade_to_trade_ns: int | None = None
    volume_ratio: float | None = None
    trade_to_add_ns: int | None = None
    add_to_add_ns: int | None = None
    update_count: int | None = None


def build_trade_records(replay: Replay) -> tuple[list[TradeRecord], list[TradeRecord]]:
    """(aggressive records, passive records) from a replayed log.

    Aggressive fills are grouped into sweeps by their order id; the
    volume ratio compares the quantity executed at the pre-trade best
    quote of the swept side with the quantity that was resting there.
    """
    quotes = QuoteSeries.from_replay(replay)
    fill_ts = [f.ts_ns for f in replay.fills]

    # adds per (side, price), feed order; timestamps are nondecreasing
    adds: dict[tuple, list[int]] = {}
    for ts, side, price in replay.add_events:
        adds.setdefault((side, price), []).append(ts)

    def last_trade_before(ts: int) -> int | None:
        idx = bisect_left(fill_ts, ts) - 1
        return fill_ts[idx] if idx >= 0 else None

    aggressive: list[TradeRecord] = []
    sweep: list = []

    def flush_sweep():
        if not sweep:
            return
        first = sweep[0]
        sign = 1 if first.side == "bid" else -1     # buy sweeps rest on the bid side
        prev = last_trade_before(first.ts_ns)
        ttt = first.ts_ns - prev if prev is not None else None
        ratio = None
        idx = quotes.index_before(first.ts_ns)
        if idx >= 0:
            best = quotes.ask[idx] if sign > 0 else quotes.bid[idx]
            avail = quotes.ask_qty[idx] if sign > 0 else quotes.bid_qty[idx]
            if not np.isnan(best) and avail > 0:
                at_best = sum(f.qty for f in sweep if f.price == best)
                if at_best > 0:
                    ratio = min(1.0, at_best / avail)
        for f in sweep:
            aggressive.append(TradeRecord(
                t_ns=f.ts_ns, qty=sign * f.qty, price=f.price,
                order_id=f.order_id, participant_label=f.participant_label,
                aggressor=True, trade_to_trade_ns=ttt, volume_ratio=ratio,
            ))
        sweep.clear()

    current_oid = None
    for f in replay.fills:
        if not f.aggressor:
            continue
        if f.order_id != current_oid:
            flush_sweep()
            current_oid = f.order_id
        sweep.append(f)
    flush_sweep()

    passive: list[TradeRecord] = []
    for lc in replay.all_lifecycles:
        executed = [f for f in lc.fills if not f.aggressor]
        if not executed:
            continue
        prev = last_trade_before(lc.add_ts)
        tta = lc.add_ts - prev if prev is not None else None
        level_adds = adds.get((lc.side, lc.add_price), [])
        idx = bisect_left(level_adds, lc.add_ts) - 1
        ata = lc.add_ts - level_adds[idx] if idx >= 0 else None
        sign = 1 if lc.side == "ask" else -1        # ask fills are buyer-initiated
        for f in executed:
            passive.append(TradeRecord(
                t_ns=f.ts_ns, qty=sign * f.qty, price=f.price,
                order_id=lc.order_id, participant_label=lc.participant_label,
                aggressor=False, trade_to_add_ns=tta, add_to_add_ns=ata,
                update_count=lc.n_updates,
            ))
    return aggressive, passive


# ---------------------------------------------------------------------------
# Clustering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterSpec:
    """Thresholds th_1 < ... < th_{n-1} splitting records into n buckets."""

    metric: str
    thresholds: tuple
    side: str

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}; expected one of {sorted(METRICS)}")
        attr, side, _asc = METRICS[self.metric]
        if self.side not in ("passive", "aggressive"):
            raise ValueError("side must be 'passive' or 'aggressive'")
        if self.side != side:
            raise ValueError(f"metric {self.metric!r} applies to the {side} side")
        th = tuple(float(t) for t in self.thresholds)
        if not th:
            raise ValueError("at least one threshold is required")
        if any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", th)

    @property
    def n_clusters(self) -> int:
        return len(self.thresholds) + 1


def classify(records: list[TradeRecord], spec: ClusterSpec) -> np.ndarray:
    """Cluster index per record; -1 for records with an undefined metric.

    Time metrics: cluster = number of thresholds at or below the value,
    so the fastest records land in cluster 0.  Volume ratio and update
    count are reversed: cluster = number of thresholds at or above the
    value, so depleting trades / heavily updated orders land in cluster 0.
    """
    attr, _side, ascending = METRICS[spec.metric]
    th = list(spec.thresholds)
    out = np.empty(len(records), dtype=np.int32)
    for i, rec in enumerate(records):
        value = getattr(rec, attr)
        if value is None:
            out[i] = UNDEFINED_CLUSTER
        elif ascending:
            out[i] = bisect_right(th, value)
        else:
            out[i] = len(th) - bisect_left(th, value)
    return out


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------


def trade_signature(records: list[TradeRecord], k_ns: int, eps: int,
                    reference: str, quotes: QuoteSeries) -> float:
    """ST(k) of one cohort; ``eps`` is +1 (aggressive) or -1 (passive)."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    if not records:
        raise ValueError("trade_signature needs a nonempty record list")
    num = 0.0
    den = 0.0
    for rec in records:
        try:
            x = quotes.reference(rec.t_ns + k_ns, reference, rec.qty)
        except ValueError as exc:
            raise ValueError(
                f"reference lookup failed for trade of order {rec.order_id} "
                f"at t = {rec.t_ns} + k = {k_ns}: {exc}"
            ) from None
        num += rec.qty * (x - rec.price)
        den += abs(rec.qty)
    return eps * num / den


@dataclass
class SignatureCurve:
    horizons_ns: tuple
    cluster_ids: tuple
    values: dict        # cluster id -> tuple of ST(k) along horizons
    counts: dict        # cluster id -> number of trades (horizon-independent)


def signature_curves(records: list[TradeRecord], clusters: np.ndarray,
                     horizons_ns, eps: int, reference: str,
                     quotes: QuoteSeries) -> SignatureCurve:
    """ST(k) per cluster along the horizon grid (undefined bucket dropped)."""
    horizons_ns = tuple(int(k) for k in horizons_ns)
    ids = sorted({int(c) for c in clusters if c != UNDEFINED_CLUSTER})
    by_cluster = {
        cid: [rec for rec, c in zip(records, clusters) if c == cid] for cid in ids
    }
    values = {
        cid: tuple(
            trade_signature(group, k, eps, reference, quotes)
            for k in horizons_ns
        )
        for cid, group in by_cluster.items()
    }
    counts = {cid: len(group) for cid, group in by_cluster.items()}
    return SignatureCurve(horizons_ns=horizons_ns, cluster_ids=tuple(ids),
                          values=values, counts=counts)
