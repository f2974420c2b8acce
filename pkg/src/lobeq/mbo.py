"""Market-by-order event logs: schema, strict CSV parser, book replay.

The log is a flat event feed, one row per order-book event, reporting what
the matching engine did (it is not an instruction stream: executions are
reported against both the resting order and the aggressing order, so a
marketable add is followed by the execute rows that uncross the book).

CSV schema (exact header)::

    ts_ns,order_id,action,side,price,qty,aggressor_flag,participant_label

* ``action`` is one of add/modify/cancel/execute
* ``qty`` is an integer number of volume units; on modify it is the new
  resting quantity, on cancel it must equal the remaining quantity
  (partial reductions are modifies)
* ``aggressor_flag`` marks execute rows belonging to the incoming order
  (their price is the fill price, not the order's resting price); empty
  when not applicable
* ``participant_label`` is an optional ground-truth tag (simulator
  exports carry IT/NT/IMM/NMM), empty for real feeds

Replay applies events under price-time (FIFO) priority and reconstructs
every order's lifecycle together with per-timestamp best-quote snapshots.
"""

from __future__ import annotations

import csv
import io
from bisect import insort
from collections import deque
from dataclasses import dataclass, field

__all__ = [
    "HEADER",
    "ACTIONS",
    "SIDES",
    "MboEvent",
    "OrderLifecycle",
    "Fill",
    "Replay",
    "MboParseError",
    "MboReplayError",
    "parse",
    "write_csv",
    "dumps",
    "reconstruct",
]

HEADER = ("ts_ns", "order_id", "action", "side", "price", "qty",
          "aggressor_flag", "participant_label")
ACTIONS = ("add", "modify", "cancel", "execute")
SIDES = ("bid", "ask")

_BOOL = {"true": True, "1": True, "false": False, "0": False}


class MboParseError(ValueError):
    """Malformed or inconsistent log row; the message names the row."""


class MboReplayError(ValueError):
    """Event stream violates book discipline during replay."""


@dataclass(frozen=True, slots=True)
class MboEvent:
    ts_ns: int
    order_id: int
    action: str
    side: str
    price: float
    qty: int
    aggressor_flag: bool | None = None
    participant_label: str | None = None


@dataclass(slots=True)
class Fill:
    """One execution row seen during replay."""

    ts_ns: int
    order_id: int
    side: str                    # side of the executed order
    price: float                 # execution price
    qty: int
    aggressor: bool
    participant_label: str | None


@dataclass(slots=True)
class OrderLifecycle:
    """An order from its add to its terminal event (or end of file)."""

    order_id: int
    side: str
    add_ts: int
    add_price: float
    add_qty: int
    participant_label: str | None
    # best-quote snapshot the instant before the add
    best_bid: float | None
    best_ask: float | None
    bid_qty: int
    ask_qty: int
    price: float = 0.0                    # current resting price
    n_updates: int = 0
    executed_qty: int = 0
    terminal_ts: int | None = None
    terminal_kind: str | None = None      # "executed" | "canceled" | None
    fills: list = field(default_factory=list)


@dataclass
class Replay:
    lifecycles: dict                      # order_id -> last lifecycle for that id
    all_lifecycles: list                  # in add order
    open_order_ids: list                  # still resting at end of file
    fills: list                           # Fill rows in feed order
    add_events: list                      # (ts, side, price) in feed order
    quote_ts: list                        # distinct timestamps
    quote_bid: list
    quote_ask: list
    quote_bid_qty: list
    quote_ask_qty: list


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse(source, tick: float | None = None) -> list[MboEvent]:
    """Read and validate a log; returns events in file order.

    Validation: exact header, field domains, nondecreasing timestamps,
    referential integrity (modify/cancel/execute must reference a live
    order), execute volume within the resting quantity, and optional
    tick-multiple price checks.  Errors name the offending row.
    """
    if hasattr(source, "read"):
        return _parse_rows(csv.reader(source), tick)
    with open(source, newline="") as fh:
        return _parse_rows(csv.reader(fh), tick)


def _parse_rows(rows, tick: float | None) -> list[MboEvent]:
    try:
        header = next(rows)
    except StopIteration:
        raise MboParseError("row 1: missing header") from None
    if tuple(header) != HEADER:
        raise MboParseError(f"row 1: header {header!r} does not match {','.join(HEADER)}")

    events: list[MboEvent] = []
    live: dict[int, int] = {}    # order_id -> remaining qty
    last_ts = None
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(HEADER):
            raise MboParseError(f"row {lineno}: expected {len(HEADER)} fields, got {len(row)}")
        try:
            ts = int(row[0])
            oid = int(row[1])
        except ValueError as exc:
            raise MboParseError(f"row {lineno}: {exc}") from None
        action = row[2]
        if action not in ACTIONS:
            raise MboParseError(f"row {lineno}: unknown action {action!r}")
        side = row[3]
        if side not in SIDES:
            raise MboParseError(f"row {lineno}: unknown side {side!r}")
        try:
            price = float(row[4])
            qty = int(row[5])
        except ValueError as exc:
            raise MboParseError(f"row {lineno}: {exc}") from None
        if qty < 0:
            raise MboParseError(f"row {lineno}: negative qty {qty}")
        flag_text = row[6].strip().lower()
        if flag_text == "":
            flag = None
        elif flag_text in _BOOL:
            flag = _BOOL[flag_text]
        else:
            raise MboParseError(f"row {lineno}: bad aggressor_flag {row[6]!r}")
        label = row[7] or None

        if last_ts is not None and ts < last_ts:
            raise MboParseError(f"row {lineno}: timestamp {ts} goes backwards")
        last_ts = ts
        if tick is not None:
            steps = price / tick
            if abs(steps - round(steps)) > 1e-6:
                raise MboParseError(f"row {lineno}: price {price} is not a multiple of tick {tick}")

        if action == "add":
            if oid in live:
                raise MboParseError(f"row {lineno}: order {oid} added twice")
            live[oid] = qty
        elif oid not in live:
            raise MboParseError(f"row {lineno}: {action} references unknown order {oid}")
        elif action == "modify":
            live[oid] = qty
        elif action == "cancel":
            del live[oid]
        else:  # execute
            if qty > live[oid]:
                raise MboParseError(
                    f"row {lineno}: execute qty {qty} exceeds resting {live[oid]} on order {oid}"
                )
            live[oid] -= qty
            if live[oid] == 0:
                del live[oid]

        events.append(MboEvent(ts, oid, action, side, price, qty, flag, label))
    return events


def write_csv(events, destination) -> None:
    """Serialize events in the canonical schema (UTF-8, 17-digit prices)."""
    own = not hasattr(destination, "write")
    out = open(destination, "w", newline="") if own else destination
    try:
        writer = csv.writer(out)
        writer.writerow(HEADER)
        for ev in events:
            flag = "" if ev.aggressor_flag is None else ("true" if ev.aggressor_flag else "false")
            writer.writerow((
                ev.ts_ns, ev.order_id, ev.action, ev.side,
                f"{ev.price:.17g}", ev.qty, flag, ev.participant_label or "",
            ))
    finally:
        if own:
            out.close()


def dumps(events) -> str:
    buf = io.StringIO()
    write_csv(events, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


class _SideState:
    """Resting orders of one side: price-level FIFOs plus sorted prices."""

    def __init__(self, is_bid: bool):
        self.is_bid = is_bid
        self.queues: dict[float, deque] = {}
        self.prices: list[float] = []     # ascending

    def add(self, price: float, oid: int) -> None:
        dq = self.queues.get(price)
        if dq is None:
            dq = self.queues[price] = deque()
            insort(self.prices, price)
        dq.append(oid)

    def remove(self, price: float, oid: int) -> None:
        dq = self.queues[price]
        dq.remove(oid)
        if not dq:
            del self.queues[price]
            self.prices.remove(price)

    def front(self, price: float):
        dq = self.queues.get(price)
        return dq[0] if dq else None

    def best(self):
        if not self.prices:
            return None
        return self.prices[-1] if self.is_bid else self.prices[0]


def reconstruct(events) -> Replay:
    """Replay a validated event stream.

    Maintains price-time priority (executions must consume the front of
    their price queue), rebuilds every order lifecycle, and records a
    best-quote snapshot per distinct timestamp: the state after the last
    row carrying that timestamp, i.e. the state prevailing until the
    next one.
    """
    sides = {"bid": _SideState(True), "ask": _SideState(False)}
    orders: dict[int, OrderLifecycle] = {}
    remaining: dict[int, int] = {}
    all_lifecycles: list[OrderLifecycle] = []
    fills: list[Fill] = []
    add_events: list[tuple] = []

    q_ts, q_bid, q_ask, q_bq, q_aq = [], [], [], [], []

    def snapshot_state():
        bb = sides["bid"].best()
        ba = sides["ask"].best()
        bq = sum(remaining[o] for o in sides["bid"].queues[bb]) if bb is not None else 0
        aq = sum(remaining[o] for o in sides["ask"].queues[ba]) if ba is not None else 0
        return bb, ba, bq, aq

    def push_snapshot(ts):
        bb, ba, bq, aq = snapshot_state()
        q_ts.append(ts)
        q_bid.append(bb)
        q_ask.append(ba)
        q_bq.append(bq)
        q_aq.append(aq)

    prev_ts = None
    for ev in events:
        if prev_ts is not None and ev.ts_ns > prev_ts:
            push_snapshot(prev_ts)
        prev_ts = ev.ts_ns

        if ev.action == "add":
            bb, ba, bq, aq = snapshot_state()
            lc = OrderLifecycle(
                order_id=ev.order_id, side=ev.side, add_ts=ev.ts_ns,
                add_price=ev.price, add_qty=ev.qty,
                participant_label=ev.participant_label,
                best_bid=bb, best_ask=ba, bid_qty=bq, ask_qty=aq,
                price=ev.price,
            )
            orders[ev.order_id] = lc
            all_lifecycles.append(lc)
            remaining[ev.order_id] = ev.qty
            sides[ev.side].add(ev.price, ev.order_id)
            add_events.append((ev.ts_ns, ev.side, ev.price))
            continue

        lc = orders.get(ev.order_id)
        if lc is None or lc.terminal_kind is not None:
            raise MboReplayError(f"{ev.action} references dead order {ev.order_id}")
        state = sides[lc.side]

        if ev.action == "modify":
            lc.n_updates += 1
            # price change or size increase loses queue position
            if ev.price != lc.price or ev.qty > remaining[ev.order_id]:
                state.remove(lc.price, ev.order_id)
                state.add(ev.price, ev.order_id)
            lc.price = ev.price
            remaining[ev.order_id] = ev.qty
        elif ev.action == "cancel":
            if ev.qty != remaining[ev.order_id]:
                raise MboReplayError(
                    f"cancel qty {ev.qty} != remaining {remaining[ev.order_id]} "
                    f"on order {ev.order_id}"
                )
            state.remove(lc.price, ev.order_id)
            lc.terminal_ts = ev.ts_ns
            lc.terminal_kind = "canceled"
            del remaining[ev.order_id]
        else:  # execute
            if state.front(lc.price) != ev.order_id:
                raise MboReplayError(
                    f"execute on order {ev.order_id} which is not at the front "
                    f"of {lc.side}@{lc.price}"
                )
            if ev.aggressor_flag is not True and ev.price != lc.price:
                raise MboReplayError(
                    f"execute price {ev.price} != resting price {lc.price} "
                    f"on order {ev.order_id}"
                )
            if ev.qty > remaining[ev.order_id]:
                raise MboReplayError(
                    f"execute qty {ev.qty} exceeds resting {remaining[ev.order_id]} "
                    f"on order {ev.order_id}"
                )
            remaining[ev.order_id] -= ev.qty
            lc.executed_qty += ev.qty
            fill = Fill(ev.ts_ns, ev.order_id, lc.side, ev.price, ev.qty,
                        bool(ev.aggressor_flag), lc.participant_label)
            fills.append(fill)
            lc.fills.append(fill)
            if remaining[ev.order_id] == 0:
                state.remove(lc.price, ev.order_id)
                lc.terminal_ts = ev.ts_ns
                lc.terminal_kind = "executed"
                del remaining[ev.order_id]

    if prev_ts is not None:
        push_snapshot(prev_ts)

    open_ids = [oid for oid, lc in orders.items() if lc.terminal_kind is None]
    return Replay(
        lifecycles=orders, all_lifecycles=all_lifecycles,
        open_order_ids=open_ids, fills=fills, add_events=add_events,
        quote_ts=q_ts, quote_bid=q_bid, quote_ask=q_ask,
        quote_bid_qty=q_bq, quote_ask_qty=q_aq,
    )
