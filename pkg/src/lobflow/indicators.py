"""Order-flow imbalance indicators over snapshot sequences.

Four indicator kinds are computed from consecutive snapshot pairs. The
classic kind (OFI) reads flow off best-level quantity changes with a
three-branch case split on the best-price move; the generalized kind
(GOFI) additionally sums the quantities of every level a multi-tick move
swept through. Both have log variants in which every quantity q enters
as ln(q). Interval values are sums of per-gap observation terms, and the
interval's response variable is the mid-price change in tick units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .book import (
    BookLevel,
    EmptySideError,
    LobError,
    SessionSpec,
    Snapshot,
    mid_price,
)

READING_SYMMETRIC = "symmetric"
READING_LEVELWISE = "levelwise"
_READINGS = (READING_SYMMETRIC, READING_LEVELWISE)


class IndicatorError(LobError):
    """An indicator precondition does not hold."""


class IndicatorKind(Enum):
    OFI = "ofi"
    LOG_OFI = "log-ofi"
    GOFI = "gofi"
    LOG_GOFI = "log-gofi"

    @property
    def is_log(self) -> bool:
        return self in (IndicatorKind.LOG_OFI, IndicatorKind.LOG_GOFI)

    @property
    def is_generalized(self) -> bool:
        return self in (IndicatorKind.GOFI, IndicatorKind.LOG_GOFI)

    @property
    def label(self) -> str:
        """Display name: OFI, log-OFI, GOFI, log-GOFI."""
        return _LABELS[self]

    @classmethod
    def from_text(cls, text: str) -> "IndicatorKind":
        key = text.strip().lower().replace("_", "-")
        for kind in cls:
            if key == kind.value or key == kind.label.lower():
                return kind
        raise IndicatorError(f"unknown indicator kind {text!r}", code="unknown-kind")


_LABELS = {
    IndicatorKind.OFI: "OFI",
    IndicatorKind.LOG_OFI: "log-OFI",
    IndicatorKind.GOFI: "GOFI",
    IndicatorKind.LOG_GOFI: "log-GOFI",
}

ALL_KINDS: tuple[IndicatorKind, ...] = (
    IndicatorKind.OFI,
    IndicatorKind.GOFI,
    IndicatorKind.LOG_OFI,
    IndicatorKind.LOG_GOFI,
)


def value_of(quantity: int, kind: IndicatorKind) -> float:
    """Quantity as it enters the indicator: q itself, or ln(q) for log kinds."""
    if quantity < 1:
        raise IndicatorError(
            f"quantity {quantity} must be a positive integer", code="nonpositive-quantity"
        )
    return math.log(quantity) if kind.is_log else float(quantity)


def level_span(prev_price: int, next_price: int) -> int:
    """Number of price levels an |Δticks| move spans, inclusive: |Δ| + 1.

    Direction-independent; an unchanged best spans exactly one level.
    """
    return abs(next_price - prev_price) + 1


def classic_side_term(
    prev_best: BookLevel, next_best: BookLevel, side: str, kind: IndicatorKind
) -> float:
    """Best-level flow contribution of one side over one snapshot gap.

    Bid side: price up -> v(q_n); unchanged -> v(q_n) - v(q_{n-1});
    down -> -v(q_{n-1}). Ask side mirrors with the roles of up and down
    exchanged. v is the identity or ln per ``kind``.
    """
    if kind.is_generalized:
        raise IndicatorError("classic term is defined for OFI and log-OFI only", code="kind-mismatch")
    if side not in ("bid", "ask"):
        raise ValueError(f"unknown side {side!r}")
    up = next_best.price > prev_best.price
    down = next_best.price < prev_best.price
    if not up and not down:
        return value_of(next_best.quantity, kind) - value_of(prev_best.quantity, kind)
    if side == "bid":
        return value_of(next_best.quantity, kind) if up else -value_of(prev_best.quantity, kind)
    return -value_of(prev_best.quantity, kind) if up else value_of(next_best.quantity, kind)


def _sum_levels(levels: Sequence[BookLevel], m: int, kind: IndicatorKind) -> tuple[float, int]:
    """Sum v(quantity) over the first m levels; returns (sum, truncations).

    When the side is shallower than m the sum is truncated at the
    available depth and one truncation event is counted.
    """
    take = min(m, len(levels))
    total = 0.0
    for lv in levels[:take]:
        total += value_of(lv.quantity, kind)
    return total, (1 if m > len(levels) else 0)


def generalized_side_term(
    prev: Snapshot,
    nxt: Snapshot,
    side: str,
    kind: IndicatorKind,
    reading: str = READING_SYMMETRIC,
) -> tuple[float, int]:
    """Multi-level flow contribution of one side over one snapshot gap.

    With m the level span of the best-price move: a move toward the
    spread books the sum of the first m arriving-side levels against the
    departed best (symmetric reading) or against the first m departed
    levels (levelwise reading); a move away books the surviving best
    against the sum of the first m departed levels; an unchanged best
    reduces to the classic quantity difference.

    Returns (term value, number of depth-truncation events).
    """
    if not kind.is_generalized:
        raise IndicatorError("generalized term is defined for GOFI and log-GOFI only", code="kind-mismatch")
    if reading not in _READINGS:
        raise IndicatorError(f"unknown GOFI reading {reading!r}", code="unknown-reading")
    prev_levels = prev.side(side)
    next_levels = nxt.side(side)
    if not prev_levels or not next_levels:
        raise EmptySideError(f"{side} side empty in snapshot pair")
    p0, q0 = prev_levels[0].price, prev_levels[0].quantity
    p1, q1 = next_levels[0].price, next_levels[0].quantity
    if p1 == p0:
        return value_of(q1, kind) - value_of(q0, kind), 0
    m = level_span(p0, p1)
    toward_spread = (p1 > p0) if side == "bid" else (p1 < p0)
    if toward_spread:
        arrived, trunc = _sum_levels(next_levels, m, kind)
        if reading == READING_SYMMETRIC:
            return arrived - value_of(q0, kind), trunc
        departed, trunc2 = _sum_levels(prev_levels, m, kind)
        return arrived - departed, trunc + trunc2
    departed, trunc = _sum_levels(prev_levels, m, kind)
    return value_of(q1, kind) - departed, trunc


@dataclass(frozen=True)
class ObservationTerm:
    """One gap's contribution: value = bid_term - ask_term."""

    bid_term: float
    ask_term: float
    value: float
    truncations: int = 0
    n: int = 0


def observation_term(
    prev: Snapshot,
    nxt: Snapshot,
    kind: IndicatorKind,
    reading: str = READING_SYMMETRIC,
    n: int = 0,
) -> ObservationTerm:
    """Signed flow-imbalance term e_n for one consecutive snapshot pair."""
    if kind.is_generalized:
        bid_term, tb = generalized_side_term(prev, nxt, "bid", kind, reading)
        ask_term, ta = generalized_side_term(prev, nxt, "ask", kind, reading)
        trunc = tb + ta
    else:
        bid_term = classic_side_term(prev.best_bid, nxt.best_bid, "bid", kind)
        ask_term = classic_side_term(prev.best_ask, nxt.best_ask, "ask", kind)
        trunc = 0
    return ObservationTerm(bid_term, ask_term, bid_term - ask_term, trunc, n)


def interval_indicator(terms: Sequence[ObservationTerm], n: int) -> float:
    """Sum of exactly n observation terms."""
    if n < 1 or len(terms) != n:
        raise IndicatorError(
            f"expected {n} observation terms, got {len(terms)}", code="wrong-count"
        )
    return sum(t.value for t in terms)


class SeriesPoint(NamedTuple):
    index: int       # interval slot within the session day
    end_ms: int      # timestamp of the closing snapshot
    value: float     # indicator over the interval
    mid_change: float  # closing mid minus opening mid, tick units


@dataclass(frozen=True)
class IndicatorSeries:
    """Per-interval indicator values with aligned mid-price responses."""

    kind: IndicatorKind
    interval_length: int
    points: tuple[SeriesPoint, ...]
    truncations: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    def values(self) -> list[float]:
        return [p.value for p in self.points]

    def mid_changes(self) -> list[float]:
        return [p.mid_change for p in self.points]


def compute_series(
    snapshots: Iterable[Snapshot],
    spec: SessionSpec,
    kind: IndicatorKind,
    reading: str = READING_SYMMETRIC,
) -> IndicatorSeries:
    """Stream one session day of snapshots into an IndicatorSeries.

    Snapshots must be strictly increasing in time, grid-aligned within
    the session segments, and all from the same day. Intervals are
    anchored at each segment start; an interval is emitted only if every
    one of its gaps_per_interval + 1 snapshots is present, so any missing
    snapshot silently drops the intervals it touches. Memory is bounded
    by one snapshot plus accumulators.
    """
    period_ms = spec.snapshot_period * 1000
    interval_s = spec.interval_length
    # interval slots of earlier segments, for a day-global interval index
    seg_base = []
    base = 0
    for start, end in spec.segments:
        seg_base.append(base)
        base += -((end - start) // -interval_s)  # ceil division

    points: list[SeriesPoint] = []
    truncations = 0
    open_snap: Snapshot | None = None   # opening snapshot of the interval in progress
    open_index = 0
    acc = 0.0
    acc_trunc = 0
    prev: Snapshot | None = None
    prev_seg = -1
    seen = 0

    for snap in snapshots:
        seen += 1
        seg, off = spec.locate(snap.timestamp_ms)
        if off % spec.snapshot_period != 0:
            raise IndicatorError(
                f"timestamp {snap.timestamp_ms} ms is off the snapshot grid", code="off-grid"
            )
        if prev is not None and snap.timestamp_ms <= prev.timestamp_ms:
            raise IndicatorError("snapshots are not strictly increasing in time", code="unsorted-input")
        contiguous = (
            prev is not None
            and seg == prev_seg
            and snap.timestamp_ms - prev.timestamp_ms == period_ms
        )
        if contiguous:
            if open_snap is not None:
                term = observation_term(prev, snap, kind, reading)
                acc += term.value
                acc_trunc += term.truncations
        else:
            open_snap = None  # a gap invalidates the interval in progress
        if off % interval_s == 0:
            if open_snap is not None:
                points.append(
                    SeriesPoint(open_index, snap.timestamp_ms, acc, mid_price(snap) - mid_price(open_snap))
                )
                truncations += acc_trunc
            open_snap = snap
            open_index = seg_base[seg] + off // interval_s
            acc = 0.0
            acc_trunc = 0
        prev = snap
        prev_seg = seg
    if seen == 0:
        raise IndicatorError("no snapshots supplied", code="empty-input")
    return IndicatorSeries(kind, interval_s, tuple(points), truncations)


def mirror_snapshot(snap: Snapshot, pivot: int) -> Snapshot:
    """Swap sides and map every price p to pivot - p.

    With pivot above the highest price this produces a valid book whose
    mid is pivot minus the original mid; every indicator kind negates
    under this transform.
    """
    bids = tuple(BookLevel(pivot - lv.price, lv.quantity) for lv in snap.asks)
    asks = tuple(BookLevel(pivot - lv.price, lv.quantity) for lv in snap.bids)
    return Snapshot(snap.timestamp_ms, bids, asks, snap.depth)
