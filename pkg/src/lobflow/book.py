"""Order-book snapshot primitives shared by every other module.

Prices live on the exchange tick grid and are stored as integer tick
counts, so every price comparison downstream is exact. Quantities are
positive integer order counts. A snapshot side may be empty or shorter
than the declared depth; that is how limit-locked books are represented.
"""

from __future__ import annotations

from dataclasses import dataclass

TickPrice = int  # a price as a signed count of tick-size units

# |price/tick - round(price/tick)| must stay below this to accept a decimal price
GRID_TOLERANCE = 1e-6


class LobError(Exception):
    """Base error for the toolkit; ``code`` names the violated rule."""

    code = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class BookValidationError(LobError):
    """A snapshot invariant does not hold."""


class EmptySideError(LobError):
    """An operation required a book side that has no levels."""

    code = "empty-side"


def ticks_from_price(price: float, tick_size: float) -> TickPrice:
    """Convert a decimal price to ticks, rejecting off-grid values."""
    if tick_size <= 0:
        raise BookValidationError("tick size must be positive", code="invalid-config")
    ratio = price / tick_size
    nearest = round(ratio)
    if abs(ratio - nearest) >= GRID_TOLERANCE:
        raise BookValidationError(
            f"price {price} is not on the {tick_size} grid", code="price-not-on-grid"
        )
    return int(nearest)


def price_from_ticks(ticks: TickPrice, tick_size: float) -> float:
    return ticks * tick_size


@dataclass(frozen=True)
class BookLevel:
    """One occupied price level: tick price plus resident quantity."""

    price: TickPrice
    quantity: int


@dataclass(frozen=True)
class Snapshot:
    """One timestamped observation of the top levels of both book sides.

    timestamp_ms  milliseconds since midnight of the session day
    bids          levels sorted by strictly decreasing price
    asks          levels sorted by strictly increasing price
    depth         declared capacity per side; 0 <= len(side) <= depth
    """

    timestamp_ms: int
    bids: tuple[BookLevel, ...]
    asks: tuple[BookLevel, ...]
    depth: int

    def __post_init__(self):
        # accept any iterable of levels; store immutably
        object.__setattr__(self, "bids", tuple(self.bids))
        object.__setattr__(self, "asks", tuple(self.asks))

    @property
    def best_bid(self) -> BookLevel:
        if not self.bids:
            raise EmptySideError("snapshot has no bid levels")
        return self.bids[0]

    @property
    def best_ask(self) -> BookLevel:
        if not self.asks:
            raise EmptySideError("snapshot has no ask levels")
        return self.asks[0]

    def side(self, name: str) -> tuple[BookLevel, ...]:
        if name == "bid":
            return self.bids
        if name == "ask":
            return self.asks
        raise ValueError(f"unknown side {name!r}")


@dataclass(frozen=True)
class SessionSpec:
    """Trading-session layout that places snapshots into indicator intervals.

    segments         half-open (start, end) windows in seconds since midnight;
                     indicator intervals are anchored at each segment start and
                     never span the gap between segments
    snapshot_period  seconds between consecutive snapshots
    tick_size        currency units per tick
    interval_length  indicator interval in seconds; a multiple of the period
    """

    segments: tuple[tuple[int, int], ...]
    snapshot_period: int = 3
    tick_size: float = 0.01
    interval_length: int = 30

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(tuple(s) for s in self.segments))
        if self.snapshot_period <= 0:
            raise BookValidationError("snapshot_period must be positive", code="invalid-config")
        if self.interval_length <= 0 or self.interval_length % self.snapshot_period != 0:
            raise BookValidationError(
                f"interval_length {self.interval_length} must be a positive multiple "
                f"of snapshot_period {self.snapshot_period}",
                code="invalid-config",
            )
        if self.tick_size <= 0:
            raise BookValidationError("tick_size must be positive", code="invalid-config")
        if not self.segments:
            raise BookValidationError("at least one session segment required", code="invalid-config")
        prev_end = None
        for start, end in self.segments:
            if start >= end:
                raise BookValidationError(
                    f"segment ({start}, {end}) is empty", code="invalid-config"
                )
            if prev_end is not None and start < prev_end:
                raise BookValidationError("segments overlap or are unsorted", code="invalid-config")
            prev_end = end

    @property
    def gaps_per_interval(self) -> int:
        return self.interval_length // self.snapshot_period

    def with_interval(self, interval_length: int) -> "SessionSpec":
        return SessionSpec(self.segments, self.snapshot_period, self.tick_size, interval_length)

    def locate(self, timestamp_ms: int) -> tuple[int, int]:
        """Return (segment index, offset seconds from segment start).

        Raises outside-session when the timestamp is in no segment.
        """
        sec, rem = divmod(timestamp_ms, 1000)
        if rem != 0:
            raise BookValidationError(
                f"timestamp {timestamp_ms} ms is not second-aligned", code="off-grid"
            )
        for i, (start, end) in enumerate(self.segments):
            if start <= sec < end:
                return i, sec - start
        raise BookValidationError(
            f"timestamp {sec} s falls outside every session segment", code="outside-session"
        )


# Mainland-exchange continuous-session defaults: 09:30-11:30 and 13:00-14:57.
CN_SEGMENTS: tuple[tuple[int, int], ...] = ((34200, 41400), (46800, 53820))


def _check_side(levels: tuple[BookLevel, ...], descending: bool, name: str) -> None:
    prev = None
    for lv in levels:
        if lv.quantity <= 0:
            raise BookValidationError(
                f"{name} level at {lv.price} has quantity {lv.quantity}",
                code="nonpositive-quantity",
            )
        if lv.price <= 0:
            raise BookValidationError(
                f"{name} level price {lv.price} must be a positive tick count",
                code="price-not-on-grid",
            )
        if prev is not None:
            ok = lv.price < prev if descending else lv.price > prev
            if not ok:
                raise BookValidationError(
                    f"{name} levels not strictly {'descending' if descending else 'ascending'} "
                    f"at price {lv.price}",
                    code="unsorted-levels",
                )
        prev = lv.price


def validate_snapshot(snap: Snapshot) -> None:
    """Raise BookValidationError naming the first violated invariant."""
    if snap.depth < 0 or len(snap.bids) > snap.depth or len(snap.asks) > snap.depth:
        raise BookValidationError(
            f"side holds more than depth={snap.depth} levels", code="depth-exceeded"
        )
    _check_side(snap.bids, descending=True, name="bid")
    _check_side(snap.asks, descending=False, name="ask")
    if snap.bids and snap.asks and snap.bids[0].price >= snap.asks[0].price:
        raise BookValidationError(
            f"best bid {snap.bids[0].price} >= best ask {snap.asks[0].price}",
            code="crossed-book",
        )


def is_valid_snapshot(snap: Snapshot) -> bool:
    try:
        validate_snapshot(snap)
    except LobError:
        return False
    return True


def mid_price(snap: Snapshot) -> float:
    """Mid-price in tick units: (best bid + best ask) / 2, possibly half-integral."""
    return (snap.best_bid.price + snap.best_ask.price) / 2.0


def mid_price_change(prev: Snapshot, nxt: Snapshot) -> float:
    """Signed mid-price move from prev to nxt in tick units."""
    return mid_price(nxt) - mid_price(prev)
