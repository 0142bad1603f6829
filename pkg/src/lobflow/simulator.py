"""Depth-capped queuing simulator emitting synthetic snapshot series.

Stylized single-instrument book: behind each side's best quote every
level holds exactly ``depth_cap`` orders, all the way down, so a side's
full state is its best price plus the count resting there. Six
independent Poisson streams drive events (limit, cancel, market per
order side). A limit order joins its side's working level: the best
while it has room, else a fresh level one tick toward the spread. If
that working price already holds opposing resting orders the limit
executes against them instead of resting and is booked as a market
order. Cancels and market orders drain the relevant best level; a best
that empties recedes one tick to a level holding exactly depth_cap.

Consequence used by the validation suite: encode a side as X = resident
orders relative to the gap-opening best level; every booked event moves
X by one, and the observed best price is opening_price +
ceil(X/depth_cap) - 1. The best-price displacement over any window is
therefore exactly floor((net_flow + opening_count - 1)/depth_cap),
which is the linear price-impact law with its floor-truncation
remainder made explicit. A side can never empty, so simulation never
aborts (the book-exhausted condition is unreachable in this
idealization and the per-gap exhausted flag is always False).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .book import BookLevel, LobError, Snapshot


class SimulationError(LobError):
    """Invalid simulator configuration or aborted run."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters. Rates are events per second per order side."""

    depth_cap: int = 20
    rate_limit: float = 5.0
    rate_cancel: float = 1.0
    rate_market: float = 3.0
    tick_size: float = 0.01
    snapshot_period: int = 3     # seconds between emitted snapshots
    duration: int = 30000        # seconds; duration // period snapshots
    snapshot_depth: int = 10     # levels per side in emitted snapshots
    seed: int = 1001
    initial_mid: int = 3000      # ticks
    initial_spread: int = 2      # ticks

    def __post_init__(self):
        if self.depth_cap < 1:
            raise SimulationError("depth_cap must be >= 1", code="invalid-config")
        for name in ("rate_limit", "rate_cancel", "rate_market"):
            if getattr(self, name) < 0:
                raise SimulationError(f"{name} must be >= 0", code="invalid-config")
        # cancellation must not outpace placement; an all-zero book is allowed
        if self.rate_cancel > 0 and self.rate_cancel >= self.rate_limit:
            raise SimulationError(
                "rate_cancel must stay below rate_limit", code="invalid-config"
            )
        if self.snapshot_period < 1 or self.duration < self.snapshot_period:
            raise SimulationError("duration must cover at least one period", code="invalid-config")
        if self.snapshot_depth < 1:
            raise SimulationError("snapshot_depth must be >= 1", code="invalid-config")
        if self.initial_spread < 1:
            raise SimulationError("initial_spread must be >= 1 tick", code="invalid-config")
        if self.tick_size <= 0:
            raise SimulationError("tick_size must be positive", code="invalid-config")
        if self.initial_mid - (self.initial_spread + 1) // 2 <= self.snapshot_depth:
            raise SimulationError("initial_mid too low for the requested depth", code="invalid-config")

    @property
    def n_snapshots(self) -> int:
        return self.duration // self.snapshot_period


def default_config(**overrides) -> SimConfig:
    """Moderate-flow preset; criterion baseline."""
    return replace(SimConfig(), **overrides) if overrides else SimConfig()


def high_rate_config(**overrides) -> SimConfig:
    """High-flow preset producing frequent multi-tick moves per gap."""
    base = SimConfig(
        rate_limit=40.0, rate_cancel=8.0, rate_market=30.0,
        duration=9000, seed=2002,
    )
    return replace(base, **overrides) if overrides else base


@dataclass
class BookState:
    """Mutable simulator state: two (best price, best count) sides plus
    event counters accumulated since the last snapshot emission."""

    depth_cap: int
    bid_price: int
    bid_count: int
    ask_price: int
    ask_count: int
    limit_bid: int = 0     # resting buy limits booked
    cancel_bid: int = 0    # bid-side cancellations
    market_sell: int = 0   # executions draining the bid
    limit_ask: int = 0
    cancel_ask: int = 0
    market_buy: int = 0    # executions draining the ask

    @property
    def bid_flow(self) -> int:
        return self.limit_bid - self.cancel_bid - self.market_sell

    @property
    def ask_flow(self) -> int:
        return self.limit_ask - self.cancel_ask - self.market_buy

    def reset_counters(self) -> None:
        self.limit_bid = self.cancel_bid = self.market_sell = 0
        self.limit_ask = self.cancel_ask = self.market_buy = 0

    def resident_orders(self, low: int, high: int) -> int:
        """Orders resting at tick prices within [low, high], both sides."""
        total = 0
        if self.bid_price >= low:
            deep = min(self.bid_price - 1, high) - low + 1  # full levels below best
            total += max(0, deep) * self.depth_cap
            if low <= self.bid_price <= high:
                total += self.bid_count
        if self.ask_price <= high:
            deep = high - max(self.ask_price + 1, low) + 1
            total += max(0, deep) * self.depth_cap
            if low <= self.ask_price <= high:
                total += self.ask_count
        return total

    def snapshot(self, timestamp_ms: int, depth: int) -> Snapshot:
        bids = [BookLevel(self.bid_price, self.bid_count)]
        bids += [BookLevel(self.bid_price - i, self.depth_cap) for i in range(1, depth)]
        asks = [BookLevel(self.ask_price, self.ask_count)]
        asks += [BookLevel(self.ask_price + i, self.depth_cap) for i in range(1, depth)]
        return Snapshot(timestamp_ms, tuple(bids), tuple(asks), depth)


def init_book(config: SimConfig) -> BookState:
    """Seed best levels at ceil(depth_cap/2), separated by the initial spread."""
    bid = config.initial_mid - (config.initial_spread + 1) // 2
    ask = bid + config.initial_spread
    count = (config.depth_cap + 1) // 2
    return BookState(config.depth_cap, bid, count, ask, count)


def _drain_bid(state: BookState) -> None:
    state.bid_count -= 1
    if state.bid_count == 0:
        state.bid_price -= 1
        state.bid_count = state.depth_cap


def _drain_ask(state: BookState) -> None:
    state.ask_count -= 1
    if state.ask_count == 0:
        state.ask_price += 1
        state.ask_count = state.depth_cap


def step(state: BookState, side: str, event: str) -> BookState:
    """Apply one event in place and return the state.

    side is the order side ("buy" or "sell"); event is "limit",
    "cancel" or "market". A buy limit whose working price has reached
    the ask executes there and is booked as a market buy; sell limits
    mirror this against the bid.
    """
    if side == "buy":
        if event == "limit":
            working = state.bid_price if state.bid_count < state.depth_cap else state.bid_price + 1
            if working >= state.ask_price:
                _drain_ask(state)
                state.market_buy += 1
            else:
                if state.bid_count < state.depth_cap:
                    state.bid_count += 1
                else:
                    state.bid_price += 1
                    state.bid_count = 1
                state.limit_bid += 1
        elif event == "cancel":
            _drain_bid(state)
            state.cancel_bid += 1
        elif event == "market":
            _drain_ask(state)
            state.market_buy += 1
        else:
            raise ValueError(f"unknown event {event!r}")
    elif side == "sell":
        if event == "limit":
            working = state.ask_price if state.ask_count < state.depth_cap else state.ask_price - 1
            if working <= state.bid_price:
                _drain_bid(state)
                state.market_sell += 1
            else:
                if state.ask_count < state.depth_cap:
                    state.ask_count += 1
                else:
                    state.ask_price -= 1
                    state.ask_count = 1
                state.limit_ask += 1
        elif event == "cancel":
            _drain_ask(state)
            state.cancel_ask += 1
        elif event == "market":
            _drain_bid(state)
            state.market_sell += 1
        else:
            raise ValueError(f"unknown event {event!r}")
    else:
        raise ValueError(f"unknown side {side!r}")
    return state


@dataclass(frozen=True)
class GapRecord:
    """Counters and book alignment for one snapshot gap."""

    bid_flow: int
    ask_flow: int
    bid_move: int        # observed best-bid displacement, ticks
    ask_move: int
    bid_open_count: int  # best-level counts when the gap opened
    ask_open_count: int
    exhausted: bool = False


def predicted_move(flow: int, open_count: int, depth_cap: int) -> int:
    """Exact tick displacement of a side's best implied by its net flow
    and the best-level count at the start of the window."""
    return (flow + open_count - 1) // depth_cap


@dataclass(frozen=True)
class SimResult:
    snapshots: tuple[Snapshot, ...]
    gaps: tuple[GapRecord, ...]
    config: SimConfig
    event_totals: dict

    def __iter__(self):
        return iter(self.snapshots)


# stream order: buy limit, buy cancel, buy market, sell limit, sell cancel, sell market
_STREAMS = (("buy", "limit"), ("buy", "cancel"), ("buy", "market"),
            ("sell", "limit"), ("sell", "cancel"), ("sell", "market"))


def run(config: SimConfig) -> SimResult:
    """Simulate one seeded session and emit snapshots every period.

    Deterministic for a fixed config: the six exponential streams draw
    from one seeded generator in a fixed order. The first snapshot shows
    the initial book at t=0; per-gap counters reset at each emission.
    """
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    state = init_book(config)
    rates = (
        config.rate_limit, config.rate_cancel, config.rate_market,
        config.rate_limit, config.rate_cancel, config.rate_market,
    )
    scale = [1.0 / r if r > 0 else 0.0 for r in rates]
    next_t = [rng.exponential(s) if s else float("inf") for s in scale]

    snapshots: list[Snapshot] = []
    gaps: list[GapRecord] = []
    totals = {"limit": 0, "cancel": 0, "market": 0, "events": 0}
    period_ms = config.snapshot_period * 1000
    open_bid_count = state.bid_count
    open_ask_count = state.ask_count
    open_bid_price = state.bid_price
    open_ask_price = state.ask_price

    for i in range(config.n_snapshots):
        t_emit = i * config.snapshot_period
        while True:
            j = 0
            t = next_t[0]
            for k in (1, 2, 3, 4, 5):
                if next_t[k] < t:
                    j = k
                    t = next_t[k]
            if t >= t_emit:
                break
            next_t[j] = t + rng.exponential(scale[j])
            side, event = _STREAMS[j]
            step(state, side, event)
            totals[event] += 1
            totals["events"] += 1
        if i > 0:
            gaps.append(GapRecord(
                state.bid_flow, state.ask_flow,
                state.bid_price - open_bid_price, state.ask_price - open_ask_price,
                open_bid_count, open_ask_count,
            ))
        snapshots.append(state.snapshot(i * period_ms, config.snapshot_depth))
        state.reset_counters()
        open_bid_count, open_ask_count = state.bid_count, state.ask_count
        open_bid_price, open_ask_price = state.bid_price, state.ask_price

    return SimResult(tuple(snapshots), tuple(gaps), config, totals)


def theoretical_slope(config: SimConfig) -> float:
    """Predicted no-intercept slope of mid-change on OFI: 1/(2 D)."""
    return 1.0 / (2.0 * config.depth_cap)
