"""Snapshot CSV input/output, session filtering, and config files.

File format: UTF-8, LF line endings, header
``instrument,date,time,bp1,bq1,ap1,aq1,...,bpK,bqK,apK,aqK`` with depth
K inferred from the header. Prices are decimals with up to four decimal
places on the tick grid; quantities are positive integers. A level slot
an absent level leaves behind is four empty cells, and levels are
contiguous from slot 1, so a fully empty side (a limit-locked book) is
a row of empty cells on that side. Rows are sorted by instrument, date,
time.

Severity contract: unreadable files and malformed headers raise; any
damage inside a day's rows (bad field counts, off-grid prices or times,
invalid books, unsorted times) aborts that (instrument, date) only and
is reported with the underlying reason and 1-based row number, while
other days continue to parse.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import Decimal

from .book import (
    BookLevel,
    BookValidationError,
    LobError,
    SessionSpec,
    Snapshot,
    ticks_from_price,
    validate_snapshot,
)

REASON_LIMIT_LOCKED = "limit-locked"
REASON_GAP_EXCESS = "gap-excess"
REASON_MALFORMED = "malformed"

DEFAULT_MAX_GAP_FRACTION = 0.05


class IngestionError(LobError):
    """Structural input problem: unreadable file or broken schema."""


@dataclass(frozen=True)
class SessionDay:
    """All kept snapshots of one instrument on one trading day."""

    instrument: str
    date: str  # ISO yyyy-mm-dd
    snapshots: tuple[Snapshot, ...]

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(self.snapshots))


@dataclass(frozen=True)
class DayDecision:
    instrument: str
    date: str
    kept: bool
    reason: str | None = None
    detail: str = ""


@dataclass
class DayFilterReport:
    """Keep/exclude decision per (instrument, date); each day appears once."""

    decisions: list[DayDecision] = field(default_factory=list)

    def add(self, decision: DayDecision) -> None:
        self.decisions.append(decision)

    def merge(self, other: "DayFilterReport") -> "DayFilterReport":
        merged = DayFilterReport(list(self.decisions))
        merged.decisions.extend(other.decisions)
        return merged

    def excluded(self) -> list[DayDecision]:
        return [d for d in self.decisions if not d.kept]


def clock_to_seconds(text: str) -> int:
    parts = text.strip().split(":")
    if len(parts) != 3:
        raise ValueError(f"bad clock time {text!r}")
    h, m, s = (int(p) for p in parts)
    if not (0 <= h < 24 and 0 <= m < 60 and 0 <= s < 60):
        raise ValueError(f"bad clock time {text!r}")
    return h * 3600 + m * 60 + s


def seconds_to_clock(sec: int) -> str:
    h, rem = divmod(sec, 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


def _parse_header(header: list[str]) -> int:
    """Validate the column layout and return the depth K."""
    if len(header) < 7 or header[:3] != ["instrument", "date", "time"]:
        raise IngestionError(
            "header must start with instrument,date,time", code="schema-error"
        )
    level_cols = header[3:]
    if len(level_cols) % 4 != 0:
        raise IngestionError("level columns must come in groups of four", code="schema-error")
    depth = len(level_cols) // 4
    for i in range(depth):
        expected = [f"bp{i+1}", f"bq{i+1}", f"ap{i+1}", f"aq{i+1}"]
        if level_cols[4 * i : 4 * i + 4] != expected:
            raise IngestionError(
                f"level columns for slot {i+1} must be {','.join(expected)}",
                code="schema-error",
            )
    return depth


def _parse_side(cells: list[str], tick_size: float, side: str) -> list[BookLevel]:
    """Read (price, qty) pairs until the first empty slot; later slots must stay empty."""
    levels: list[BookLevel] = []
    ended = False
    for i in range(0, len(cells), 2):
        p_cell, q_cell = cells[i].strip(), cells[i + 1].strip()
        if p_cell == "" and q_cell == "":
            ended = True
            continue
        if ended:
            raise BookValidationError(
                f"{side} levels are not contiguous from slot 1", code="schema-error"
            )
        if p_cell == "" or q_cell == "":
            raise BookValidationError(f"half-empty {side} level slot", code="schema-error")
        price = float(p_cell)
        if "." in p_cell and len(p_cell.split(".")[1]) > 4:
            raise BookValidationError(
                f"{side} price {p_cell} has more than 4 decimals", code="price-grid-error"
            )
        quantity = int(q_cell)
        try:
            ticks = ticks_from_price(price, tick_size)
        except BookValidationError as exc:
            # file-level name for the grid violation, row context added upstream
            raise BookValidationError(str(exc), code="price-grid-error") from None
        levels.append(BookLevel(ticks, quantity))
    return levels


def parse_snapshots(path: str, spec: SessionSpec) -> tuple[list[SessionDay], DayFilterReport]:
    """Parse a snapshot CSV into per-day snapshot runs.

    Rows outside the session segments are dropped silently; grid and
    book invariants are enforced per the module severity contract.
    """
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}", code="io-error") from exc
    with handle:
        return _parse_stream(handle, spec)


def parse_snapshots_text(text: str, spec: SessionSpec) -> tuple[list[SessionDay], DayFilterReport]:
    """parse_snapshots for in-memory CSV text (the service path)."""
    return _parse_stream(io.StringIO(text), spec)


def _parse_stream(handle, spec: SessionSpec) -> tuple[list[SessionDay], DayFilterReport]:
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestionError("file has no header row", code="schema-error") from None
    depth = _parse_header(header)
    n_cols = 3 + 4 * depth

    days: dict[tuple[str, str], list[Snapshot]] = {}
    dead: dict[tuple[str, str], tuple[str, str]] = {}  # key -> (reason, detail)
    last_sec: dict[tuple[str, str], int] = {}

    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        key = (row[0], row[1]) if len(row) >= 2 else ("?", "?")
        if key in dead:
            continue
        try:
            if len(row) != n_cols:
                raise BookValidationError(
                    f"expected {n_cols} fields, got {len(row)}", code="schema-error"
                )
            sec = clock_to_seconds(row[2])
            try:
                seg, off = spec.locate(sec * 1000)
            except LobError as exc:
                if exc.code == "outside-session":
                    continue  # window filter: drop silently
                raise
            if off % spec.snapshot_period != 0:
                raise BookValidationError(
                    f"time {row[2]} is off the {spec.snapshot_period}s grid", code="off-grid"
                )
            if key in last_sec and sec <= last_sec[key]:
                raise BookValidationError(
                    f"time {row[2]} does not increase within the day", code="unsorted-rows"
                )
            cells = row[3:]
            bid_cells = [c for i in range(depth) for c in (cells[4 * i], cells[4 * i + 1])]
            ask_cells = [c for i in range(depth) for c in (cells[4 * i + 2], cells[4 * i + 3])]
            bids = _parse_side(bid_cells, spec.tick_size, "bid")
            asks = _parse_side(ask_cells, spec.tick_size, "ask")
            snap = Snapshot(sec * 1000, tuple(bids), tuple(asks), depth)
            validate_snapshot(snap)
        except (LobError, ValueError) as exc:
            code = getattr(exc, "code", "malformed-value")
            dead[key] = (REASON_MALFORMED, f"{code}: row {row_no}: {exc}")
            days.pop(key, None)
            continue
        last_sec[key] = sec
        days.setdefault(key, []).append(snap)

    report = DayFilterReport()
    result = []
    for (instrument, date), snaps in days.items():
        report.add(DayDecision(instrument, date, kept=True))
        result.append(SessionDay(instrument, date, tuple(snaps)))
    for (instrument, date), (reason, detail) in dead.items():
        report.add(DayDecision(instrument, date, kept=False, reason=reason, detail=detail))
    return result, report


def _price_formatter(tick_size: float):
    """Format tick counts as decimal prices with the grid's precision."""
    tick_dec = Decimal(str(tick_size))
    decimals = max(0, -tick_dec.as_tuple().exponent)
    if decimals > 4:
        raise IngestionError(
            f"tick size {tick_size} needs more than 4 decimals", code="schema-error"
        )

    def fmt(ticks: int) -> str:
        return f"{Decimal(ticks) * tick_dec:.{decimals}f}"

    return fmt


DEFAULT_WRITE_DEPTH = 10


def render_snapshots_text(
    days: list[SessionDay], spec: SessionSpec, depth: int | None = None
) -> str:
    """Days as snapshot CSV text; parse(render(x)) == x.

    An empty day list yields a header-only file at the given depth.
    """
    for day in days:
        for snap in day.snapshots:
            if depth is None:
                depth = snap.depth
            elif snap.depth != depth:
                raise IngestionError("mixed snapshot depths in one file", code="schema-error")
    if depth is None:
        depth = DEFAULT_WRITE_DEPTH
    if depth < 1:
        raise IngestionError("depth must be >= 1", code="schema-error")
    fmt = _price_formatter(spec.tick_size)
    header = ["instrument", "date", "time"]
    for i in range(1, depth + 1):
        header += [f"bp{i}", f"bq{i}", f"ap{i}", f"aq{i}"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for day in sorted(days, key=lambda d: (d.instrument, d.date)):
        for snap in day.snapshots:
            row = [day.instrument, day.date, seconds_to_clock(snap.timestamp_ms // 1000)]
            for i in range(depth):
                if i < len(snap.bids):
                    row += [fmt(snap.bids[i].price), str(snap.bids[i].quantity)]
                else:
                    row += ["", ""]
                if i < len(snap.asks):
                    row += [fmt(snap.asks[i].price), str(snap.asks[i].quantity)]
                else:
                    row += ["", ""]
            writer.writerow(row)
    return buf.getvalue()


def write_snapshots(days: list[SessionDay], path: str, spec: SessionSpec) -> None:
    text = render_snapshots_text(days, spec)
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise IngestionError(f"cannot write {path}: {exc}", code="io-error") from exc


def expected_slots(spec: SessionSpec) -> int:
    """Grid positions per day: snapshots at start + i*period inside [start, end)."""
    total = 0
    for start, end in spec.segments:
        total += -((end - start) // -spec.snapshot_period)
    return total


def exclude_limit_days(
    days: list[SessionDay],
    spec: SessionSpec,
    max_gap_fraction: float = DEFAULT_MAX_GAP_FRACTION,
    exclusion_list: set[tuple[str, str]] | None = None,
) -> tuple[list[SessionDay], DayFilterReport]:
    """Drop limit-locked and excessively gappy days.

    A day with any one-sided snapshot is limit-locked (so is a day on
    the explicit exclusion list); otherwise a day missing more than
    max_gap_fraction of its expected grid slots is gap-excess.
    Idempotent: kept days pass unchanged through a second application.
    """
    listed = exclusion_list or set()
    slots = expected_slots(spec)
    kept: list[SessionDay] = []
    report = DayFilterReport()
    for day in days:
        key = (day.instrument, day.date)
        if key in listed:
            report.add(DayDecision(*key, kept=False, reason=REASON_LIMIT_LOCKED,
                                   detail="listed in exclusion file"))
            continue
        locked = next(
            (s for s in day.snapshots if not s.bids or not s.asks), None
        )
        if locked is not None:
            side = "bid" if not locked.bids else "ask"
            report.add(DayDecision(*key, kept=False, reason=REASON_LIMIT_LOCKED,
                                   detail=f"empty {side} side at {locked.timestamp_ms // 1000}s"))
            continue
        missing = slots - len(day.snapshots)
        if slots > 0 and missing / slots > max_gap_fraction:
            report.add(DayDecision(*key, kept=False, reason=REASON_GAP_EXCESS,
                                   detail=f"{missing} of {slots} grid slots missing"))
            continue
        report.add(DayDecision(*key, kept=True))
        kept.append(day)
    return kept, report


def split_in_out(
    days: list[SessionDay], boundary_date: str
) -> tuple[list[SessionDay], list[SessionDay]]:
    """Partition days at the boundary: date <= boundary is in-sample."""
    ins = [d for d in days if d.date <= boundary_date]
    outs = [d for d in days if d.date > boundary_date]
    if not ins or not outs:
        raise IngestionError(
            f"boundary {boundary_date} leaves an empty partition "
            f"({len(ins)} in, {len(outs)} out)",
            code="empty-partition",
        )
    return ins, outs


# --- key-value config files ---------------------------------------------

def load_config(path: str) -> dict[str, str]:
    """Read a ``key = value`` text file; '#' starts a comment."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}", code="io-error") from exc
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise IngestionError(
                f"{path}:{line_no}: expected key = value", code="schema-error"
            )
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def parse_segments(text: str) -> tuple[tuple[int, int], ...]:
    """Parse '09:30:00-11:30:00,13:00:00-14:57:00' into second windows."""
    segments = []
    for part in text.split(","):
        lo, _, hi = part.strip().partition("-")
        if not hi:
            raise IngestionError(f"bad session segment {part!r}", code="schema-error")
        segments.append((clock_to_seconds(lo), clock_to_seconds(hi)))
    return tuple(segments)


def session_spec_from_config(cfg: dict[str, str], interval_length: int | None = None) -> SessionSpec:
    """Build a SessionSpec from config keys; the first configured
    interval length is the default when none is given."""
    segments = parse_segments(cfg.get("session", "09:30:00-11:30:00,13:00:00-14:57:00"))
    if interval_length is None:
        interval_length = interval_lengths_from_config(cfg)[0]
    return SessionSpec(
        segments=segments,
        snapshot_period=int(cfg.get("snapshot_period", "3")),
        tick_size=float(cfg.get("tick_size", "0.01")),
        interval_length=interval_length,
    )


def interval_lengths_from_config(cfg: dict[str, str]) -> list[int]:
    text = cfg.get("interval_lengths", "30,60,300")
    lengths = [int(p) for p in text.split(",") if p.strip()]
    if not lengths:
        raise IngestionError("interval_lengths is empty", code="schema-error")
    return lengths


def parse_exclusion_entries(lines: list[str]) -> set[tuple[str, str]]:
    """'instrument,date' entries into an exclusion set; '#' comments out."""
    out = set()
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        instrument, _, date = line.partition(",")
        if not date:
            raise IngestionError(f"bad exclusion entry {raw!r}", code="schema-error")
        out.add((instrument.strip(), date.strip()))
    return out


def load_exclusion_list(path: str) -> set[tuple[str, str]]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}", code="io-error") from exc
    return parse_exclusion_entries(lines)
