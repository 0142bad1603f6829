"""End-to-end flows shared by the command line and the HTTP service.

simulate: synthetic snapshot days from the queueing book model.
compute: per-interval indicator rows from parsed snapshot days.
regress: no-intercept impact fits per instrument, kind, interval,
read off a computed indicator table and split at a boundary date.
report: aligned text or TSV tables of r-squared percentages.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace
from datetime import date as calendar_date, timedelta
from statistics import fmean

import numpy as np

from .book import LobError, SessionSpec
from .indicators import (
    ALL_KINDS,
    IndicatorKind,
    IndicatorSeries,
    READING_SYMMETRIC,
    SeriesPoint,
    compute_series,
)
from .ingestion import (
    DEFAULT_MAX_GAP_FRACTION,
    DayFilterReport,
    IngestionError,
    SessionDay,
    clock_to_seconds,
    exclude_limit_days,
    load_exclusion_list,
    seconds_to_clock,
)
from .regression import (
    OOS_FIXED_BETA,
    R2_CENTERED,
    evaluate_indicator,
)
from .simulator import SimConfig, run

AVERAGE_NAME = "AVERAGE"

TABLE_KEY_COLUMNS = ("instrument", "date", "time", "interval", "mid_change")

RESULTS_HEADER = (
    "instrument", "kind", "interval", "status", "beta",
    "r2_in", "r2_out", "n_in", "n_out", "oos_mode", "r2_mode",
)

PLOT_HEADER = ("instrument", "kind", "interval", "r2_in", "r2_out")


# --- simulation framing ---------------------------------------------------

@dataclass(frozen=True)
class SimFraming:
    """How simulator runs map onto instruments and calendar days."""

    instruments: tuple[str, ...] = ("SIM001",)
    start_date: str = "2024-01-02"
    days: int = 1
    session_start: int = 34200  # seconds after midnight

    def __post_init__(self):
        object.__setattr__(self, "instruments", tuple(self.instruments))
        if not self.instruments:
            raise IngestionError("no instruments to simulate", code="invalid-config")
        if len(set(self.instruments)) != len(self.instruments):
            raise IngestionError("duplicate instrument names", code="invalid-config")
        if self.days < 1:
            raise IngestionError("days must be at least 1", code="invalid-config")
        if not 0 <= self.session_start < 86400:
            raise IngestionError("session_start outside the day", code="invalid-config")
        try:
            calendar_date.fromisoformat(self.start_date)
        except ValueError:
            raise IngestionError(
                f"start_date {self.start_date!r} is not yyyy-mm-dd", code="invalid-config"
            ) from None


_SIM_FIELDS = {
    "depth_cap": int,
    "rate_limit": float,
    "rate_cancel": float,
    "rate_market": float,
    "tick_size": float,
    "snapshot_period": int,
    "duration": int,
    "snapshot_depth": int,
    "seed": int,
    "initial_mid": int,
    "initial_spread": int,
}


def sim_settings_from_config(cfg: dict[str, str], seed: int | None = None) -> tuple[SimConfig, SimFraming]:
    """Split a flat config dict into simulator parameters and framing.

    seed, when given, overrides the config file value.
    """
    kwargs = {}
    for key, conv in _SIM_FIELDS.items():
        if key in cfg:
            try:
                kwargs[key] = conv(cfg[key])
            except ValueError:
                raise IngestionError(
                    f"bad value for {key}: {cfg[key]!r}", code="schema-error"
                ) from None
    if seed is not None:
        kwargs["seed"] = seed
    config = SimConfig(**kwargs)

    if "instruments" in cfg:
        instruments = tuple(p.strip() for p in cfg["instruments"].split(",") if p.strip())
    elif "instrument" in cfg:
        instruments = (cfg["instrument"],)
    else:
        instruments = ("SIM001",)
    try:
        start_sec = clock_to_seconds(cfg.get("session_start", "09:30:00"))
        days = int(cfg.get("days", "1"))
    except ValueError as exc:
        raise IngestionError(str(exc), code="schema-error") from None
    framing = SimFraming(
        instruments=instruments,
        start_date=cfg.get("start_date", "2024-01-02"),
        days=days,
        session_start=start_sec,
    )
    return config, framing


def derived_seed(base: int, instrument_index: int, day_index: int) -> int:
    """Deterministic per-run seed, well separated across the grid."""
    seq = np.random.SeedSequence((base, instrument_index, day_index))
    return int(seq.generate_state(1)[0])


@dataclass(frozen=True)
class DayStats:
    """Per simulated day: the seed it ran under and what happened."""

    instrument: str
    date: str
    seed: int
    n_snapshots: int
    events: dict
    multi_tick_gaps: int  # gaps where a best price moved 2+ ticks


def simulate_days(config: SimConfig, framing: SimFraming) -> tuple[list[SessionDay], list[DayStats]]:
    """One independent simulator run per instrument per calendar day.

    Run timestamps start at zero; here they shift to the framing's
    session start so downstream session specs can place them.
    """
    first = calendar_date.fromisoformat(framing.start_date)
    shift = framing.session_start * 1000
    days: list[SessionDay] = []
    stats: list[DayStats] = []
    for i, instrument in enumerate(framing.instruments):
        for d in range(framing.days):
            day_seed = derived_seed(config.seed, i, d)
            result = run(replace(config, seed=day_seed))
            snaps = tuple(
                replace(s, timestamp_ms=s.timestamp_ms + shift) for s in result.snapshots
            )
            date = (first + timedelta(days=d)).isoformat()
            days.append(SessionDay(instrument, date, snaps))
            multi = sum(
                1 for g in result.gaps if abs(g.bid_move) >= 2 or abs(g.ask_move) >= 2
            )
            stats.append(DayStats(
                instrument, date, day_seed, len(snaps), dict(result.event_totals), multi,
            ))
    return days, stats


# --- indicator tables ------------------------------------------------------

@dataclass
class ComputeTable:
    header: tuple[str, ...]
    rows: list[list]
    truncations: dict[tuple[str, int], int]

    def total_truncations(self) -> int:
        return sum(self.truncations.values())


def compute_table(
    days: list[SessionDay],
    base_spec: SessionSpec,
    kinds: tuple[IndicatorKind, ...] | None = None,
    intervals: list[int] | None = None,
    reading: str = READING_SYMMETRIC,
) -> ComputeTable:
    """Indicator values per complete interval, one row per interval.

    time is the interval's end clock time; mid_change is in ticks.
    """
    if not days:
        raise IngestionError("no days to compute", code="empty-input")
    kinds = ALL_KINDS if kinds is None else tuple(dict.fromkeys(kinds))
    if intervals is None:
        intervals = [base_spec.interval_length]
    header = TABLE_KEY_COLUMNS + tuple(k.label for k in kinds)
    rows: list[list] = []
    truncations: dict[tuple[str, int], int] = {}
    for day in sorted(days, key=lambda d: (d.instrument, d.date)):
        for interval in intervals:
            spec = base_spec.with_interval(interval)
            series = [compute_series(day.snapshots, spec, kind, reading) for kind in kinds]
            for kind, s in zip(kinds, series):
                key = (kind.label, interval)
                truncations[key] = truncations.get(key, 0) + s.truncations
            for j, point in enumerate(series[0].points):
                row = [
                    day.instrument,
                    day.date,
                    seconds_to_clock(point.end_ms // 1000),
                    interval,
                    point.mid_change,
                ]
                row.extend(s.points[j].value for s in series)
                rows.append(row)
    return ComputeTable(header, rows, truncations)


def read_indicator_table(path: str) -> ComputeTable:
    """Read a compute-stage CSV back into typed rows."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            try:
                header = tuple(next(reader))
            except StopIteration:
                raise IngestionError("indicator file has no header", code="schema-error") from None
            if header[: len(TABLE_KEY_COLUMNS)] != TABLE_KEY_COLUMNS:
                raise IngestionError(
                    "indicator header must start with " + ",".join(TABLE_KEY_COLUMNS),
                    code="schema-error",
                )
            labels = header[len(TABLE_KEY_COLUMNS):]
            known = {k.label for k in ALL_KINDS}
            if not labels or not set(labels) <= known or len(set(labels)) != len(labels):
                raise IngestionError(
                    "indicator columns must be distinct labels from: "
                    + ", ".join(k.label for k in ALL_KINDS),
                    code="schema-error",
                )
            rows: list[list] = []
            for row_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise IngestionError(
                        f"row {row_no}: expected {len(header)} fields", code="schema-error"
                    )
                try:
                    typed = [row[0], row[1], row[2], int(row[3]), float(row[4])]
                    typed.extend(float(c) for c in row[5:])
                except ValueError as exc:
                    raise IngestionError(f"row {row_no}: {exc}", code="schema-error") from None
                rows.append(typed)
            return ComputeTable(header, rows, {})
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}", code="io-error") from exc


# --- regression tables ------------------------------------------------------

@dataclass(frozen=True)
class RegressRow:
    """One fitted (or failed) regression cell of the results table."""

    instrument: str
    kind: str  # indicator label
    interval: int
    status: str  # "ok" or an error code
    beta: float
    r2_in: float
    r2_out: float
    n_in: int
    n_out: int
    oos_mode: str
    r2_mode: str


def _series_from_points(kind: IndicatorKind, interval: int, pts: list[tuple[float, float]]) -> IndicatorSeries:
    points = tuple(
        SeriesPoint(i, 0, value, mid) for i, (value, mid) in enumerate(pts)
    )
    return IndicatorSeries(kind, interval, points)


def regress_table(
    table: ComputeTable,
    boundary_date: str,
    kinds: tuple[IndicatorKind, ...] | None = None,
    intervals: list[int] | None = None,
    oos_mode: str = OOS_FIXED_BETA,
    r2_mode: str = R2_CENTERED,
) -> list[RegressRow]:
    """Fit each instrument separately, then append an AVERAGE row.

    Rows dated on or before the boundary are in-sample. A failed cell
    (degenerate regressor, too few intervals, one-sided instrument)
    becomes a status-flagged row instead of aborting the table; the
    AVERAGE covers the cells that fit.
    """
    if not boundary_date:
        raise IngestionError("a boundary date is required", code="invalid-config")
    if not table.rows:
        raise IngestionError("no indicator rows to regress", code="empty-input")
    dates = {r[1] for r in table.rows}
    if all(d <= boundary_date for d in dates) or all(d > boundary_date for d in dates):
        raise IngestionError(
            f"boundary {boundary_date} leaves an empty partition", code="empty-partition"
        )
    labels = list(table.header[len(TABLE_KEY_COLUMNS):])
    if kinds is None:
        wanted = [(lab, IndicatorKind.from_text(lab)) for lab in labels]
    else:
        wanted = []
        for kind in dict.fromkeys(kinds):
            if kind.label not in labels:
                raise IngestionError(
                    f"indicator table has no {kind.label} column", code="kind-mismatch"
                )
            wanted.append((kind.label, kind))
    present_intervals = sorted({r[3] for r in table.rows})
    if intervals is None:
        intervals = present_intervals
    else:
        intervals = list(dict.fromkeys(intervals))
        missing = set(intervals) - set(present_intervals)
        if missing:
            raise IngestionError(
                f"indicator table has no interval {sorted(missing)}", code="kind-mismatch"
            )
    instruments = sorted({r[0] for r in table.rows})
    column = {lab: len(TABLE_KEY_COLUMNS) + i for i, lab in enumerate(labels)}

    rows: list[RegressRow] = []
    for interval in intervals:
        for label, kind in wanted:
            col = column[label]
            fitted: list[RegressRow] = []
            for instrument in instruments:
                pts_in: list[tuple[float, float]] = []
                pts_out: list[tuple[float, float]] = []
                for r in table.rows:
                    if r[0] != instrument or r[3] != interval:
                        continue
                    target = pts_in if r[1] <= boundary_date else pts_out
                    target.append((r[col], r[4]))
                try:
                    res = evaluate_indicator(
                        _series_from_points(kind, interval, pts_in),
                        _series_from_points(kind, interval, pts_out),
                        oos_mode=oos_mode,
                        r2_mode=r2_mode,
                    )
                except LobError as exc:
                    rows.append(RegressRow(
                        instrument, label, interval, exc.code or "error",
                        math.nan, math.nan, math.nan, 0, 0, oos_mode, r2_mode,
                    ))
                    continue
                row = RegressRow(
                    instrument, label, interval, "ok",
                    res.beta, res.r2_in, res.r2_out, res.n_in, res.n_out,
                    oos_mode, r2_mode,
                )
                rows.append(row)
                fitted.append(row)
            if fitted:
                rows.append(RegressRow(
                    AVERAGE_NAME, label, interval, "ok",
                    fmean(r.beta for r in fitted),
                    fmean(r.r2_in for r in fitted),
                    fmean(r.r2_out for r in fitted),
                    sum(r.n_in for r in fitted),
                    sum(r.n_out for r in fitted),
                    oos_mode, r2_mode,
                ))
            else:
                rows.append(RegressRow(
                    AVERAGE_NAME, label, interval, "no-data",
                    math.nan, math.nan, math.nan, 0, 0, oos_mode, r2_mode,
                ))
    return rows


# --- plain CSV output -------------------------------------------------------

def _cell_text(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        raise TypeError("no boolean cells")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)  # round-trips exactly, keeps reruns byte-identical
    raise TypeError(f"cannot format {type(value).__name__} cell")


def write_csv(path: str, header: tuple[str, ...], rows: list[list]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell_text(c) for c in row])
    except OSError as exc:
        raise IngestionError(f"cannot write {path}: {exc}", code="io-error") from exc


def write_results(rows: list[RegressRow], path: str) -> None:
    table = [
        [r.instrument, r.kind, r.interval, r.status, r.beta,
         r.r2_in, r.r2_out, r.n_in, r.n_out, r.oos_mode, r.r2_mode]
        for r in rows
    ]
    write_csv(path, RESULTS_HEADER, table)


def read_results(path: str) -> list[RegressRow]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise IngestionError("results file has no header", code="schema-error") from None
            if tuple(header) != RESULTS_HEADER:
                raise IngestionError(
                    f"results header must be {','.join(RESULTS_HEADER)}", code="schema-error"
                )
            rows = []
            for row_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(RESULTS_HEADER):
                    raise IngestionError(
                        f"row {row_no}: expected {len(RESULTS_HEADER)} fields", code="schema-error"
                    )
                try:
                    rows.append(RegressRow(
                        row[0], row[1], int(row[2]), row[3], float(row[4]),
                        float(row[5]), float(row[6]), int(row[7]), int(row[8]),
                        row[9], row[10],
                    ))
                except ValueError as exc:
                    raise IngestionError(f"row {row_no}: {exc}", code="schema-error") from None
            return rows
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}", code="io-error") from exc


def plot_rows(rows: list[RegressRow]) -> list[list]:
    """r2 by instrument and kind, for external plotting tools."""
    return [
        [r.instrument, r.kind, r.interval, r.r2_in, r.r2_out]
        for r in rows
        if r.instrument != AVERAGE_NAME and r.status == "ok"
    ]


def plot_path(results_path: str) -> str:
    stem, ext = os.path.splitext(results_path)
    return f"{stem}_plot{ext or '.csv'}"


def report_tsv_path(text_path: str) -> str:
    stem, _ = os.path.splitext(text_path)
    return stem + ".tsv"


# --- report rendering --------------------------------------------------------

_LABEL_ORDER = tuple(k.label for k in ALL_KINDS)


def _report_average(cell, label, interval, instruments, oos_mode, r2_mode):
    fitted = [
        cell[(i, label)]
        for i in instruments
        if (i, label) in cell and cell[(i, label)].status == "ok"
    ]
    stored = cell.get((AVERAGE_NAME, label))
    if fitted:
        beta = fmean(r.beta for r in fitted)
        r2_in = fmean(r.r2_in for r in fitted)
        r2_out = fmean(r.r2_out for r in fitted)
        if stored is not None and stored.status == "ok":
            for got, want in ((stored.beta, beta), (stored.r2_in, r2_in), (stored.r2_out, r2_out)):
                if not math.isclose(got, want, rel_tol=1e-9, abs_tol=1e-12):
                    raise IngestionError(
                        f"AVERAGE row for {label} at interval {interval}s "
                        "does not match its instrument rows",
                        code="report-mismatch",
                    )
            return stored
        return RegressRow(
            AVERAGE_NAME, label, interval, "ok", beta, r2_in, r2_out,
            sum(r.n_in for r in fitted), sum(r.n_out for r in fitted),
            oos_mode, r2_mode,
        )
    return stored  # may be None or a no-data row


def render_report(rows: list[RegressRow], fmt: str = "text") -> str:
    """Tables of in/out r-squared percentages, one per interval length.

    Column order is fixed; a cell that did not fit renders as nan; the
    Average row is recomputed and must agree with any stored AVERAGE row.
    """
    if fmt not in ("text", "tsv"):
        raise IngestionError(f"unknown report format {fmt!r}", code="unknown-mode")
    if not rows:
        raise IngestionError("no regression rows to report", code="empty-input")
    unknown = {r.kind for r in rows} - set(_LABEL_ORDER)
    if unknown:
        raise IngestionError(
            f"unknown indicator labels: {', '.join(sorted(unknown))}", code="schema-error"
        )
    modes = {(r.oos_mode, r.r2_mode) for r in rows}
    if len(modes) > 1:
        raise IngestionError("rows mix oos or r2 modes", code="schema-error")
    oos_mode, r2_mode = next(iter(modes))

    lines = [
        "price impact of order-flow imbalance",
        f"r2 shown in percent ({r2_mode}); out-of-sample: {oos_mode}",
    ]
    for interval in sorted({r.interval for r in rows}):
        sub = [r for r in rows if r.interval == interval]
        labels = [lab for lab in _LABEL_ORDER if any(r.kind == lab for r in sub)]
        instruments = sorted({r.instrument for r in sub if r.instrument != AVERAGE_NAME})
        cell = {(r.instrument, r.kind): r for r in sub}

        def fmt_cell(row, attr):
            if row is None or row.status != "ok":
                return "nan"
            value = getattr(row, attr)
            return "nan" if math.isnan(value) else f"{100.0 * value:.2f}"

        table = [["instrument"] + [f"{lab}_{side}" for lab in labels for side in ("in", "out")]]
        for instrument in instruments:
            line = [instrument]
            for lab in labels:
                row = cell.get((instrument, lab))
                line += [fmt_cell(row, "r2_in"), fmt_cell(row, "r2_out")]
            table.append(line)
        line = ["Average"]
        for lab in labels:
            avg = _report_average(cell, lab, interval, instruments, oos_mode, r2_mode)
            line += [fmt_cell(avg, "r2_in"), fmt_cell(avg, "r2_out")]
        table.append(line)

        lines.append("")
        lines.append(f"interval {interval}s")
        if fmt == "tsv":
            lines.extend("\t".join(row) for row in table)
        else:
            widths = [max(len(row[c]) for row in table) for c in range(len(table[0]))]
            for row in table:
                pieces = [row[0].ljust(widths[0])]
                pieces += [row[c].rjust(widths[c]) for c in range(1, len(row))]
                lines.append("  ".join(pieces).rstrip())
    return "\n".join(lines) + "\n"


def save_text(text: str, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise IngestionError(f"cannot write {path}: {exc}", code="io-error") from exc


# --- shared argument helpers --------------------------------------------------

def parse_kinds(text: str | None) -> tuple[IndicatorKind, ...] | None:
    """Comma list like 'ofi,log-gofi' into kinds; empty means None (all)."""
    if text is None or not text.strip():
        return None
    kinds = [IndicatorKind.from_text(p) for p in text.split(",") if p.strip()]
    if not kinds:
        return None
    return tuple(dict.fromkeys(kinds))


def parse_intervals(text: str | None) -> list[int] | None:
    """Comma list of interval lengths in seconds; empty means None."""
    if text is None or not text.strip():
        return None
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise IngestionError(
            f"bad interval list {text!r}", code="schema-error"
        ) from None
    if not values:
        return None
    return list(dict.fromkeys(values))


def exclusions_for(cfg: dict[str, str], config_path: str) -> set[tuple[str, str]] | None:
    """Load the exclusion file a config names, relative to the config."""
    name = cfg.get("exclusion_list")
    if not name:
        return None
    if not os.path.isabs(name):
        name = os.path.join(os.path.dirname(os.path.abspath(config_path)), name)
    return load_exclusion_list(name)


def max_gap_fraction_from(cfg: dict[str, str]) -> float:
    text = cfg.get("max_gap_fraction")
    if text is None:
        return DEFAULT_MAX_GAP_FRACTION
    try:
        value = float(text)
    except ValueError:
        raise IngestionError(
            f"bad max_gap_fraction {text!r}", code="schema-error"
        ) from None
    if not 0 <= value < 1:
        raise IngestionError(
            "max_gap_fraction must be in [0, 1)", code="invalid-config"
        )
    return value


def filter_days(
    days: list[SessionDay],
    spec: SessionSpec,
    max_gap_fraction: float = DEFAULT_MAX_GAP_FRACTION,
    exclusion_list: set[tuple[str, str]] | None = None,
) -> tuple[list[SessionDay], DayFilterReport]:
    return exclude_limit_days(days, spec, max_gap_fraction, exclusion_list)
