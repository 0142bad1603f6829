"""Request and response bodies for the HTTP service.

Snapshot data travels as CSV text in the same format the files use, so
the service and the command line stay interchangeable.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class SessionModel(BaseModel):
    """Session grid: segments as 'HH:MM:SS-HH:MM:SS' joined by commas."""

    session: str = "09:30:00-11:30:00,13:00:00-14:57:00"
    snapshot_period: int = 3
    tick_size: float = 0.01


class SimulateRequest(BaseModel):
    depth_cap: int = 20
    rate_limit: float = 5.0
    rate_cancel: float = 1.0
    rate_market: float = 3.0
    tick_size: float = 0.01
    snapshot_period: int = 3
    duration: int = 30000
    snapshot_depth: int = 10
    seed: int = 1001
    initial_mid: int = 3000
    initial_spread: int = 2
    instruments: list[str] = Field(default_factory=lambda: ["SIM001"])
    start_date: str = "2024-01-02"
    days: int = 1
    session_start: str = "09:30:00"


class DaySummary(BaseModel):
    instrument: str
    date: str
    seed: int
    n_snapshots: int
    events: dict[str, int]
    multi_tick_gaps: int


class SimulateResponse(BaseModel):
    days: list[DaySummary]
    csv: str


class ExclusionModel(BaseModel):
    instrument: str
    date: str
    reason: str
    detail: str = ""


class IndicatorsRequest(BaseModel):
    csv: str
    session: SessionModel = Field(default_factory=SessionModel)
    kinds: list[str] | None = None
    intervals: list[int] = Field(default_factory=lambda: [30])
    gofi_reading: str = "symmetric"
    max_gap_fraction: float = 0.05
    exclude: list[str] = Field(default_factory=list)  # "instrument,date" entries


class IndicatorRowModel(BaseModel):
    instrument: str
    date: str
    time: str
    interval: int
    mid_change: float
    values: dict[str, float]


class IndicatorsResponse(BaseModel):
    rows: list[IndicatorRowModel]
    truncations: dict[str, int]  # "label:interval" -> truncated sums
    excluded: list[ExclusionModel]


class RegressionRequest(BaseModel):
    csv: str
    boundary_date: str
    session: SessionModel = Field(default_factory=SessionModel)
    kinds: list[str] | None = None
    intervals: list[int] = Field(default_factory=lambda: [30])
    gofi_reading: str = "symmetric"
    oos_mode: str = "fixed-beta"
    r2_mode: str = "centered"
    max_gap_fraction: float = 0.05
    exclude: list[str] = Field(default_factory=list)


class RegressRowModel(BaseModel):
    instrument: str
    kind: str
    interval: int
    status: str
    beta: float | None
    r2_in: float | None
    r2_out: float | None
    n_in: int
    n_out: int
    oos_mode: str
    r2_mode: str


class RegressionResponse(BaseModel):
    rows: list[RegressRowModel]
    excluded: list[ExclusionModel]


class ReportRequest(BaseModel):
    rows: list[RegressRowModel]
    format: str = "text"


class ReportResponse(BaseModel):
    report: str


class HealthResponse(BaseModel):
    status: str
    version: str
