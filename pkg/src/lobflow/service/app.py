"""HTTP face of the toolkit: each endpoint wraps one pipeline flow.

Handled domain errors come back as 400 with the error code; anything
else is a genuine server fault.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, pipeline
from ..book import LobError, SessionSpec
from ..indicators import ALL_KINDS, IndicatorKind
from ..ingestion import (
    parse_exclusion_entries,
    parse_segments,
    parse_snapshots_text,
    render_snapshots_text,
)
from . import schemas


def _session_spec(model: schemas.SessionModel, interval: int) -> SessionSpec:
    return SessionSpec(
        segments=parse_segments(model.session),
        snapshot_period=model.snapshot_period,
        tick_size=model.tick_size,
        interval_length=interval,
    )


def _kinds(names: list[str] | None) -> tuple[IndicatorKind, ...]:
    if not names:
        return ALL_KINDS
    return tuple(dict.fromkeys(IndicatorKind.from_text(n) for n in names))


def _exclusions(report_list) -> list[schemas.ExclusionModel]:
    out = []
    for report in report_list:
        out.extend(
            schemas.ExclusionModel(
                instrument=d.instrument, date=d.date,
                reason=d.reason or "", detail=d.detail,
            )
            for d in report.excluded()
        )
    return out


def _opt(value: float) -> float | None:
    return None if math.isnan(value) else value


def create_app() -> FastAPI:
    app = FastAPI(
        title="lobflow",
        version=__version__,
        description="Order-flow imbalance indicators, price-impact "
        "regression, and a depth-capped order-book simulator.",
    )

    @app.exception_handler(LobError)
    async def _domain_error(request: Request, exc: LobError):
        return JSONResponse(status_code=400, content={"error": str(exc), "code": exc.code})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        cfg = {
            key: str(getattr(req, key))
            for key in ("depth_cap", "rate_limit", "rate_cancel", "rate_market",
                        "tick_size", "snapshot_period", "duration", "snapshot_depth",
                        "seed", "initial_mid", "initial_spread", "start_date",
                        "days", "session_start")
        }
        cfg["instruments"] = ",".join(req.instruments)
        config, framing = pipeline.sim_settings_from_config(cfg)
        days, stats = pipeline.simulate_days(config, framing)
        spec = SessionSpec(
            segments=((0, 86400),),
            snapshot_period=config.snapshot_period,
            tick_size=config.tick_size,
            interval_length=10 * config.snapshot_period,
        )
        return schemas.SimulateResponse(
            days=[
                schemas.DaySummary(
                    instrument=s.instrument, date=s.date, seed=s.seed,
                    n_snapshots=s.n_snapshots, events=s.events,
                    multi_tick_gaps=s.multi_tick_gaps,
                )
                for s in stats
            ],
            csv=render_snapshots_text(days, spec),
        )

    def _load_days(csv_text, session, max_gap_fraction, exclude):
        spec = _session_spec(session, 10 * session.snapshot_period)
        days, parse_report = parse_snapshots_text(csv_text, spec)
        kept, filter_report = pipeline.filter_days(
            days, spec, max_gap_fraction, parse_exclusion_entries(exclude) or None
        )
        return spec, kept, (parse_report, filter_report)

    @app.post("/indicators", response_model=schemas.IndicatorsResponse)
    def indicators(req: schemas.IndicatorsRequest):
        spec, kept, reports = _load_days(
            req.csv, req.session, req.max_gap_fraction, req.exclude
        )
        kinds = _kinds(req.kinds)
        table = pipeline.compute_table(kept, spec, kinds, req.intervals, req.gofi_reading)
        labels = table.header[5:]
        rows = [
            schemas.IndicatorRowModel(
                instrument=r[0], date=r[1], time=r[2], interval=r[3],
                mid_change=r[4], values=dict(zip(labels, r[5:])),
            )
            for r in table.rows
        ]
        return schemas.IndicatorsResponse(
            rows=rows,
            truncations={f"{lab}:{iv}": n for (lab, iv), n in table.truncations.items()},
            excluded=_exclusions(reports),
        )

    @app.post("/regression", response_model=schemas.RegressionResponse)
    def regression(req: schemas.RegressionRequest):
        spec, kept, reports = _load_days(
            req.csv, req.session, req.max_gap_fraction, req.exclude
        )
        table = pipeline.compute_table(
            kept, spec, _kinds(req.kinds), req.intervals, req.gofi_reading
        )
        rows = pipeline.regress_table(
            table, req.boundary_date,
            oos_mode=req.oos_mode, r2_mode=req.r2_mode,
        )
        return schemas.RegressionResponse(
            rows=[
                schemas.RegressRowModel(
                    instrument=r.instrument, kind=r.kind, interval=r.interval,
                    status=r.status, beta=_opt(r.beta), r2_in=_opt(r.r2_in),
                    r2_out=_opt(r.r2_out), n_in=r.n_in, n_out=r.n_out,
                    oos_mode=r.oos_mode, r2_mode=r.r2_mode,
                )
                for r in rows
            ],
            excluded=_exclusions(reports),
        )

    @app.post("/report", response_model=schemas.ReportResponse)
    def report(req: schemas.ReportRequest):
        rows = [
            pipeline.RegressRow(
                m.instrument, m.kind, m.interval, m.status,
                math.nan if m.beta is None else m.beta,
                math.nan if m.r2_in is None else m.r2_in,
                math.nan if m.r2_out is None else m.r2_out,
                m.n_in, m.n_out, m.oos_mode, m.r2_mode,
            )
            for m in req.rows
        ]
        return schemas.ReportResponse(report=pipeline.render_report(rows, req.format))

    return app
