"""Command line interface.

Subcommands: simulate, compute, regress, report, serve. Inputs are
key = value config files and snapshot CSV; outputs are CSV or text.
Exit status 0 on success, 1 on any handled error (message on stderr).
"""

from __future__ import annotations

import argparse
import sys

from . import pipeline
from .book import LobError, SessionSpec
from .indicators import READING_LEVELWISE, READING_SYMMETRIC
from .ingestion import (
    interval_lengths_from_config,
    load_config,
    parse_snapshots,
    session_spec_from_config,
    write_snapshots,
)
from .regression import OOS_FIXED_BETA, OOS_REFIT, R2_CENTERED, R2_UNCENTERED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lobflow",
        description="Order-flow imbalance toolkit: simulate order books, "
        "compute imbalance series, fit price-impact regressions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate synthetic snapshot days")
    sim.add_argument("--config", required=True, help="simulator config file")
    sim.add_argument("--output", required=True, help="snapshot CSV to write")
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")

    comp = sub.add_parser("compute", help="indicator series from a snapshot file")
    comp.add_argument("--config", required=True, help="session config file")
    comp.add_argument("--input", required=True, help="snapshot CSV to read")
    comp.add_argument("--output", required=True, help="indicator CSV to write")
    comp.add_argument("--kinds", default=None,
                      help="comma list from ofi,log-ofi,gofi,log-gofi (default all)")
    comp.add_argument("--interval", default=None,
                      help="comma list of interval lengths in seconds")
    comp.add_argument("--gofi-reading", choices=(READING_SYMMETRIC, READING_LEVELWISE),
                      default=READING_SYMMETRIC,
                      help="how generalized terms book a best-price move")

    reg = sub.add_parser("regress", help="fit price impact in and out of sample")
    reg.add_argument("--input", required=True, help="indicator CSV from compute")
    reg.add_argument("--output", required=True, help="results CSV to write")
    reg.add_argument("--config", default=None,
                     help="session config file, read for boundary_date only")
    reg.add_argument("--kinds", default=None,
                     help="comma list from ofi,log-ofi,gofi,log-gofi (default all)")
    reg.add_argument("--interval", default=None,
                     help="comma list of interval lengths in seconds")
    reg.add_argument("--boundary-date", default=None,
                     help="last in-sample date, yyyy-mm-dd (default from config)")
    reg.add_argument("--oos-mode", choices=(OOS_FIXED_BETA, OOS_REFIT),
                     default=OOS_FIXED_BETA,
                     help="reuse the in-sample slope or refit out of sample")
    reg.add_argument("--r2", choices=(R2_CENTERED, R2_UNCENTERED), default=R2_CENTERED,
                     help="r-squared convention")

    rep = sub.add_parser("report", help="render a results CSV as tables")
    rep.add_argument("--input", required=True, help="results CSV from regress")
    rep.add_argument("--output", default=None,
                     help="text report path; a .tsv twin is written beside it")

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    return parser


def _note_exclusions(reports, stream) -> None:
    for report in reports:
        for d in report.excluded():
            print(f"excluded {d.instrument} {d.date}: {d.reason} ({d.detail})", file=stream)


def _load_days(args, spec, cfg):
    days, parse_report = parse_snapshots(args.input, spec)
    kept, filter_report = pipeline.filter_days(
        days, spec,
        pipeline.max_gap_fraction_from(cfg),
        pipeline.exclusions_for(cfg, args.config),
    )
    _note_exclusions((parse_report, filter_report), sys.stderr)
    return kept


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    config, framing = pipeline.sim_settings_from_config(cfg, seed=args.seed)
    days, stats = pipeline.simulate_days(config, framing)
    # only the tick size matters when writing
    spec = SessionSpec(
        segments=((0, 86400),),
        snapshot_period=config.snapshot_period,
        tick_size=config.tick_size,
        interval_length=10 * config.snapshot_period,
    )
    write_snapshots(days, args.output, spec)
    total = sum(len(d.snapshots) for d in days)
    events = {"limit": 0, "cancel": 0, "market": 0, "events": 0}
    multi = 0
    for s in stats:
        multi += s.multi_tick_gaps
        for key in events:
            events[key] += s.events.get(key, 0)
    print(f"base seed {config.seed}: {len(days)} instrument-days, {total} snapshots")
    print(f"events: {events['events']} total "
          f"(limit {events['limit']}, cancel {events['cancel']}, market {events['market']})")
    print(f"snapshot gaps with multi-tick best moves: {multi}")
    for s in stats:
        print(f"  {s.instrument} {s.date}: seed {s.seed}, "
              f"{s.n_snapshots} snapshots, {s.events.get('events', 0)} events")
    print(f"wrote {total} snapshots to {args.output}")
    return 0


def _cmd_compute(args) -> int:
    cfg = load_config(args.config)
    spec = session_spec_from_config(cfg)
    kinds = pipeline.parse_kinds(args.kinds)
    intervals = pipeline.parse_intervals(args.interval) or interval_lengths_from_config(cfg)
    kept = _load_days(args, spec, cfg)
    table = pipeline.compute_table(kept, spec, kinds, intervals, args.gofi_reading)
    pipeline.write_csv(args.output, table.header, table.rows)
    if table.total_truncations():
        print(f"note: {table.total_truncations()} depth-truncated level sums",
              file=sys.stderr)
    print(f"wrote {len(table.rows)} interval rows to {args.output}")
    return 0


def _cmd_regress(args) -> int:
    boundary = args.boundary_date
    if boundary is None and args.config:
        boundary = load_config(args.config).get("boundary_date")
    table = pipeline.read_indicator_table(args.input)
    rows = pipeline.regress_table(
        table, boundary,
        kinds=pipeline.parse_kinds(args.kinds),
        intervals=pipeline.parse_intervals(args.interval),
        oos_mode=args.oos_mode, r2_mode=args.r2,
    )
    pipeline.write_results(rows, args.output)
    points = pipeline.plot_rows(rows)
    pipeline.write_csv(pipeline.plot_path(args.output), pipeline.PLOT_HEADER, points)
    flagged = sum(1 for r in rows if r.status != "ok")
    if flagged:
        print(f"note: {flagged} cells did not fit (see status column)", file=sys.stderr)
    print(f"wrote {len(rows)} result rows to {args.output}")
    print(f"wrote {len(points)} r2 points to {pipeline.plot_path(args.output)}")
    return 0


def _cmd_report(args) -> int:
    rows = pipeline.read_results(args.input)
    text = pipeline.render_report(rows, "text")
    if args.output:
        pipeline.save_text(text, args.output)
        twin = pipeline.report_tsv_path(args.output)
        pipeline.save_text(pipeline.render_report(rows, "tsv"), twin)
        print(f"wrote report to {args.output} and {twin}")
    else:
        print(text, end="")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "compute": _cmd_compute,
    "regress": _cmd_regress,
    "report": _cmd_report,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except LobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
