"""Pipeline stages and the command line driving them end to end."""

import math

import pytest

from lobflow import cli, pipeline
from lobflow.book import SessionSpec
from lobflow.indicators import IndicatorKind
from lobflow.ingestion import IngestionError, seconds_to_clock
from lobflow.pipeline import (
    AVERAGE_NAME,
    PLOT_HEADER,
    RESULTS_HEADER,
    TABLE_KEY_COLUMNS,
    ComputeTable,
    RegressRow,
    SimFraming,
    compute_table,
    derived_seed,
    parse_intervals,
    parse_kinds,
    plot_path,
    plot_rows,
    read_indicator_table,
    read_results,
    regress_table,
    render_report,
    report_tsv_path,
    sim_settings_from_config,
    simulate_days,
    write_csv,
    write_results,
)
from lobflow.regression import OOS_FIXED_BETA, OOS_REFIT, R2_CENTERED
from lobflow.simulator import SimConfig

from builders import snap


class TestSimSettings:
    def test_fields_and_framing(self):
        cfg = {"depth_cap": "10", "rate_limit": "4", "seed": "5",
               "instruments": "A , B", "days": "2",
               "session_start": "10:00:00", "start_date": "2024-03-01"}
        config, framing = sim_settings_from_config(cfg)
        assert config.depth_cap == 10
        assert config.rate_limit == 4.0
        assert config.seed == 5
        assert framing == SimFraming(("A", "B"), "2024-03-01", 2, 36000)

    def test_defaults(self):
        config, framing = sim_settings_from_config({})
        assert config == SimConfig()
        assert framing == SimFraming(("SIM001",), "2024-01-02", 1, 34200)

    def test_seed_override(self):
        config, _ = sim_settings_from_config({"seed": "5"}, seed=99)
        assert config.seed == 99

    def test_bad_values(self):
        for cfg in ({"depth_cap": "x"}, {"days": "two"}, {"session_start": "25:00:00"}):
            with pytest.raises(IngestionError) as e:
                sim_settings_from_config(cfg)
            assert e.value.code == "schema-error"

    def test_framing_validation(self):
        with pytest.raises(IngestionError):
            SimFraming(instruments=())
        with pytest.raises(IngestionError):
            SimFraming(instruments=("A", "A"))
        with pytest.raises(IngestionError):
            SimFraming(days=0)
        with pytest.raises(IngestionError):
            SimFraming(start_date="Jan 2")
        with pytest.raises(IngestionError):
            SimFraming(session_start=90000)


class TestDerivedSeed:
    def test_deterministic_and_distinct(self):
        grid = {(i, d): derived_seed(1001, i, d) for i in range(3) for d in range(4)}
        assert grid == {(i, d): derived_seed(1001, i, d) for i in range(3) for d in range(4)}
        assert len(set(grid.values())) == len(grid)
        assert all(isinstance(s, int) for s in grid.values())


class TestSimulateDays:
    def test_grid_shape_and_shift(self):
        config = SimConfig(duration=300, seed=11)
        framing = SimFraming(("A", "B"), "2024-01-02", 2, 34200)
        days, stats = simulate_days(config, framing)
        assert [(d.instrument, d.date) for d in days] == [
            ("A", "2024-01-02"), ("A", "2024-01-03"),
            ("B", "2024-01-02"), ("B", "2024-01-03"),
        ]
        assert all(d.snapshots[0].timestamp_ms == 34200 * 1000 for d in days)
        assert [s.seed for s in stats] == [
            derived_seed(11, i, d) for i in range(2) for d in range(2)
        ]
        assert all(s.n_snapshots == len(day.snapshots) for s, day in zip(stats, days))
        assert all(set(s.events) >= {"limit", "cancel", "market", "events"} for s in stats)

    def test_days_differ(self):
        config = SimConfig(duration=300, seed=11)
        days, _ = simulate_days(config, SimFraming(("A",), "2024-01-02", 2, 34200))
        a = [(s.timestamp_ms - 0, s.bids, s.asks) for s in days[0].snapshots]
        b = [(s.timestamp_ms - 86400, s.bids, s.asks) for s in days[1].snapshots]
        assert a != b


def _flat_day(inst, date, n=21):
    snaps = [
        snap(3000 * i, [(3000, 5), (2999, 6)], [(3002, 7), (3003, 8)], depth=2)
        for i in range(n)
    ]
    return pipeline.SessionDay(inst, date, tuple(snaps))


FLAT_SPEC = SessionSpec(segments=((0, 63),), snapshot_period=3,
                        tick_size=0.01, interval_length=30)


class TestComputeTable:
    def test_structure(self):
        table = compute_table([_flat_day("A", "2024-01-02")], FLAT_SPEC,
                              intervals=[30, 60])
        assert table.header == TABLE_KEY_COLUMNS + ("OFI", "GOFI", "log-OFI", "log-GOFI")
        assert [(r[3], r[2]) for r in table.rows] == [
            (30, "00:00:30"), (30, "00:01:00"), (60, "00:01:00"),
        ]
        first = table.rows[0]
        assert first[0] == "A" and first[1] == "2024-01-02"
        assert first[4] == 0.0  # constant book
        assert all(v == 0.0 for v in first[5:])

    def test_kind_subset_and_dedup(self):
        kinds = (IndicatorKind.GOFI, IndicatorKind.GOFI, IndicatorKind.OFI)
        table = compute_table([_flat_day("A", "2024-01-02")], FLAT_SPEC, kinds=kinds)
        assert table.header == TABLE_KEY_COLUMNS + ("GOFI", "OFI")

    def test_rows_sorted_by_instrument_date(self):
        days = [_flat_day("B", "2024-01-02"), _flat_day("A", "2024-01-03"),
                _flat_day("A", "2024-01-02")]
        table = compute_table(days, FLAT_SPEC)
        seen = [(r[0], r[1]) for r in table.rows]
        assert seen == sorted(seen)

    def test_empty_input(self):
        with pytest.raises(IngestionError) as e:
            compute_table([], FLAT_SPEC)
        assert e.value.code == "empty-input"

    def test_truncation_accounting_keys(self):
        table = compute_table([_flat_day("A", "2024-01-02")], FLAT_SPEC,
                              intervals=[30, 60])
        assert set(table.truncations) == {
            (k.label, n) for k in pipeline.ALL_KINDS for n in (30, 60)
        }
        assert table.total_truncations() == sum(table.truncations.values())


class TestIndicatorTableIO:
    def test_round_trip(self, tmp_path):
        table = compute_table([_flat_day("A", "2024-01-02")], FLAT_SPEC,
                              intervals=[30, 60])
        path = str(tmp_path / "ind.csv")
        write_csv(path, table.header, table.rows)
        back = read_indicator_table(path)
        assert back.header == table.header
        assert back.rows == table.rows

    def test_header_errors(self, tmp_path):
        path = tmp_path / "bad.csv"
        cases = [
            "",  # no header at all
            "instrument,date,interval,mid_change,OFI\n",  # missing time column
            "instrument,date,time,interval,mid_change,XFI\n",  # unknown label
            "instrument,date,time,interval,mid_change,OFI,OFI\n",  # duplicate
            "instrument,date,time,interval,mid_change\n",  # no indicator columns
        ]
        for text in cases:
            path.write_text(text, encoding="utf-8")
            with pytest.raises(IngestionError) as e:
                read_indicator_table(str(path))
            assert e.value.code == "schema-error"

    def test_row_errors(self, tmp_path):
        path = tmp_path / "bad.csv"
        head = ",".join(TABLE_KEY_COLUMNS + ("OFI",)) + "\n"
        path.write_text(head + "A,2024-01-02,09:30:30,30\n", encoding="utf-8")
        with pytest.raises(IngestionError):
            read_indicator_table(str(path))
        path.write_text(head + "A,2024-01-02,09:30:30,30,zero,1.5\n", encoding="utf-8")
        with pytest.raises(IngestionError) as e:
            read_indicator_table(str(path))
        assert "row 2" in str(e.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestionError) as e:
            read_indicator_table(str(tmp_path / "nope.csv"))
        assert e.value.code == "io-error"


def _synthetic_table():
    """A fits exactly with slope 0.5 (OFI) and 0.25 (GOFI); B's OFI is all zero."""
    rows = []
    for date, xs in (("2024-01-02", (1.0, 2.0, 3.0)), ("2024-01-05", (4.0, 5.0, 6.0))):
        for i, x in enumerate(xs):
            t = seconds_to_clock(34230 + 30 * i)
            rows.append(["A", date, t, 30, 0.5 * x, x, 2.0 * x])
            rows.append(["B", date, t, 30, 0.5 * x, 0.0, 2.0 * x])
    return ComputeTable(TABLE_KEY_COLUMNS + ("OFI", "GOFI"), rows, {})


class TestRegressTable:
    def test_fits_flags_and_average(self):
        rows = regress_table(_synthetic_table(), "2024-01-02")
        assert [(r.instrument, r.kind) for r in rows] == [
            ("A", "OFI"), ("B", "OFI"), (AVERAGE_NAME, "OFI"),
            ("A", "GOFI"), ("B", "GOFI"), (AVERAGE_NAME, "GOFI"),
        ]
        a_ofi, b_ofi, avg_ofi, a_gofi, b_gofi, avg_gofi = rows
        assert a_ofi.status == "ok"
        assert a_ofi.beta == pytest.approx(0.5, rel=1e-12)
        assert a_ofi.r2_in == pytest.approx(1.0, rel=1e-12)
        assert a_ofi.n_in == 3 and a_ofi.n_out == 3
        assert b_ofi.status == "degenerate-regressor"
        assert math.isnan(b_ofi.beta) and math.isnan(b_ofi.r2_out)
        assert avg_ofi.status == "ok"
        assert avg_ofi.beta == pytest.approx(0.5)  # average of the one fitted cell
        assert avg_ofi.n_in == 3
        assert b_gofi.beta == pytest.approx(0.25, rel=1e-12)
        assert avg_gofi.beta == pytest.approx(0.25, rel=1e-12)
        assert avg_gofi.n_in == 6

    def test_average_no_data_when_nothing_fits(self):
        table = _synthetic_table()
        table.rows = [r for r in table.rows if r[0] == "B"]
        rows = regress_table(table, "2024-01-02", kinds=(IndicatorKind.OFI,))
        assert [r.status for r in rows] == ["degenerate-regressor", "no-data"]
        assert rows[1].instrument == AVERAGE_NAME

    def test_boundary_required(self):
        for boundary in (None, ""):
            with pytest.raises(IngestionError) as e:
                regress_table(_synthetic_table(), boundary)
            assert e.value.code == "invalid-config"

    def test_empty_partitions(self):
        for boundary in ("2024-01-05", "2024-01-01"):
            with pytest.raises(IngestionError) as e:
                regress_table(_synthetic_table(), boundary)
            assert e.value.code == "empty-partition"

    def test_empty_table(self):
        with pytest.raises(IngestionError) as e:
            regress_table(ComputeTable(TABLE_KEY_COLUMNS + ("OFI",), [], {}), "2024-01-02")
        assert e.value.code == "empty-input"

    def test_kind_filter(self):
        rows = regress_table(_synthetic_table(), "2024-01-02",
                             kinds=(IndicatorKind.GOFI,))
        assert {r.kind for r in rows} == {"GOFI"}
        with pytest.raises(IngestionError) as e:
            regress_table(_synthetic_table(), "2024-01-02",
                          kinds=(IndicatorKind.LOG_OFI,))
        assert e.value.code == "kind-mismatch"

    def test_interval_filter(self):
        rows = regress_table(_synthetic_table(), "2024-01-02", intervals=[30])
        assert {r.interval for r in rows} == {30}
        with pytest.raises(IngestionError) as e:
            regress_table(_synthetic_table(), "2024-01-02", intervals=[60])
        assert e.value.code == "kind-mismatch"

    def test_modes_recorded(self):
        rows = regress_table(_synthetic_table(), "2024-01-02",
                             oos_mode=OOS_REFIT, r2_mode=R2_CENTERED)
        assert all(r.oos_mode == OOS_REFIT and r.r2_mode == R2_CENTERED for r in rows)


class TestResultsIO:
    def test_round_trip(self, tmp_path):
        rows = [r for r in regress_table(_synthetic_table(), "2024-01-02")
                if r.status == "ok"]
        path = str(tmp_path / "res.csv")
        write_results(rows, path)
        assert read_results(path) == rows

    def test_bad_header(self, tmp_path):
        path = tmp_path / "res.csv"
        path.write_text("instrument,kind\n", encoding="utf-8")
        with pytest.raises(IngestionError) as e:
            read_results(str(path))
        assert e.value.code == "schema-error"

    def test_plot_rows_skip_average_and_failures(self):
        rows = regress_table(_synthetic_table(), "2024-01-02")
        points = plot_rows(rows)
        assert [p[0:2] for p in points] == [["A", "OFI"], ["A", "GOFI"], ["B", "GOFI"]]
        assert PLOT_HEADER == ("instrument", "kind", "interval", "r2_in", "r2_out")

    def test_companion_paths(self):
        assert plot_path("out/results.csv") == "out/results_plot.csv"
        assert plot_path("results") == "results_plot.csv"
        assert report_tsv_path("report.txt") == "report.tsv"
        assert report_tsv_path("report") == "report.tsv"


def _row(inst, kind, r2i, r2o, status="ok", beta=1.0, interval=30,
         oos=OOS_FIXED_BETA, r2m=R2_CENTERED):
    return RegressRow(inst, kind, interval, status, beta, r2i, r2o, 10, 5, oos, r2m)


class TestRenderReport:
    def test_text_layout(self):
        rows = [
            _row("B", "GOFI", 0.87, 0.86), _row("A", "OFI", 0.95, 0.90),
            _row("A", "GOFI", 0.97, 0.96), _row("B", "OFI", 0.85, 0.80),
        ]
        text = render_report(rows)
        lines = text.splitlines()
        assert lines[0] == "price impact of order-flow imbalance"
        assert "centered" in lines[1] and "fixed-beta" in lines[1]
        assert "interval 30s" in text
        header = next(line for line in lines if line.startswith("instrument"))
        assert header.split() == ["instrument", "OFI_in", "OFI_out", "GOFI_in", "GOFI_out"]
        assert "95.00" in text and "80.00" in text
        average = lines[-1]
        assert average.startswith("Average")
        assert "90.00" in average  # mean of 0.95 and 0.85, in percent
        assert text.endswith("\n")

    def test_label_order_fixed(self):
        rows = [_row("A", lab, 0.5, 0.4)
                for lab in ("log-GOFI", "GOFI", "log-OFI", "OFI")]
        text = render_report(rows)
        header = next(line for line in text.splitlines() if line.startswith("instrument"))
        assert header.split() == [
            "instrument", "OFI_in", "OFI_out", "GOFI_in", "GOFI_out",
            "log-OFI_in", "log-OFI_out", "log-GOFI_in", "log-GOFI_out",
        ]

    def test_failed_cell_is_nan(self):
        rows = [_row("A", "OFI", 0.95, 0.90),
                _row("B", "OFI", math.nan, math.nan, status="degenerate-regressor")]
        text = render_report(rows)
        b_line = next(line for line in text.splitlines() if line.startswith("B"))
        assert b_line.split()[1:] == ["nan", "nan"]
        average = text.splitlines()[-1]
        assert "95.00" in average  # average covers only the fitted cell

    def test_stored_average_checked(self):
        rows = [_row("A", "OFI", 0.95, 0.90), _row("B", "OFI", 0.85, 0.80),
                _row(AVERAGE_NAME, "OFI", 0.90, 0.85)]
        assert "90.00" in render_report(rows)
        bad = rows[:2] + [_row(AVERAGE_NAME, "OFI", 0.80, 0.85)]
        with pytest.raises(IngestionError) as e:
            render_report(bad)
        assert e.value.code == "report-mismatch"

    def test_interval_sections_sorted(self):
        rows = [_row("A", "OFI", 0.5, 0.4, interval=300),
                _row("A", "OFI", 0.6, 0.5, interval=30)]
        text = render_report(rows)
        assert text.index("interval 30s") < text.index("interval 300s")

    def test_tsv_format(self):
        rows = [_row("A", "OFI", 0.95, 0.90)]
        tsv = render_report(rows, "tsv")
        assert "instrument\tOFI_in\tOFI_out" in tsv
        assert "A\t95.00\t90.00" in tsv

    def test_input_validation(self):
        with pytest.raises(IngestionError) as e:
            render_report([])
        assert e.value.code == "empty-input"
        with pytest.raises(IngestionError) as e:
            render_report([_row("A", "XFI", 0.5, 0.4)])
        assert e.value.code == "schema-error"
        mixed = [_row("A", "OFI", 0.5, 0.4), _row("B", "OFI", 0.5, 0.4, oos=OOS_REFIT)]
        with pytest.raises(IngestionError) as e:
            render_report(mixed)
        assert e.value.code == "schema-error"
        with pytest.raises(IngestionError) as e:
            render_report([_row("A", "OFI", 0.5, 0.4)], fmt="html")
        assert e.value.code == "unknown-mode"


class TestArgHelpers:
    def test_parse_kinds(self):
        assert parse_kinds(None) is None and parse_kinds(" ") is None
        assert parse_kinds("ofi,OFI,log-gofi") == (
            IndicatorKind.OFI, IndicatorKind.LOG_GOFI,
        )

    def test_parse_intervals(self):
        assert parse_intervals(None) is None and parse_intervals("") is None
        assert parse_intervals("30, 60,30") == [30, 60]
        with pytest.raises(IngestionError):
            parse_intervals("30,fast")

    def test_max_gap_fraction_from(self):
        assert pipeline.max_gap_fraction_from({}) == 0.05
        assert pipeline.max_gap_fraction_from({"max_gap_fraction": "0.5"}) == 0.5
        with pytest.raises(IngestionError):
            pipeline.max_gap_fraction_from({"max_gap_fraction": "1.5"})
        with pytest.raises(IngestionError):
            pipeline.max_gap_fraction_from({"max_gap_fraction": "lots"})

    def test_exclusions_for(self, tmp_path):
        assert pipeline.exclusions_for({}, "any.cfg") is None
        listing = tmp_path / "skip.txt"
        listing.write_text("SIMA,2024-01-02\n", encoding="utf-8")
        cfg_path = tmp_path / "session.cfg"
        found = pipeline.exclusions_for({"exclusion_list": "skip.txt"}, str(cfg_path))
        assert found == {("SIMA", "2024-01-02")}


# --- command line, end to end -------------------------------------------------

def _write_cfg(path, **keys):
    path.write_text(
        "".join(f"{k} = {v}\n" for k, v in keys.items()), encoding="utf-8"
    )


def _run_chain(base, seed=None):
    base.mkdir(exist_ok=True)
    sim_cfg = base / "sim.cfg"
    _write_cfg(sim_cfg, depth_cap=10, rate_limit=5, rate_cancel=1, rate_market=3,
               snapshot_period=3, tick_size=0.01, duration=600, seed=7,
               instruments="SIMA,SIMB", days=2, start_date="2024-01-02",
               session_start="09:30:00")
    ses_cfg = base / "session.cfg"
    _write_cfg(ses_cfg, session="09:30:00-09:40:00", snapshot_period=3,
               tick_size=0.01, interval_lengths="30,60",
               boundary_date="2024-01-02")
    paths = {
        "sim_cfg": sim_cfg, "ses_cfg": ses_cfg,
        "snapshots": base / "snapshots.csv",
        "indicators": base / "indicators.csv",
        "results": base / "results.csv",
        "report": base / "report.txt",
    }
    argv = ["simulate", "--config", str(sim_cfg), "--output", str(paths["snapshots"])]
    if seed is not None:
        argv += ["--seed", str(seed)]
    assert cli.main(argv) == 0
    assert cli.main(["compute", "--config", str(ses_cfg),
                     "--input", str(paths["snapshots"]),
                     "--output", str(paths["indicators"])]) == 0
    assert cli.main(["regress", "--input", str(paths["indicators"]),
                     "--output", str(paths["results"]),
                     "--config", str(ses_cfg)]) == 0
    assert cli.main(["report", "--input", str(paths["results"]),
                     "--output", str(paths["report"])]) == 0
    return paths


@pytest.fixture(scope="module")
def chain(tmp_path_factory):
    return _run_chain(tmp_path_factory.mktemp("chain"))


class TestCliChain:
    def test_snapshot_file(self, chain):
        lines = chain["snapshots"].read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("instrument,date,time,bp1,bq1,ap1,aq1")
        assert len(lines) == 1 + 4 * 200  # 2 instruments x 2 days x 200 snapshots
        assert lines[1].split(",")[:3] == ["SIMA", "2024-01-02", "09:30:00"]

    def test_indicator_file(self, chain):
        table = read_indicator_table(str(chain["indicators"]))
        assert table.header == TABLE_KEY_COLUMNS + ("OFI", "GOFI", "log-OFI", "log-GOFI")
        # per day: 19 complete 30s intervals and 9 complete 60s intervals
        assert len(table.rows) == 4 * (19 + 9)

    def test_results_file(self, chain):
        rows = read_results(str(chain["results"]))
        assert len(rows) == 3 * 4 * 2  # SIMA, SIMB, AVERAGE x kinds x intervals
        assert all(r.status == "ok" for r in rows)
        assert {r.instrument for r in rows} == {"SIMA", "SIMB", AVERAGE_NAME}
        assert all(r.n_in > 0 and r.n_out > 0 for r in rows)

    def test_plot_file(self, chain):
        plot = plot_path(str(chain["results"]))
        lines = open(plot, encoding="utf-8").read().splitlines()
        assert lines[0] == ",".join(PLOT_HEADER)
        assert len(lines) == 1 + 2 * 4 * 2  # instruments x kinds x intervals

    def test_report_files(self, chain):
        text = chain["report"].read_text(encoding="utf-8")
        assert "interval 30s" in text and "interval 60s" in text
        assert "OFI_in" in text and "Average" in text
        twin = report_tsv_path(str(chain["report"]))
        tsv = open(twin, encoding="utf-8").read()
        assert "\t" in tsv and tsv.splitlines()[0] == text.splitlines()[0]

    def test_boundary_flag_matches_config(self, chain, tmp_path):
        out = tmp_path / "res2.csv"
        assert cli.main(["regress", "--input", str(chain["indicators"]),
                         "--output", str(out),
                         "--boundary-date", "2024-01-02"]) == 0
        assert out.read_bytes() == chain["results"].read_bytes()

    def test_two_runs_byte_identical(self, chain, tmp_path):
        again = _run_chain(tmp_path / "again")
        for name in ("snapshots", "indicators", "results", "report"):
            assert again[name].read_bytes() == chain[name].read_bytes()
        assert open(plot_path(str(again["results"])), "rb").read() == \
               open(plot_path(str(chain["results"])), "rb").read()
        assert open(report_tsv_path(str(again["report"])), "rb").read() == \
               open(report_tsv_path(str(chain["report"])), "rb").read()

    def test_seed_override_changes_output(self, chain, tmp_path):
        other = _run_chain(tmp_path / "seeded", seed=99)
        assert other["snapshots"].read_bytes() != chain["snapshots"].read_bytes()

    def test_simulate_stdout(self, chain, tmp_path, capsys):
        out = tmp_path / "s.csv"
        assert cli.main(["simulate", "--config", str(chain["sim_cfg"]),
                         "--output", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "base seed 7: 4 instrument-days, 800 snapshots" in printed
        assert "events:" in printed and "seed" in printed
        assert f"wrote 800 snapshots to {out}" in printed

    def test_report_to_stdout(self, chain, capsys):
        assert cli.main(["report", "--input", str(chain["results"])]) == 0
        printed = capsys.readouterr().out
        assert printed.startswith("price impact of order-flow imbalance")
        assert printed == render_report(read_results(str(chain["results"])))

    def test_compute_kind_and_interval_flags(self, chain, tmp_path, capsys):
        out = tmp_path / "ofi.csv"
        assert cli.main(["compute", "--config", str(chain["ses_cfg"]),
                         "--input", str(chain["snapshots"]),
                         "--output", str(out),
                         "--kinds", "ofi", "--interval", "60"]) == 0
        table = read_indicator_table(str(out))
        assert table.header == TABLE_KEY_COLUMNS + ("OFI",)
        assert {r[3] for r in table.rows} == {60}


class TestCliErrors:
    def test_bad_sim_config(self, tmp_path, capsys):
        cfg = tmp_path / "sim.cfg"
        _write_cfg(cfg, rate_limit=5, rate_cancel=6)
        code = cli.main(["simulate", "--config", str(cfg),
                         "--output", str(tmp_path / "x.csv")])
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_regress_without_boundary(self, chain, tmp_path, capsys):
        code = cli.main(["regress", "--input", str(chain["indicators"]),
                         "--output", str(tmp_path / "r.csv")])
        assert code == 1
        assert "boundary" in capsys.readouterr().err

    def test_unknown_kind(self, chain, tmp_path, capsys):
        code = cli.main(["compute", "--config", str(chain["ses_cfg"]),
                         "--input", str(chain["snapshots"]),
                         "--output", str(tmp_path / "x.csv"),
                         "--kinds", "bogus"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_report_missing_input(self, tmp_path, capsys):
        code = cli.main(["report", "--input", str(tmp_path / "nope.csv")])
        assert code == 1
        assert "error:" in capsys.readouterr().err
