"""Report generation: schemas, gap rules, determinism, and the linter."""

import csv
from datetime import date
from pathlib import Path

import pytest

from hierflow.exceptions import ConfigError
from hierflow.report import (
    ALL_FAMILIES,
    FILE_NAMES,
    GAP,
    HEADERS,
    ReportConfig,
    generate_report,
    lint_report,
)
from hierflow.synth import SynthConfig, synth_generate

D = date


@pytest.fixture(scope="module")
def bundle():
    cfg = SynthConfig.from_dict(
        dict(
            n_rp=50, n_wgc=8, n_ad=2, n_groups=4,
            start="2013-01-01", end="2015-01-01",
            rates={
                "RP->RP": 8.0, "RP->WGC": 3.0, "WGC->RP": 2.0,
                "RP->AD": 0.3, "AD->RP": 0.3, "WGC->WGC": 0.5,
            },
            upward_bias={"RP->WGC": 0.7},
            origin_rates={"RP": 1.0, "WGC": 1.0, "AD": 0.1},
            seed=11,
        )
    )
    return synth_generate(cfg)


def read_csv_rows(path: Path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_full_report_files_and_headers(bundle, tmp_path):
    cfg = ReportConfig(threads=1)
    paths = generate_report(bundle, cfg, tmp_path)
    for family in ALL_FAMILIES:
        path = tmp_path / FILE_NAMES[family]
        assert path.exists()
        with open(path, newline="", encoding="utf-8") as fh:
            header = next(csv.reader(fh))
        assert header == HEADERS[family]
    assert (tmp_path / "run_metadata.json").exists()
    assert lint_report(tmp_path) == []


def test_reports_byte_identical_across_thread_counts(bundle, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    generate_report(bundle, ReportConfig(threads=1), a)
    generate_report(bundle, ReportConfig(threads=3), b)
    for family in ALL_FAMILIES:
        name = FILE_NAMES[family]
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    assert (a / "run_metadata.json").read_bytes() == (
        b / "run_metadata.json"
    ).read_bytes()


def test_metric_subset_writes_only_those_files(bundle, tmp_path):
    cfg = ReportConfig(metrics=("activity", "flows"))
    generate_report(bundle, cfg, tmp_path)
    assert (tmp_path / "activity_series.csv").exists()
    assert (tmp_path / "flows.csv").exists()
    assert not (tmp_path / "motifs.csv").exists()


def test_refuses_role_metrics_before_validity_horizon(bundle, tmp_path):
    cfg = ReportConfig(from_date=D(2011, 1, 1), to_date=D(2013, 1, 1))
    with pytest.raises(ConfigError, match="role data is valid"):
        generate_report(bundle, cfg, tmp_path)


def test_activity_alone_allowed_before_horizon(bundle, tmp_path):
    cfg = ReportConfig(
        from_date=D(2011, 1, 1), to_date=D(2014, 1, 1),
        metrics=("activity", "lifecycle"),
    )
    generate_report(bundle, cfg, tmp_path)
    assert (tmp_path / "activity_series.csv").exists()


def test_missing_roles_is_explicit_error(bundle, tmp_path):
    from hierflow.ingest import DatasetBundle

    stripped = DatasetBundle(events=bundle.events, origins=bundle.origins)
    with pytest.raises(ConfigError, match="roles"):
        generate_report(stripped, ReportConfig(metrics=("flows",)), tmp_path)


def test_gap_rules_in_taxonomy(bundle, tmp_path):
    generate_report(bundle, ReportConfig(metrics=("taxonomy",)), tmp_path)
    rows = read_csv_rows(tmp_path / FILE_NAMES["taxonomy"])
    assert rows, "taxonomy should not be empty"
    for row in rows:
        if int(row["n"]) < 2:
            assert row["value"] == GAP

    # AD rows appear only on request
    classes = {row["role_class"] for row in rows}
    assert classes == {"RP", "WGC"}
    generate_report(
        bundle, ReportConfig(metrics=("taxonomy",), include_ad_taxonomy=True),
        tmp_path / "ad",
    )
    rows = read_csv_rows(tmp_path / "ad" / FILE_NAMES["taxonomy"])
    assert {row["role_class"] for row in rows} == {"RP", "WGC", "AD"}


def test_wg_series_truncation_gap(bundle, tmp_path):
    cfg = ReportConfig(metrics=("wg_series",), wg_truncation=D(2014, 6, 1))
    generate_report(bundle, cfg, tmp_path)
    rows = read_csv_rows(tmp_path / FILE_NAMES["wg_series"])
    past = [r for r in rows if r["date"] >= "2014-06-01"]
    assert past and all(r["wg_count_list_activity"] == GAP for r in past)
    assert all(r["wgcs_per_wg_list_activity"] == GAP for r in past)
    assert lint_report(tmp_path) == []


def test_linter_flags_fabricated_zero(tmp_path):
    path = tmp_path / FILE_NAMES["flows"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADERS["flows"])
        writer.writerow(["2014-01-01", "2015-01-01", "RP->WGC", "0", "0", "0"])
    problems = lint_report(tmp_path)
    assert problems and "not a gap" in problems[0]


def test_linter_flags_bad_proportion_sum(tmp_path):
    path = tmp_path / FILE_NAMES["proportions"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADERS["proportions"])
        writer.writerow(["2014-01-01", "2015-01-01", "population", "RP", "0.6"])
        writer.writerow(["2014-01-01", "2015-01-01", "population", "WGC", "0.6"])
    problems = lint_report(tmp_path)
    assert problems and "sum" in problems[0]
