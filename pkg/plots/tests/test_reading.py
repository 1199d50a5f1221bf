"""Parsing tests against real tool output and hand-broken files."""

import json

import numpy as np
import pytest

from cloudplots import (
    DataError,
    read_analytic_csv,
    read_beta_report,
    read_cloud_csv,
    read_raw_points_csv,
    read_table1_report,
    sibling_beta_path,
)

CLOUD_HEADER = "bin_center,f_min,f_max,f_mean,f_std,count,low_confidence"


class TestCloudCsv:

    def test_real_file_parses_column_for_column(self, cli_fixtures):
        table = read_cloud_csv(cli_fixtures["fc"])
        size = table.center.size
        assert size > 0
        for arr in (table.f_min, table.f_max, table.f_mean, table.f_std):
            assert arr.shape == (size,)
            assert np.isfinite(arr).all()
        assert table.count.dtype == np.int64
        assert (table.count > 0).all()
        assert table.low_confidence.dtype == bool
        assert int(table.count.sum()) == 2 ** 10

    def test_predicted_column_read_when_present(self, cli_fixtures):
        table = read_cloud_csv(cli_fixtures["fc"])
        assert table.predicted is not None
        assert not np.isnan(table.predicted).any()
        plain = read_cloud_csv(cli_fixtures["limit"])
        assert plain.predicted is None

    def test_values_taken_verbatim(self, tmp_path):
        path = tmp_path / "tiny_cloud.csv"
        path.write_text(CLOUD_HEADER + "\n"
                        "0.201,0.1,0.30000000000000004,0.2,0.05,7,0\n"
                        "0.203,0.15,0.25,0.2,0.0,3,1\n")
        table = read_cloud_csv(path)
        assert table.center.tolist() == [0.201, 0.203]
        assert table.f_max[0] == 0.30000000000000004
        assert table.count.tolist() == [7, 3]
        assert table.low_confidence.tolist() == [False, True]

    def test_missing_columns_reported_by_name(self, tmp_path):
        path = tmp_path / "broken.csv"
        path.write_text("bin_center,f_min,f_max,count,low_confidence\n"
                        "0.5,0.4,0.6,3,0\n")
        with pytest.raises(DataError, match="f_mean, f_std"):
            read_cloud_csv(path)

    def test_header_only_file_refused(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(CLOUD_HEADER + "\n")
        with pytest.raises(DataError, match="no data rows"):
            read_cloud_csv(path)

    def test_non_numeric_cell_reported_with_line(self, tmp_path):
        path = tmp_path / "bad_cell.csv"
        path.write_text(CLOUD_HEADER + "\n0.201,0.1,0.3,oops,0.05,7,0\n")
        with pytest.raises(DataError, match="line 2.*f_mean"):
            read_cloud_csv(path)


class TestRawPointsCsv:

    def test_real_file_parses(self, cli_fixtures):
        parent, offspring = read_raw_points_csv(cli_fixtures["fc_raw"])
        assert parent.shape == offspring.shape
        assert parent.size == 2 ** 10
        assert ((parent >= 0.0) & (parent <= 1.0)).all()

    def test_missing_column_reported(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("parent_fitness,fitness\n0.5,0.6\n")
        with pytest.raises(DataError, match="offspring_fitness"):
            read_raw_points_csv(path)

    def test_empty_file_refused(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("parent_fitness,offspring_fitness\n")
        with pytest.raises(DataError, match="no data rows"):
            read_raw_points_csv(path)

    def test_garbage_rows_refused(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("parent_fitness,offspring_fitness\n0.5,what\n")
        with pytest.raises(DataError, match="unreadable"):
            read_raw_points_csv(path)


class TestAnalyticCsv:

    def test_real_file_parses(self, cli_fixtures):
        curve = read_analytic_csv(cli_fixtures["analytic"])
        assert curve.f.size == 101
        assert curve.f[0] == 0.0 and curve.f[-1] == 1.0
        assert curve.heuristic == "mhc"
        assert (curve.n, curve.k) == (10, 4)
        assert curve.temperature is None

    def test_temperature_parsed_when_set(self, tmp_path):
        path = tmp_path / "curve.csv"
        path.write_text("f,predicted_mean,heuristic,n,k,temperature\n"
                        "0.5,0.52,sa,10,4,0.1\n")
        assert read_analytic_csv(path).temperature == 0.1

    def test_missing_columns_reported(self, tmp_path):
        path = tmp_path / "curve.csv"
        path.write_text("f,value\n0.5,0.52\n")
        with pytest.raises(DataError, match="predicted_mean"):
            read_analytic_csv(path)


class TestBetaReport:

    def test_real_point_report(self, cli_fixtures):
        report = read_beta_report(cli_fixtures["limit_beta"])
        assert isinstance(report.beta, (float, tuple)) or report.beta is None
        assert report.heuristic.get("kind") == "mhc"
        assert report.generations == 50

    def test_identity_report_has_no_drift_level(self, cli_fixtures):
        base = cli_fixtures["identity"].name[:-len("_cloud.csv")]
        report = read_beta_report(
            cli_fixtures["identity"].with_name(base + "_beta.json"))
        assert report.beta_star is None
        assert report.generations == 0

    def test_interval_beta_becomes_tuple(self, tmp_path):
        path = tmp_path / "beta.json"
        path.write_text(json.dumps({
            "beta": [0.604, 0.792], "beta_star": 0.656,
            "method": "diagonal_interval", "accuracy": 0.002}))
        report = read_beta_report(path)
        assert report.beta == (0.604, 0.792)

    def test_missing_keys_reported(self, tmp_path):
        path = tmp_path / "beta.json"
        path.write_text(json.dumps({"beta": 0.5}))
        with pytest.raises(DataError, match="beta_star, method, accuracy"):
            read_beta_report(path)

    def test_invalid_json_refused(self, tmp_path):
        path = tmp_path / "beta.json"
        path.write_text("{not json")
        with pytest.raises(DataError, match="not valid JSON"):
            read_beta_report(path)


class TestTable1Report:

    def test_real_report_has_nine_rows(self, cli_fixtures):
        report = read_table1_report(cli_fixtures["table1"])
        labels = [r["label"] for r in report["rows"]]
        assert len(labels) == 9
        assert labels[0] == "mHC" and labels[-1] == "nHC"

    def test_empty_report_refused(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps({
            "n": 20, "k": 15, "seeds": [], "max_fitness": {}, "rows": []}))
        with pytest.raises(DataError, match="no rows"):
            read_table1_report(path)

    def test_partial_row_refused(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps({
            "n": 20, "k": 15, "seeds": [1], "max_fitness": {},
            "rows": [{"label": "mHC"}]}))
        with pytest.raises(DataError, match="row 0.*beta"):
            read_table1_report(path)


class TestSiblingLookup:

    def test_finds_existing_report(self, cli_fixtures):
        assert sibling_beta_path(cli_fixtures["fc"]) == cli_fixtures["fc_beta"]

    def test_ignores_other_names(self, cli_fixtures):
        assert sibling_beta_path(cli_fixtures["analytic"]) is None

    def test_missing_sibling_gives_none(self, tmp_path):
        orphan = tmp_path / "orphan_cloud.csv"
        orphan.write_text(CLOUD_HEADER + "\n0.5,0.4,0.6,0.5,0.0,1,1\n")
        assert sibling_beta_path(orphan) is None
