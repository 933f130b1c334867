"""Command-line interface: formats, exit codes, determinism."""

import csv
import io
import json
import subprocess
import sys

import pytest

import collectikit.cli as cli
from collectikit.exceptions import InvariantViolation
from collectikit.states import hes_state, werner
from collectikit.witness import witness_of_state

TABLE1_HEADER = (
    "state",
    "P",
    "policy",
    "pairs",
    "pairs_source",
    "seed",
    "bootstrap",
    "W_exact",
    "W_sim",
    "sigma",
    "p00",
    "p01",
    "p11",
    "ppp",
    "ref_W",
    "ref_W_err",
    "ref_W_th",
)


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "collectikit", *args],
        capture_output=True,
        text=True,
    )


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    header = tuple(rows[0])
    return header, [dict(zip(header, row)) for row in rows[1:]]


class TestTable1:
    def test_csv_shape_and_reference_annotations(self):
        result = run_cli("table1", "--pairs", "2000", "--bootstrap", "200")
        assert result.returncode == 0
        header, rows = parse_csv(result.stdout)
        assert header == TABLE1_HEADER
        assert [row["state"] for row in rows] == ["bell", "mixed", "separable"]
        bell, mixed, separable = rows
        assert bell["W_exact"] == "-0.25"
        assert abs(float(mixed["W_exact"]) - 0.8125) < 1e-12
        assert separable["W_exact"] == "0.0"
        # reference columns carry the published measured and theory values;
        # for mixed the theory entry differs from W_exact, deliberately kept
        assert bell["ref_W"] == "-0.21" and bell["ref_W_th"] == "-0.25"
        assert mixed["ref_W"] == "0.69" and mixed["ref_W_th"] == "0.75"
        assert separable["ref_W_th"] == "0.0"

    def test_default_pairs_are_calibrated(self):
        result = run_cli("table1")
        assert result.returncode == 0
        _, rows = parse_csv(result.stdout)
        for row in rows:
            assert row["pairs"] == "10000"
            assert row["pairs_source"] == "calibrated"

    def test_per_row_seeds_differ(self):
        result = run_cli("table1", "--pairs", "100", "--bootstrap", "50")
        _, rows = parse_csv(result.stdout)
        seeds = [row["seed"] for row in rows]
        assert len(set(seeds)) == 3


class TestExitCodes:
    def test_unknown_state(self):
        result = run_cli("table1", "--state", "bogus", "--pairs", "10", "--bootstrap", "2")
        assert result.returncode == 1
        assert "invalid input" in result.stderr

    def test_unknown_experiment(self):
        assert run_cli("nope").returncode == 1

    def test_unknown_policy(self):
        assert run_cli("table1", "--policy", "bogus", "--pairs", "10").returncode == 1

    def test_negative_pairs(self):
        assert run_cli("table1", "--pairs", "-5").returncode == 1

    def test_missing_config_file(self):
        result = run_cli("table1", "--config", "/nonexistent/collectikit.json")
        assert result.returncode == 3

    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"bogus": 1}))
        assert run_cli("table1", "--config", str(path)).returncode == 1

    def test_malformed_config_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        assert run_cli("table1", "--config", str(path)).returncode == 1

    def test_invariant_violation_in_process(self, monkeypatch, capsys):
        def boom(cfg):
            raise InvariantViolation("boom")

        monkeypatch.setitem(cli._RUNNERS, "table1", boom)
        assert cli.main(["table1", "--pairs", "10", "--bootstrap", "2"]) == 2
        assert "invariant violation" in capsys.readouterr().err


class TestWernerSweep:
    def test_repeat_runs_are_byte_identical(self):
        first = run_cli("werner-sweep")
        second = run_cli("werner-sweep")
        assert first.returncode == 0 and second.returncode == 0
        assert first.stdout == second.stdout

    def test_grid_and_threshold_summary(self):
        result = run_cli("werner-sweep", "--pairs", "500", "--bootstrap", "100")
        header, rows = parse_csv(result.stdout)
        assert header == ("p", "W_exact", "W_interp", "W_sim", "sigma")
        assert len(rows) == 21
        assert rows[0]["p"] == "0.0" and rows[-1]["p"] == "1.0"
        assert rows[-1]["W_exact"] == "-0.25"
        assert abs(float(rows[0]["W_exact"]) - 0.8125) < 1e-12
        assert "# p_star = 0.8744746321952062" in result.stderr
        for row in rows:
            assert abs(float(row["W_exact"]) - float(row["W_interp"])) < 1e-10

    def test_file_output_matches_stdout(self, tmp_path):
        path = tmp_path / "sweep.csv"
        piped = run_cli("werner-sweep", "--pairs", "200", "--bootstrap", "50")
        written = run_cli(
            "werner-sweep", "--pairs", "200", "--bootstrap", "50", "--out", str(path)
        )
        assert written.returncode == 0
        assert written.stdout == ""
        assert path.read_text() == piped.stdout


class TestQualityScan:
    def test_rows_and_sidecars(self, tmp_path):
        path = tmp_path / "q.csv"
        result = run_cli("quality-scan", "--out", str(path))
        assert result.returncode == 0
        header, rows = parse_csv(path.read_text())
        assert header[:7] == ("rho_p", "rho_s", "P", "policy", "tau", "W_exact", "R")
        labels = [(row["rho_p"], row["rho_s"]) for row in rows]
        assert labels == [
            ("pure", "pure"),
            ("pure", "mixed"),
            ("mixed", "pure"),
            ("mixed", "mixed"),
        ]
        assert rows[0]["R"] == "inf"
        for row in rows[1:]:
            assert abs(float(row["R"]) - 1.0) < 1e-10
        assert abs(float(rows[3]["W_exact"]) - 0.8125) < 1e-12
        for tag in ("pure-pure", "pure-mixed", "mixed-pure", "mixed-mixed"):
            sidecar = tmp_path / f"q_scan_{tag}.csv"
            assert sidecar.exists()
            scan_header, scan_rows = parse_csv(sidecar.read_text())
            assert scan_header == ("phi", "cc")
            assert len(scan_rows) == 64

    def test_json_format_encodes_infinity_as_string(self):
        result = run_cli("quality-scan", "--format", "json")
        assert result.returncode == 0
        payload = json.loads(result.stdout)
        assert payload["config"]["experiment"] == "quality-scan"
        assert payload["rows"][0]["R"] == "inf"
        assert set(payload["scans"]) == {"pure-pure", "pure-mixed", "mixed-pure", "mixed-mixed"}
        assert len(payload["scans"]["pure-pure"]) == 64

    def test_reduced_visibility_ratio(self):
        result = run_cli("quality-scan", "--visibility", "0.5")
        _, rows = parse_csv(result.stdout)
        assert abs(float(rows[0]["R"]) - 3.0) < 1e-9
        for row in rows[1:]:
            assert abs(float(row["R"]) - 1.0) < 1e-10


class TestSimulateCounts:
    def test_zero_pairs_leaves_estimate_blank(self):
        result = run_cli("simulate-counts", "--pairs", "0")
        assert result.returncode == 0
        _, rows = parse_csv(result.stdout)
        assert rows[0]["W_sim"] == "" and rows[0]["sigma"] == ""
        assert rows[0]["n00"] == "0"

    def test_werner_state_flows_through(self):
        result = run_cli(
            "simulate-counts", "--state", "werner:0.35", "--pairs", "500", "--bootstrap", "50"
        )
        assert result.returncode == 0
        _, rows = parse_csv(result.stdout)
        assert rows[0]["state"] == "werner:0.35"
        expected = witness_of_state(hes_state(werner(0.35)), 0.5).w
        assert abs(float(rows[0]["W_exact"]) - expected) < 1e-12

    def test_seed_determinism(self):
        args = ("simulate-counts", "--pairs", "1000", "--bootstrap", "50", "--seed", "3")
        assert run_cli(*args).stdout == run_cli(*args).stdout
        other = run_cli("simulate-counts", "--pairs", "1000", "--bootstrap", "50", "--seed", "4")
        assert other.stdout != run_cli(*args).stdout


class TestSetupSim:
    def test_optical_chain_matches_model(self):
        result = run_cli("setup-sim")
        assert result.returncode == 0
        header, rows = parse_csv(result.stdout)
        assert header == ("state", "setup", "tau", "setting", "p_optical", "p_model", "abs_diff")
        assert [row["setting"] for row in rows] == ["00", "01", "10", "11", "++"]
        for row in rows:
            assert row["setup"] == "fig2"
            assert float(row["abs_diff"]) < 1e-10
        assert "# max_abs_diff = " in result.stderr

    def test_unknown_setup_name(self):
        assert run_cli("setup-sim", "--setup", "fig9").returncode == 1


class TestConfigFile:
    def test_file_values_fill_unset_flags(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"pairs": 300, "seed": 5, "bootstrap": 100}))
        result = run_cli("table1", "--config", str(path), "--seed", "9", "--format", "json")
        assert result.returncode == 0
        config = json.loads(result.stdout)["config"]
        assert config["pairs"] == 300
        assert config["bootstrap"] == 100
        assert config["seed"] == 9
        assert config["pairs_source"] == "explicit"
