"""Command-line interface: subcommands, outputs, and exit codes."""

import json

import pytest

from synalloc.cli import DATASET_ENV, EXIT_CONFIG, EXIT_DATA, EXIT_OK, main

FAST = [
    "--vectors", "200",
    "--init-per-partition", "40",
    "--alpha", "10",
]


def run_cli(*argv):
    return main(list(argv))


class TestRun:
    def test_writes_json_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = run_cli("run", "--scenario", "1", "--seed", "3", "--out", str(out), *FAST)
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["scenario"]["label"] == "1"
        assert payload["majority_partition"] in range(1, 6)
        assert "scenario" in capsys.readouterr().out

    def test_csv_format_inferred_from_suffix(self, tmp_path):
        out = tmp_path / "summary.csv"
        assert run_cli("run", "--out", str(out), *FAST) == EXIT_OK
        header = out.read_text().splitlines()[0]
        assert header.split(",")[:3] == ["scenario", "gen_mu", "gen_sigma"]

    def test_all_presets_produce_three_rows(self, tmp_path):
        out = tmp_path / "summary.csv"
        code = run_cli("run", "--scenario", "all", "--out", str(out), "--format", "csv", *FAST)
        assert code == EXIT_OK
        assert len(out.read_text().splitlines()) == 4

    def test_record_stream(self, tmp_path):
        records = tmp_path / "records.jsonl"
        code = run_cli("run", "--records", str(records), *FAST)
        assert code == EXIT_OK
        lines = records.read_text().splitlines()
        assert len(lines) == 200
        first = json.loads(lines[0])
        assert set(first) == {"t", "chosen", "similarities"}
        assert first["t"] == 0
        assert len(first["similarities"]) == 5
        # similarities are printed to 12 significant digits
        for line in lines[:20]:
            for s in json.loads(line)["similarities"]:
                assert s == float(f"{s:.12g}")

    def test_identical_invocations_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["run", "--scenario", "2", "--seed", "9", *FAST]
        assert run_cli(*argv, "--out", str(a)) == EXIT_OK
        assert run_cli(*argv, "--out", str(b)) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_custom_scenario_requires_parameters(self, capsys):
        assert run_cli("run", "--scenario", "custom", *FAST) == EXIT_CONFIG
        assert "custom scenario" in capsys.readouterr().err

    def test_custom_scenario_runs(self, tmp_path):
        out = tmp_path / "r.json"
        code = run_cli(
            "run", "--scenario", "custom", "--mu", "30", "--sigma", "5",
            "--vectors", "150", "--init-per-partition", "40", "--alpha", "10",
            "--out", str(out),
        )
        assert code == EXIT_OK
        assert json.loads(out.read_text())["scenario"]["mu"] == 30.0

    def test_dataset_backed_run(self, tmp_path, fixtures_dir):
        out = tmp_path / "r.json"
        code = run_cli(
            "run", "--dataset", str(fixtures_dir / "uci_style.csv"),
            "--partitions", "2", "--vectors", "100", "--alpha", "2",
            "--out", str(out),
        )
        assert code == EXIT_OK
        assert json.loads(out.read_text())["dataset_source"].endswith("uci_style.csv")

    def test_dataset_from_environment(self, tmp_path, fixtures_dir, monkeypatch):
        monkeypatch.setenv(DATASET_ENV, str(fixtures_dir / "uci_style.csv"))
        out = tmp_path / "r.json"
        code = run_cli("run", "--partitions", "2", "--vectors", "50", "--alpha", "2",
                       "--out", str(out))
        assert code == EXIT_OK
        assert json.loads(out.read_text())["dataset_source"].endswith("uci_style.csv")


class TestValidate:
    def test_passes_on_clean_run(self, capsys):
        code = run_cli("validate", "--vectors", "300", "--init-per-partition", "40",
                       "--alpha", "10", "--seed", "2")
        assert code == EXIT_OK
        out = capsys.readouterr().out
        for check in (
            "mass_conservation",
            "cf_consistency",
            "synopsis_alpha_compliance",
            "weight_convexity",
            "moment_agreement",
        ):
            assert f"{check}: PASS" in out
        assert "FAIL" not in out


class TestStats:
    def test_prints_dimension_summary(self, fixtures_dir, capsys):
        code = run_cli("stats", "--dataset", str(fixtures_dir / "plain_small.csv"))
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "3 rows x 5 dimensions" in out
        assert "NOX_GT" in out
        co_line = next(line for line in out.splitlines() if line.startswith("CO_GT"))
        assert co_line.split()[1] == "2.000"  # hand-computed column mean

    def test_empty_after_cleaning_is_a_data_error(self, fixtures_dir):
        code = run_cli("stats", "--dataset", str(fixtures_dir / "all_sentinel.csv"))
        assert code == EXIT_DATA

    def test_requires_a_dataset(self, monkeypatch, capsys):
        monkeypatch.delenv(DATASET_ENV, raising=False)
        assert run_cli("stats") == EXIT_CONFIG


class TestExitCodes:
    def test_unknown_flag_is_config_error(self, capsys):
        assert run_cli("run", "--nonsense") == EXIT_CONFIG

    def test_bad_engine_parameters_are_config_errors(self, capsys):
        assert run_cli("run", "--theta", "0.9", *FAST) == EXIT_CONFIG

    def test_missing_dataset_is_data_error(self, capsys):
        assert run_cli("run", "--dataset", "/does/not/exist.csv", *FAST) == EXIT_DATA
        assert "error" in capsys.readouterr().err

    def test_unreadable_rows_in_strict_mode_are_data_errors(self, fixtures_dir):
        code = run_cli("stats", "--dataset", str(fixtures_dir / "bad_rows.csv"), "--strict")
        assert code == EXIT_DATA

    def test_validate_rejects_nan_rows_in_strict_mode(self, fixtures_dir, capsys):
        code = run_cli("validate", "--dataset", str(fixtures_dir / "bad_rows.csv"),
                       "--strict", "--vectors", "10")
        assert code == EXIT_DATA
        assert "error" in capsys.readouterr().err
