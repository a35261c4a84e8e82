import json

import numpy as np
import pytest

from plantlink.cli import main
from plantlink.core import TimeSeries
from plantlink.scenario import (
    ScenarioValidationError,
    example_scenarios,
    export_csv,
    load_scenario,
    run_scenario,
)

AIR_DEMO = example_scenarios()["air_csk_noiseless"]


def write_scenario(tmp_path, text):
    path = tmp_path / "scenario.toml"
    path.write_text(text, encoding="utf-8")
    return path


MINIMAL_AIR = """
modality = "air"
seed = 1

[transmitter]
kind = "csk"
symbols = [1, 0]
alphabet_size = 2
symbol_period = 100.0
dt = 2.0
levels = [0.0, 1.0e-6]

[channel]
diffusivity = 1.0e-5
receiver_position = [0.03, 0.0, 0.0]
"""


class TestLoadScenario:
    def test_minimal_air_scenario(self, tmp_path):
        cfg = load_scenario(write_scenario(tmp_path, MINIMAL_AIR))
        assert cfg.modality == "air"
        assert cfg.seed == 1
        assert len(cfg.config_sha256) == 64

    def test_negative_diffusivity_names_field(self, tmp_path):
        bad = MINIMAL_AIR.replace("diffusivity = 1.0e-5", "diffusivity = -1.0")
        with pytest.raises(ScenarioValidationError) as exc:
            load_scenario(write_scenario(tmp_path, bad))
        assert any("diffusivity" in e for e in exc.value.errors)

    def test_unknown_key_suggests_correction(self, tmp_path):
        bad = MINIMAL_AIR.replace(
            'receiver_position = [0.03, 0.0, 0.0]',
            'receiver_position = [0.03, 0.0, 0.0]\nwindz = [1.0, 0.0, 0.0]',
        )
        with pytest.raises(ScenarioValidationError) as exc:
            load_scenario(write_scenario(tmp_path, bad))
        assert any('"wind"' in e for e in exc.value.errors)

    def test_all_errors_reported_at_once(self, tmp_path):
        bad = MINIMAL_AIR.replace("diffusivity = 1.0e-5", "diffusivity = -1.0")
        bad = bad.replace("seed = 1", "seed = -4")
        with pytest.raises(ScenarioValidationError) as exc:
            load_scenario(write_scenario(tmp_path, bad))
        assert len(exc.value.errors) >= 2

    def test_every_shipped_scenario_is_valid(self):
        names = example_scenarios()
        assert len(names) >= 5
        for path in names.values():
            cfg = load_scenario(path)
            assert cfg.modality in ("air", "soil", "myco", "electrical", "acoustic")


class TestRunScenario:
    def test_noiseless_air_demo_is_error_free(self, tmp_path):
        cfg = load_scenario(AIR_DEMO)
        summary = run_scenario(cfg, tmp_path)
        assert summary["metrics"]["ser"] == 0.0
        assert (tmp_path / "summary.json").exists()
        assert (tmp_path / "emission.csv").exists()

    def test_same_seed_byte_identical(self, tmp_path):
        cfg = load_scenario(AIR_DEMO)
        run_scenario(cfg, tmp_path / "a")
        run_scenario(cfg, tmp_path / "b")
        assert (tmp_path / "a/summary.json").read_bytes() == (
            tmp_path / "b/summary.json"
        ).read_bytes()

    def test_seed_override_changes_metadata_not_schema(self, tmp_path):
        cfg = load_scenario(AIR_DEMO)
        a = run_scenario(cfg, tmp_path / "a", seed=1)
        b = run_scenario(cfg, tmp_path / "b", seed=2)
        assert a.keys() == b.keys()
        assert a["seed"] == 1 and b["seed"] == 2


class TestExportCsv:
    def test_empty_set_writes_nothing(self, tmp_path):
        assert export_csv({}, tmp_path) == []

    def test_line_count(self, tmp_path):
        ts = TimeSeries(0.0, 0.5, [1.0, 2.0, 3.0], "V")
        (path,) = export_csv({"probe": ts}, tmp_path)
        lines = path.read_text().splitlines()
        assert len(lines) == 4
        assert lines[0] == "t,probe[V]"

    def test_round_trip_precision(self, tmp_path):
        rng = np.random.default_rng(0)
        ts = TimeSeries(0.0, 1.0 / 3.0, rng.standard_normal(50), "Pa")
        (path,) = export_csv({"sig": ts}, tmp_path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.all(np.abs(data[:, 1] - ts.values) <= 1e-12 * np.abs(ts.values))
        assert np.all(np.abs(data[:, 0] - ts.times) <= 1e-12)


class TestCliEntryPoint:
    def test_validate_ok(self, capsys):
        assert main(["validate", str(AIR_DEMO)]) == 0
        assert "valid" in capsys.readouterr().out

    def test_validate_bad_file_exit_one(self, tmp_path, capsys):
        bad = write_scenario(tmp_path, 'modality = "plasma"\n')
        assert main(["validate", str(bad)]) == 1
        assert "modality" in capsys.readouterr().err

    def test_missing_file_exit_one(self):
        assert main(["validate", "/nonexistent/x.toml"]) == 1

    def test_run_writes_outputs(self, tmp_path, capsys):
        code = main(["run", str(AIR_DEMO), "--out", str(tmp_path)])
        assert code == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["metrics"]["ser"] == 0.0
        assert summary["tool_version"]

    def test_list_examples(self, capsys):
        assert main(["list-examples"]) == 0
        out = capsys.readouterr().out
        assert "air_csk_noiseless" in out
