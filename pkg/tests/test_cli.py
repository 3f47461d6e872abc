"""
Command line tests, run in process with click's CliRunner

Usage: pytest tests/test_cli.py

"""

import json
import sys

import pytest
from click.testing import CliRunner

from floodlab import collect_inputs, main, main_cli
from floodlab.utils.constants import DATASET_CSV, METRICS_JSON, METRICS_TSV, TEST_CSV, TRAIN_CSV, VAL_CSV
from floodlab.utils.util import STAGE_FAILURE_EXIT, get_version, remove_handlers

SMALL = ["--duration", "2", "--ue", "4", "--hosts", "2"]


@pytest.fixture(autouse=True)
def clean_handlers():
    yield
    remove_handlers()


def invoke(*args):
    return CliRunner().invoke(main_cli, [str(a) for a in args])


def test_version():
    result = invoke("--version")
    assert result.exit_code == 0
    assert get_version() in result.output


def test_help_lists_commands_in_order():
    result = invoke("-h")
    assert result.exit_code == 0
    listed = [line.split()[0] for line in result.output.split("Commands:")[1].splitlines() if line.strip()]
    assert listed == ["simulate", "dataset", "preprocess", "train", "eval", "pipeline", "plot"]


def test_simulate(tmp_path):
    out = tmp_path / "sim"
    result = invoke("simulate", *SMALL, "--seed", 5, "--trace", "--dump_network", "-o", out)
    assert result.exit_code == 0, result.output
    for name in ("normal_5.csv", "ddos_5.csv", "ddos_5_trace.ndjson", "network_ddos_5.json"):
        assert (out / name).exists(), name
    assert list((out / "logs").glob("floodlab_simulate_*.log"))
    network = json.loads((out / "network_normal_5.json").read_text())
    assert len(network["nodes"]) == 4 + 2 + 4


def test_simulate_one_scenario(tmp_path):
    out = tmp_path / "sim"
    result = invoke("simulate", "-s", "ddos", *SMALL, "--runs", 2, "-o", out)
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in out.glob("*.csv")) == ["ddos_0.csv", "ddos_1.csv"]


def test_existing_output_needs_force(tmp_path):
    out = tmp_path / "sim"
    out.mkdir()
    assert invoke("simulate", *SMALL, "-o", out).exit_code == STAGE_FAILURE_EXIT
    assert invoke("simulate", *SMALL, "-o", out, "-f").exit_code == 0


def test_bad_scenario_value_fails_the_stage(tmp_path):
    result = invoke("simulate", "--ue", 1, "-o", tmp_path / "sim")
    assert result.exit_code == STAGE_FAILURE_EXIT


def test_bad_config_fails_the_stage(tmp_path):
    config = tmp_path / "floodlab.yaml"
    config.write_text("scenario:\n  nodes: 3\n")
    result = invoke("simulate", *SMALL, "--config", config, "-o", tmp_path / "sim")
    assert result.exit_code == STAGE_FAILURE_EXIT


def test_missing_input(tmp_path):
    result = invoke("dataset", "-i", tmp_path / "missing.csv", "-o", tmp_path / "data")
    assert result.exit_code == STAGE_FAILURE_EXIT


def test_wrong_header(tmp_path):
    bad = tmp_path / "normal_0.csv"
    bad.write_text("a,b\n1,2\n")
    result = invoke("dataset", "-i", bad, "-o", tmp_path / "data")
    assert result.exit_code == STAGE_FAILURE_EXIT


def test_stage_by_stage(tmp_path):
    sim, data, splits, models, scores, plots = (
        tmp_path / name for name in ("sim", "data", "splits", "models", "scores", "plots")
    )
    assert invoke("simulate", *SMALL, "-o", sim).exit_code == 0
    assert invoke("dataset", "-i", sim, "-o", data).exit_code == 0
    assert (data / DATASET_CSV).exists()
    assert invoke("preprocess", "-i", data / DATASET_CSV, "-o", splits).exit_code == 0
    for name in (TRAIN_CSV, VAL_CSV, TEST_CSV):
        assert (splits / name).exists()
    result = invoke("train", "-i", splits, "-o", models, "--epochs", 2, "--model", "fnn")
    assert result.exit_code == 0, result.output
    assert (models / "fnn_model.json").exists()
    assert not (models / "cnn_model.json").exists()
    result = invoke("eval", "-i", splits, "-m", models, "--model", "fnn", "-o", scores)
    assert result.exit_code == 0, result.output
    assert "FNN" in result.output
    assert (scores / METRICS_TSV).exists()
    metrics = json.loads((scores / METRICS_JSON).read_text())
    assert [m["model"] for m in metrics["models"]] == ["FNN"]
    assert invoke("plot", "-i", scores, "-o", plots).exit_code == 0
    assert (plots / "metrics.png").exists() and (plots / "metrics.svg").exists()


def test_eval_without_model(tmp_path):
    sim, data, splits = tmp_path / "sim", tmp_path / "data", tmp_path / "splits"
    invoke("simulate", *SMALL, "-o", sim)
    invoke("dataset", "-i", sim, "-o", data)
    invoke("preprocess", "-i", data / DATASET_CSV, "-o", splits)
    result = invoke("eval", "-i", splits, "-m", splits, "-o", tmp_path / "scores")
    assert result.exit_code == STAGE_FAILURE_EXIT


def test_pipeline(tmp_path):
    out = tmp_path / "pipe"
    result = invoke("pipeline", *SMALL, "--epochs", 1, "--seed", 3, "-o", out)
    assert result.exit_code == 0, result.output
    for name in ("normal_3.csv", "ddos_3.csv", DATASET_CSV, TRAIN_CSV, "cnn_model.json", "fnn_history.csv", METRICS_JSON):
        assert (out / name).exists(), name
    assert invoke("plot", "-i", out, "-o", tmp_path / "plots").exit_code == 0
    assert (tmp_path / "plots" / "cnn_history.png").exists()


def test_main_usage_error(monkeypatch):
    monkeypatch.setattr(sys, "argv", ["floodlab", "simulate", "--no_such_flag"])
    with pytest.raises(SystemExit) as e:
        main()
    assert e.value.code == 1


def test_main_stage_failure(monkeypatch, tmp_path):
    monkeypatch.setattr(sys, "argv", ["floodlab", "dataset", "-i", str(tmp_path / "nothing"), "-o", str(tmp_path / "d")])
    with pytest.raises(SystemExit) as e:
        main()
    assert e.value.code == STAGE_FAILURE_EXIT


def test_inputs_in_run_index_order(tmp_path):
    for name in ("ddos_10.csv", "ddos_2.csv", "normal_11.csv", "normal_1.csv", "ddos_x.csv", "notes.csv"):
        (tmp_path / name).write_text("")
    names = [p.name for p in collect_inputs((str(tmp_path),))]
    assert names == ["normal_1.csv", "normal_11.csv", "ddos_2.csv", "ddos_10.csv", "ddos_x.csv"]
