"""
Integration tests for floodlab
Usage: pytest .

"""

# import
import filecmp
import json
import os
import shutil

# import functions
import subprocess
import sys
from pathlib import Path

import pytest
from loguru import logger

# test data
test_data = Path("tests/test_data")
small_config = Path(f"{test_data}/small.yaml")
output_dir = Path(f"{test_data}/outputs")
output_dir.mkdir(parents=True, exist_ok=True)
simulate_dir: Path = f"{output_dir}/floodlab_simulate"
simulate_threads_dir: Path = f"{output_dir}/floodlab_simulate_threads"
dataset_dir: Path = f"{output_dir}/floodlab_dataset"
preprocess_dir: Path = f"{output_dir}/floodlab_preprocess"
train_dir: Path = f"{output_dir}/floodlab_train"
eval_dir: Path = f"{output_dir}/floodlab_eval"
pipeline_dir: Path = f"{output_dir}/floodlab_pipeline"
pipeline_rerun_dir: Path = f"{output_dir}/floodlab_pipeline_rerun"
desk_dir: Path = f"{output_dir}/floodlab_desk_scale"
plots_dir: Path = f"{output_dir}/plot_output"


@pytest.fixture(autouse=True, scope="module")
def exit_on_error_sink():
    # scoped to this module so the sink does not leak into other test modules at collection
    handler_id = logger.add(lambda _: sys.exit(1), level="ERROR")
    yield
    logger.remove(handler_id)


threads = 2
small = "--duration 2 --ue 4 --hosts 2"


def remove_directory(dir_path):
    if os.path.exists(dir_path):
        shutil.rmtree(dir_path)


def exec_command(cmnd, stdout=subprocess.PIPE, stderr=subprocess.PIPE):
    """executes shell command and returns stdout if completes exit code 0
    Parameters
    ----------
    cmnd : str
      shell command to be executed
    stdout, stderr : streams
      Default value (PIPE) intercepts process output, setting to None
      blocks this."""

    proc = subprocess.Popen(cmnd, shell=True, stdout=stdout, stderr=stderr)
    out, err = proc.communicate()
    if proc.returncode != 0:
        raise RuntimeError(f"FAILED: {cmnd}\n{err}")
    return out.decode("utf8") if out is not None else None


def artifacts(directory):
    """Every output file except the logs, relative to directory."""
    return sorted(
        str(p.relative_to(directory))
        for p in Path(directory).rglob("*")
        if p.is_file() and "logs" not in p.parts
    )


def test_simulate():
    """test floodlab simulate"""
    cmd = f"floodlab simulate {small} --runs 2 -o {simulate_dir} -t 1 -f"
    exec_command(cmd)


def test_simulate_threads():
    """test floodlab simulate with worker processes gives the same files"""
    cmd = f"floodlab simulate {small} --runs 2 -o {simulate_threads_dir} -t {threads} -f"
    exec_command(cmd)
    names = artifacts(simulate_dir)
    assert names == artifacts(simulate_threads_dir)
    match, mismatch, errors = filecmp.cmpfiles(simulate_dir, simulate_threads_dir, names, shallow=False)
    assert not mismatch and not errors


def test_dataset():
    """test floodlab dataset"""
    cmd = f"floodlab dataset -i {simulate_dir} -o {dataset_dir} -f"
    exec_command(cmd)


def test_preprocess():
    """test floodlab preprocess"""
    cmd = f"floodlab preprocess -i {dataset_dir}/dataset.csv -o {preprocess_dir} -f"
    exec_command(cmd)


def test_train():
    """test floodlab train"""
    cmd = f"floodlab train -i {preprocess_dir} -o {train_dir} --epochs 2 -f"
    exec_command(cmd)


def test_eval():
    """test floodlab eval"""
    cmd = f"floodlab eval -i {preprocess_dir} -m {train_dir} -o {eval_dir} -f"
    out = exec_command(cmd)
    assert out.splitlines()[0] == "Model Accuracy Precision Recall F1 Score"


def test_pipeline_config():
    """test floodlab pipeline with a config file"""
    cmd = f"floodlab pipeline --config {small_config} -o {pipeline_dir} -t {threads} -f"
    exec_command(cmd)
    with open(f"{pipeline_dir}/metrics.json") as f:
        metrics = json.load(f)
    assert [m["model"] for m in metrics["models"]] == ["CNN", "FNN"]
    assert Path(f"{pipeline_dir}/normal_11.csv").exists()


def test_pipeline_rerun_is_identical():
    """test floodlab pipeline twice with the same seed writes the same bytes"""
    cmd = f"floodlab pipeline --config {small_config} -o {pipeline_rerun_dir} -t 1 -f"
    exec_command(cmd)
    names = artifacts(pipeline_dir)
    assert names == artifacts(pipeline_rerun_dir)
    match, mismatch, errors = filecmp.cmpfiles(pipeline_dir, pipeline_rerun_dir, names, shallow=False)
    assert not mismatch and not errors


def test_plot():
    """test floodlab plot"""
    cmd = f"floodlab plot -i {pipeline_dir} -o {plots_dir} -f"
    exec_command(cmd)
    for name in ("cnn_history", "fnn_history", "metrics"):
        assert Path(f"{plots_dir}/{name}.png").exists()


@pytest.mark.slow
def test_desk_scale():
    """test floodlab pipeline at desk scale: 20 UEs, 3 hosts, 60 s per scenario"""
    cmd = f"floodlab pipeline --ue 20 --hosts 3 --duration 60 --seed 0 -o {desk_dir} -t {threads} -f"
    exec_command(cmd)
    with open(f"{desk_dir}/metrics.json") as f:
        metrics = json.load(f)
    for model in metrics["models"]:
        assert model["metrics"]["accuracy"] >= 0.95, model["model"]
        assert model["metrics"]["recall"] >= 0.95, model["model"]


remove_directory(output_dir)
