#!/usr/bin/env python3

import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
from loguru import logger

from floodlab.evaluation.metrics import Report
from floodlab.models.architectures import ArchName
from floodlab.nn.training import History
from floodlab.plot.plot import plot_history, plot_metrics
from floodlab.simcore.config import Scenario
from floodlab.subcommands.dataset import subcommand_dataset
from floodlab.subcommands.evaluate import subcommand_eval
from floodlab.subcommands.pipeline import subcommand_pipeline
from floodlab.subcommands.preprocess import subcommand_preprocess
from floodlab.subcommands.simulate import subcommand_simulate
from floodlab.subcommands.train import subcommand_train
from floodlab.utils.config import build_config, stage_seed
from floodlab.utils.constants import DATASET_CSV, METRICS_JSON
from floodlab.utils.exceptions import FloodlabError
from floodlab.utils.util import (
    OrderedCommands,
    begin_floodlab,
    end_floodlab,
    get_version,
    guarded,
)
from floodlab.utils.validation import check_inputs_exist, instantiate_dirs

"""
common options
"""


def common_options(func):
    """Common command line args
    Define common command line args here, and include them with the @common_options decorator below.
    """
    options = [
        click.option(
            "-o",
            "--out",
            default="output_floodlab",
            show_default=True,
            type=click.Path(),
            help="Output directory",
        ),
        click.option(
            "--seed",
            type=int,
            default=None,
            help="Master seed; every stage seed derives from it  [default: 0]",
        ),
        click.option(
            "--config",
            type=click.Path(),
            default=None,
            help="YAML or JSON configuration file. Command line flags override it",
        ),
        click.option(
            "-f",
            "--force",
            is_flag=True,
            help="Force overwrites the output directory",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


"""
simulate only options
"""


def simulate_options(func):
    """simulate command line args"""
    options = [
        click.option(
            "--duration",
            type=float,
            default=None,
            help="Simulated application time in seconds  [default: 60]",
        ),
        click.option(
            "--ue",
            type=int,
            default=None,
            help="Number of user equipments  [default: 100]",
        ),
        click.option(
            "--hosts",
            type=int,
            default=None,
            help="Number of attacking hosts behind the router  [default: 3]",
        ),
        click.option(
            "--flood_size",
            type=int,
            default=None,
            help="Flood datagram size in bytes  [default: 1000]",
        ),
        click.option(
            "--flood_interval",
            type=float,
            default=None,
            help="Seconds between flood datagrams per host  [default: 0.001]",
        ),
        click.option(
            "--ping_interval",
            type=float,
            default=None,
            help="Seconds between echo requests per UE  [default: 1.0]",
        ),
        click.option(
            "--runs",
            type=int,
            default=None,
            help="Replications per scenario, seeds seed .. seed+runs-1  [default: 1]",
        ),
        click.option(
            "-t",
            "--threads",
            help="Number of simulation processes",
            default=1,
            type=int,
            show_default=True,
        ),
        click.option(
            "--trace",
            is_flag=True,
            help="Also write the per-packet trace as NDJSON",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


"""
train only options
"""


def train_options(func):
    """train command line args"""
    options = [
        click.option(
            "--model",
            type=click.Choice(["cnn", "fnn", "both"]),
            default=None,
            help="Architecture(s) to train and evaluate  [default: both]",
        ),
        click.option(
            "--epochs",
            type=int,
            default=None,
            help="Training epochs  [default: 10]",
        ),
        click.option(
            "--learning_rate",
            type=float,
            default=None,
            help="ADAM learning rate  [default: 0.001]",
        ),
        click.option(
            "--batch_size",
            type=int,
            default=None,
            help="Minibatch size  [default: 64]",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def split_options(func):
    """preprocess command line args"""
    options = [
        click.option("--train_frac", type=float, default=None, help="Training fraction  [default: 0.7]"),
        click.option("--val_frac", type=float, default=None, help="Validation fraction  [default: 0.1]"),
        click.option("--test_frac", type=float, default=None, help="Test fraction  [default: 0.2]"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def model_choice(model: Optional[str]) -> Optional[Tuple[str, ...]]:
    if model is None:
        return None
    if model == "both":
        return tuple(a.value for a in ArchName)
    return (model,)


def scenario_overrides(kwargs: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "duration_s": kwargs.get("duration"),
        "n_ue": kwargs.get("ue"),
        "n_hosts": kwargs.get("hosts"),
        "flood_size_bytes": kwargs.get("flood_size"),
        "flood_interval_s": kwargs.get("flood_interval"),
        "ping_interval_s": kwargs.get("ping_interval"),
    }


def train_overrides(kwargs: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "epochs": kwargs.get("epochs"),
        "learning_rate": kwargs.get("learning_rate"),
        "batch_size": kwargs.get("batch_size"),
    }


def split_overrides(kwargs: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "train_frac": kwargs.get("train_frac"),
        "val_frac": kwargs.get("val_frac"),
        "test_frac": kwargs.get("test_frac"),
    }


def run_order(path: Path) -> Tuple[int, int, str]:
    """Sort key: by the numeric run index in <scenario>_<index>.csv, unnumbered files last."""
    suffix = path.stem.rsplit("_", 1)[-1]
    if suffix.isdigit():
        return (0, int(suffix), path.name)
    return (1, 0, path.name)


def collect_inputs(inputs: Tuple[str, ...]) -> List[Path]:
    """
    Result files; a directory contributes its normal_*.csv and ddos_*.csv
    files, each scenario in run index order.
    """
    files = []
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            for scenario in Scenario:
                files.extend(sorted(path.glob(f"{scenario.value}_*.csv"), key=run_order))
        else:
            files.append(path)
    return files


@click.group(cls=OrderedCommands)
@click.help_option("--help", "-h")
@click.version_option(get_version(), "--version", "-V")
def main_cli():
    1 + 1


"""
simulate command
"""


@main_cli.command()
@click.help_option("--help", "-h")
@click.version_option(get_version(), "--version", "-V")
@click.pass_context
@click.option(
    "-s",
    "--scenario",
    type=click.Choice(["normal", "ddos", "both"]),
    default="both",
    show_default=True,
    help="Scenario(s) to simulate",
)
@click.option(
    "--dump_network",
    is_flag=True,
    help="Also write the network configuration (addresses, links, routes) as JSON",
)
@common_options
@simulate_options
def simulate(
    ctx,
    scenario,
    dump_network,
    out,
    seed,
    config,
    force,
    threads,
    trace,
    runs,
    **kwargs,
):
    """Simulates the normal and/or ddos scenario and writes telemetry CSVs"""

    # validates the directory  (need to before I start floodlab or else no log file is written)
    instantiate_dirs(out, force)

    params = {
        "--scenario": scenario,
        "--out": out,
        "--seed": seed,
        "--config": config,
        "--force": force,
        "--threads": threads,
        "--runs": runs,
        "--trace": trace,
        "--dump_network": dump_network,
        **{f"--{k}": v for k, v in kwargs.items()},
    }

    # initial logging etc
    start_time = begin_floodlab(params, "simulate")

    with guarded("simulate"):
        cfg = build_config(
            config, {"seed": seed, "runs": runs, "scenario": scenario_overrides(kwargs)}
        )
        scenarios = list(Scenario) if scenario == "both" else [Scenario(scenario)]
        subcommand_simulate(cfg.simulation_runs(scenarios), Path(out), threads, trace, dump_network)

    # end floodlab
    end_floodlab(start_time, "simulate")


"""
dataset command
"""


@main_cli.command()
@click.help_option("--help", "-h")
@click.version_option(get_version(), "--version", "-V")
@click.pass_context
@click.option(
    "-i",
    "--input",
    "inputs",
    help="Result CSV from floodlab simulate, or a simulate output directory. Repeat for several",
    type=click.Path(),
    multiple=True,
    required=True,
)
@common_options
def dataset(
    ctx,
    inputs,
    out,
    seed,
    config,
    force,
    **kwargs,
):
    """Merges simulation results into a labelled dataset"""

    # validates the directory  (need to before I start floodlab or else no log file is written)
    instantiate_dirs(out, force)

    params = {
        "--input": list(inputs),
        "--out": out,
        "--seed": seed,
        "--config": config,
        "--force": force,
    }

    # initial logging etc
    start_time = begin_floodlab(params, "dataset")

    with guarded("dataset"):
        check_inputs_exist(*inputs)
        cfg = build_config(config, {"seed": seed})
        files = collect_inputs(inputs)
        if not files:
            raise FloodlabError(f"no result files found in {', '.join(inputs)}")
        subcommand_dataset(files, Path(out), stage_seed(cfg.seed, "dataset"))

    # end floodlab
    end_floodlab(start_time, "dataset")


"""
preprocess command
"""


@main_cli.command()
@click.help_option("--help", "-h")
@click.version_option(get_version(), "--version", "-V")
@click.pass_context
@click.option(
    "-i",
    "--input",
    help=f"Merged dataset ({DATASET_CSV}) from floodlab dataset",
    type=click.Path(),
    required=True,
)
@common_options
@split_options
def preprocess(
    ctx,
    input,
    out,
    seed,
    config,
    force,
    **kwargs,
):
    """Drops sparse columns, fills, encodes, splits and scales the dataset"""

    # validates the directory  (need to before I start floodlab or else no log file is written)
    instantiate_dirs(out, force)

    params = {
        "--input": input,
        "--out": out,
        "--seed": seed,
        "--config": config,
        "--force": force,
        **{f"--{k}": v for k, v in kwargs.items()},
    }

    # initial logging etc
    start_time = begin_floodlab(params, "preprocess")

    with guarded("preprocess"):
        check_inputs_exist(input)
        cfg = build_config(config, {"seed": seed, "split": split_overrides(kwargs)})
        subcommand_preprocess(Path(input), Path(out), cfg.split_spec())

    # end floodlab
    end_floodlab(start_time, "preprocess")


"""
train command
"""


@main_cli.command()
@click.help_option("--help", "-h")
@click.version_option(get_version(), "--version", "-V")
@click.pass_context
@click.option(
    "-i",
    "--input",
    help="Directory with train.csv and val.csv from floodlab preprocess",
    type=click.Path(),
    required=True,
)
@common_options
@train_options
def train(
    ctx,
    input,
    out,
    seed,
    config,
    force,
    model,
    **kwargs,
):
    """Trains the CNN and/or FNN detector"""

    # validates the directory  (need to before I start floodlab or else no log file is written)
    instantiate_dirs(out, force)

    params = {
        "--input": input,
        "--out": out,
        "--seed": seed,
        "--config": config,
        "--force": force,
        "--model": model,
        **{f"--{k}": v for k, v in kwargs.items()},
    }

    # initial logging etc
    start_time = begin_floodlab(params, "train")

    with guarded("train"):
        check_inputs_exist(input)
        cfg = build_config(
            config, {"seed": seed, "models": model_choice(model), "train": train_overrides(kwargs)}
        )
        subcommand_train(Path(input), Path(out), cfg.models, cfg.train_config())

    # end floodlab
    end_floodlab(start_time, "train")


"""
eval command
"""


@main_cli.command(name="eval")
@click.help_option("--help", "-h")
@click.version_option(get_version(), "--version", "-V")
@click.pass_context
@click.option(
    "-i",
    "--input",
    help="Directory with test.csv from floodlab preprocess",
    type=click.Path(),
    required=True,
)
@click.option(
    "-m",
    "--model_dir",
    help="Directory with <model>_model.json from floodlab train",
    type=click.Path(),
    required=True,
)
@click.option(
    "--model",
    type=click.Choice(["cnn", "fnn", "both"]),
    default=None,
    help="Architecture(s) to evaluate  [default: both]",
)
@common_options
def evaluate(
    ctx,
    input,
    model_dir,
    model,
    out,
    seed,
    config,
    force,
    **kwargs,
):
    """Scores trained models on the test split"""

    # validates the directory  (need to before I start floodlab or else no log file is written)
    instantiate_dirs(out, force)

    params = {
        "--input": input,
        "--model_dir": model_dir,
        "--model": model,
        "--out": out,
        "--seed": seed,
        "--config": config,
        "--force": force,
    }

    # initial logging etc
    start_time = begin_floodlab(params, "eval")

    with guarded("eval"):
        check_inputs_exist(input, model_dir)
        cfg = build_config(config, {"seed": seed, "models": model_choice(model)})
        subcommand_eval(
            Path(input),
            Path(model_dir),
            Path(out),
            cfg.models,
            cfg.train_config().classification_threshold,
        )

    # end floodlab
    end_floodlab(start_time, "eval")


"""
pipeline command
"""


@main_cli.command()
@click.help_option("--help", "-h")
@click.version_option(get_version(), "--version", "-V")
@click.pass_context
@common_options
@simulate_options
@split_options
@train_options
def pipeline(
    ctx,
    out,
    seed,
    config,
    force,
    threads,
    trace,
    runs,
    model,
    **kwargs,
):
    """simulate, dataset, preprocess, train and eval all in one"""

    # validates the directory  (need to before I start floodlab or else no log file is written)
    instantiate_dirs(out, force)

    params = {
        "--out": out,
        "--seed": seed,
        "--config": config,
        "--force": force,
        "--threads": threads,
        "--trace": trace,
        "--runs": runs,
        "--model": model,
        **{f"--{k}": v for k, v in kwargs.items()},
    }

    # initial logging etc
    start_time = begin_floodlab(params, "pipeline")

    with guarded("pipeline"):
        cfg = build_config(
            config,
            {
                "seed": seed,
                "runs": runs,
                "models": model_choice(model),
                "scenario": scenario_overrides(kwargs),
                "split": split_overrides(kwargs),
                "train": train_overrides(kwargs),
            },
        )
        subcommand_pipeline(cfg, Path(out), threads, trace)

    # end floodlab
    end_floodlab(start_time, "pipeline")


"""
plot command
"""


@main_cli.command()
@click.help_option("--help", "-h")
@click.version_option(get_version(), "--version", "-V")
@click.pass_context
@click.option(
    "-i",
    "--input",
    help="Directory with <model>_history.csv and metrics.json from floodlab train/eval/pipeline",
    type=click.Path(),
    required=True,
)
@click.option(
    "-o",
    "--out",
    default="floodlab_plots",
    show_default=True,
    type=click.Path(),
    help="Output directory to store floodlab plots",
)
@click.option(
    "--dpi",
    default=300,
    type=int,
    show_default=True,
    help="Resolution (dots per inch) of the png plots",
)
@click.option(
    "-f",
    "--force",
    is_flag=True,
    help="Force overwrites the output directory",
)
def plot(
    ctx,
    input,
    out,
    dpi,
    force,
    **kwargs,
):
    """Plots training curves and a metric comparison as png and svg"""

    # validates the directory  (need to before I start floodlab or else no log file is written)
    instantiate_dirs(out, force)

    params = {
        "--input": input,
        "--out": out,
        "--dpi": dpi,
        "--force": force,
    }

    # initial logging etc
    start_time = begin_floodlab(params, "plot")

    with guarded("plot"):
        check_inputs_exist(input)
        found = False
        for arch in ArchName:
            history_file = Path(input) / f"{arch.value}_history.csv"
            if history_file.exists():
                plot_history(History.from_csv(history_file), arch.display, Path(out), dpi)
                found = True
        metrics_file = Path(input) / METRICS_JSON
        if metrics_file.exists():
            plot_metrics(Report.from_json(metrics_file), Path(out), dpi)
            found = True
        if not found:
            logger.warning(f"Nothing to plot in {input}")

    # end floodlab
    end_floodlab(start_time, "plot")


def main():
    """
    Entry point. Usage errors exit 1, a failed stage exits 2.
    """
    try:
        main_cli(standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        sys.exit(1)
    except click.ClickException as e:
        e.show()
        sys.exit(1)


if __name__ == "__main__":
    main()
