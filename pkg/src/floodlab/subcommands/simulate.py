#!/usr/bin/env python3

import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List

from loguru import logger

from floodlab.simcore.config import ScenarioConfig
from floodlab.simcore.engine import Simulation
from floodlab.simcore.topology import build_topology
from floodlab.telemetry.records import export_csv


def result_name(config: ScenarioConfig) -> str:
    return f"{config.scenario.value}_{config.seed}"


def simulate_one(config: ScenarioConfig, output: Path, trace: bool, dump_network: bool) -> Dict[str, Any]:
    """
    Run one scenario replication and write its files.

    Args:
        config (ScenarioConfig): Scenario, seed and network parameters.
        output (Path): Output directory.
        trace (bool): Also write the per-packet trace as NDJSON.
        dump_network (bool): Also write the network configuration JSON.

    Returns:
        Dict[str, Any]: The run summary plus the result file and trace digest.
    """
    config.validate()
    topology = build_topology(config)
    simulation = Simulation(config, topology)
    log = simulation.run()
    name = result_name(config)
    csv_path = Path(output) / f"{name}.csv"
    export_csv(simulation.records, csv_path)
    if trace:
        log.to_ndjson(Path(output) / f"{name}_trace.ndjson")
    if dump_network:
        with open(Path(output) / f"network_{name}.json", "w") as f:
            json.dump(topology.describe(), f, indent=2)
    summary = log.summary()
    summary.update(
        {
            "scenario": config.scenario.value,
            "seed": config.seed,
            "records": len(simulation.records),
            "csv": str(csv_path),
            "digest": log.digest(),
            "conservation": log.conservation_holds(),
        }
    )
    return summary


def subcommand_simulate(
    configs: List[ScenarioConfig],
    output: Path,
    threads: int,
    trace: bool,
    dump_network: bool,
) -> List[Dict[str, Any]]:
    """
    Wrapper command for floodlab simulate. Runs every configuration, in parallel when threads > 1.

    Args:
        configs (List[ScenarioConfig]): One entry per scenario replication.
        output (Path): Output directory path.
        threads (int): Number of worker processes.
        trace (bool): Write per-packet traces.
        dump_network (bool): Write network configuration dumps.

    Returns:
        List[Dict[str, Any]]: Run summaries in the order of configs.
    """
    for config in configs:
        config.validate()
        logger.info(
            f"Simulating {config.scenario.value} scenario seed {config.seed}: "
            f"{config.n_ue} UEs, {config.n_hosts} hosts, {config.duration_s} s"
        )

    if threads > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            futures = [
                executor.submit(simulate_one, config, output, trace, dump_network) for config in configs
            ]
            summaries = [future.result() for future in futures]
    else:
        summaries = [simulate_one(config, output, trace, dump_network) for config in configs]

    for summary in summaries:
        logger.info(
            f"{summary['scenario']} seed {summary['seed']}: sent {summary['sent']}, "
            f"delivered {summary['delivered']}, dropped {summary['dropped']}, "
            f"in flight {summary['in_flight']}, ping delivery ratio {summary['ping_delivery_ratio']:.4f}, "
            f"mean ping RTT {summary['mean_ping_rtt_s'] * 1000:.3f} ms"
        )
        logger.info(f"Wrote {summary['records']} records to {summary['csv']}")
        if not summary["conservation"]:
            logger.warning(f"{summary['scenario']} seed {summary['seed']}: packet conservation does not hold")

    return summaries
