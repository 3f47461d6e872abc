from floodlab.simcore.config import LinkParams, Scenario, ScenarioConfig
from floodlab.simcore.engine import Simulation, run, simulate
from floodlab.simcore.events import Event, EventKind, EventQueue, schedule
from floodlab.simcore.topology import NodeId, NodeKind, Topology, build_topology
from floodlab.simcore.trace import TraceLog

__all__ = [
    "Event",
    "EventKind",
    "EventQueue",
    "LinkParams",
    "NodeId",
    "NodeKind",
    "Scenario",
    "ScenarioConfig",
    "Simulation",
    "Topology",
    "TraceLog",
    "build_topology",
    "run",
    "schedule",
    "simulate",
]
