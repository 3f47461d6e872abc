"""
Discrete-event loop executing one scenario on one topology.
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from floodlab.simcore.apps import (
    FloodAppState,
    Packet,
    PacketKind,
    PingAppState,
    flood_app_next,
    flood_send_count,
    icmp_unreachable,
    packet_ids,
    ping_app_next,
    ping_reply,
)
from floodlab.simcore.config import Scenario, ScenarioConfig
from floodlab.simcore.events import EventKind, EventQueue
from floodlab.simcore.links import Drop, LinkState, link_transmit, queue_service
from floodlab.simcore.topology import NodeId, NodeKind, Topology, build_topology
from floodlab.simcore.trace import NodeCounters, PacketOutcome, QueueStats, TraceLog
from floodlab.telemetry.records import StatRecord
from floodlab.telemetry.registry import StatRegistry, finalize, record_sample, record_scalar

# statistic names
PKT_SENT = "pktSent"
PKT_RECEIVED = "pktReceived"
PKT_DROPPED = "pktDropped"
END_TO_END_DELAY = "endToEndDelay"
RTT = "rtt"
QUEUE_LENGTH = "queueLength"
# delay histograms cover [0, 1 s)
DELAY_RANGE = (0.0, 1.0)


def recording_nodes(topology: Topology) -> List[NodeId]:
    """Nodes that record statistics; the backgroundCell is topology only."""
    return [n for n in topology.nodes if n.kind is not NodeKind.BACKGROUND_CELL]


class Simulation:
    """
    One run of a scenario.

    Args:
        config (ScenarioConfig): Scenario, counts, traffic and link parameters.
        topology (Optional[Topology]): Prebuilt topology; built from config if omitted.

    Usage:
        sim = Simulation(config)
        trace = sim.run()
        records = sim.records
    """

    def __init__(self, config: ScenarioConfig, topology: Optional[Topology] = None):
        self.config = config.validate()
        self.topology = topology if topology is not None else build_topology(config)
        self.label = config.label
        self.queue = EventQueue()
        self.rng = np.random.default_rng(config.seed)
        self.ids = packet_ids()
        self.links = [LinkState(link) for link in self.topology.links]
        self.records: List[StatRecord] = []
        self.end_time = config.duration_s + config.drain_s

        self._recording = recording_nodes(self.topology)
        n_nodes = len(self.topology.nodes)
        self._outcomes: List[PacketOutcome] = []
        self._counters = [NodeCounters() for _ in range(n_nodes)]
        self._queue_stats: Dict[str, QueueStats] = {}
        self._ping_rtts: List[float] = []
        self._events = 0
        # per-window counters
        self._win_sent = [0] * n_nodes
        self._win_received = [0] * n_nodes
        self._win_dropped = [0] * n_nodes
        self._registry: Optional[StatRegistry] = None
        self._windows = max(1, math.ceil(config.duration_s / config.record_interval_s - 1e-9))
        self._window = 0
        self._ran = False

    # names of the output queue statistics, per (node, interface)
    def _queue_module(self, node: NodeId, iface: int) -> str:
        return f"{node.module}.queue[{iface}]"

    def _open_window(self) -> None:
        reg = StatRegistry()
        cfg = self.config
        for node in self._recording:
            for iface, (_, link_index, _) in enumerate(self.topology.adjacency[node.index]):
                capacity = self.topology.links[link_index].queue_capacity_pkts
                reg.declare_histogram(self._queue_module(node, iface), QUEUE_LENGTH, 0.0, float(capacity))
            if node.kind is NodeKind.UE:
                reg.declare_histogram(f"{node.module}.pingApp", END_TO_END_DELAY, *DELAY_RANGE, unit="s")
                reg.declare_histogram(f"{node.module}.pingApp", RTT, *DELAY_RANGE, unit="s")
                reg.declare_histogram(f"{node.module}.udpSink", END_TO_END_DELAY, *DELAY_RANGE, unit="s")
            elif node.kind is NodeKind.HOST:
                reg.declare_histogram(f"{node.module}.udpApp", END_TO_END_DELAY, *DELAY_RANGE, unit="s")
        self._registry = reg
        n_nodes = len(self.topology.nodes)
        self._win_sent = [0] * n_nodes
        self._win_received = [0] * n_nodes
        self._win_dropped = [0] * n_nodes
        logger.trace(f"Opened statistics window {self._window} ({cfg.scenario.value})")

    def _close_window(self) -> None:
        reg = self._registry
        for node in self._recording:
            record_scalar(reg, node.module, PKT_SENT, self._win_sent[node.index])
            record_scalar(reg, node.module, PKT_RECEIVED, self._win_received[node.index])
            record_scalar(reg, node.module, PKT_DROPPED, self._win_dropped[node.index])
        self.records.extend(finalize(reg, self.label))
        self._registry = None
        self._window += 1

    def _sample(self, module: str, name: str, x: float) -> None:
        record_sample(self._registry, module, name, x)

    def _start_apps(self) -> None:
        cfg = self.config
        ues = self.topology.ues
        # UEs ping in both scenarios
        for ue in ues:
            state = PingAppState(ue, ues, cfg.ping_size_bytes, cfg.ping_interval_s, ids=self.ids)
            start = float(self.rng.uniform(0.0, cfg.ping_interval_s))
            if start < cfg.duration_s:
                self.queue.push(start, EventKind.APP_SEND, state)
        if cfg.scenario is Scenario.DDOS:
            max_sends = flood_send_count(cfg.duration_s, cfg.flood_interval_s)
            for host in self.topology.hosts:
                state = FloodAppState(
                    host,
                    ues,
                    cfg.flood_size_bytes,
                    cfg.flood_interval_s,
                    max_sends,
                    spoof_source=cfg.flood_spoof_source,
                    ids=self.ids,
                    next_target=host.ordinal % len(ues),
                )
                if max_sends > 0:
                    self.queue.push(0.0, EventKind.APP_SEND, state)

    def run(self) -> TraceLog:
        """
        Execute the scenario until duration_s + drain_s.

        Returns:
            TraceLog: Packet outcomes and counters. Records are left in self.records.
        """
        if self._ran:
            raise RuntimeError("a Simulation can only be run once")
        self._ran = True
        cfg = self.config
        logger.info(
            f"Simulating {cfg.scenario.value} scenario with {cfg.n_ue} UEs and {cfg.n_hosts} hosts "
            f"for {cfg.duration_s} s (seed {cfg.seed})"
        )
        self._open_window()
        self._start_apps()
        next_boundary = self._boundary(1)
        queue = self.queue
        while queue:
            if queue.peek().time > self.end_time:
                break
            event = queue.pop()
            while self._window < self._windows - 1 and event.time >= next_boundary:
                self._close_window()
                self._open_window()
                next_boundary = self._boundary(self._window + 1)
            self._events += 1
            if event.kind is EventKind.LINK_ARRIVAL:
                packet, node_index = event.payload
                self._arrive(packet, node_index, event.time)
            elif event.kind is EventKind.QUEUE_SERVICE:
                link_state, direction = event.payload
                queue_service(link_state, direction)
            else:
                self._app_send(event.payload, event.time)
        while self._window < self._windows:
            self._close_window()
            if self._window < self._windows:
                self._open_window()
        return self._trace()

    def _boundary(self, k: int) -> float:
        return k * self.config.record_interval_s

    def _app_send(self, state, now: float) -> None:
        if isinstance(state, PingAppState):
            packet, next_time = ping_app_next(state, now, self.rng)
            self._originate(packet, now)
            if next_time < self.config.duration_s:
                self.queue.push(next_time, EventKind.APP_SEND, state)
        else:
            packet, next_time = flood_app_next(state, now)
            self._originate(packet, now)
            if state.remaining > 0:
                self.queue.push(next_time, EventKind.APP_SEND, state)

    def _originate(self, packet: Packet, now: float) -> None:
        packet.path = self.topology.path(packet.src.index, packet.dst.index)
        self._outcomes.append(
            PacketOutcome(
                packet.id,
                packet.kind.value,
                packet.src.module,
                packet.dst.module,
                packet.size_bytes,
                now,
            )
        )
        self._counters[packet.src.index].sent += 1
        self._forward(packet, packet.src.index, now)

    def _forward(self, packet: Packet, node_index: int, now: float) -> None:
        next_node = packet.path[packet.hop + 1]
        link_index, direction, iface = self.topology.interface(node_index, next_node)
        link_state = self.links[link_index]
        self._win_sent[node_index] += 1
        result = link_transmit(link_state, direction, packet.size_bytes, now)
        node = self.topology.nodes[node_index]
        module = self._queue_module(node, iface)
        stats = self._queue_stats.get(module)
        if stats is None:
            stats = self._queue_stats[module] = QueueStats()
        if isinstance(result, Drop):
            stats.drops += 1
            self._drop(packet, node_index, now)
            return
        stats.sample(result.queue_length)
        self._sample(module, QUEUE_LENGTH, result.queue_length)
        self.queue.push(result.departure_time, EventKind.QUEUE_SERVICE, (link_state, direction))
        self.queue.push(result.arrival_time, EventKind.LINK_ARRIVAL, (packet, next_node))

    def _drop(self, packet: Packet, node_index: int, now: float) -> None:
        outcome = self._outcomes[packet.id]
        outcome.dropped_at = now
        outcome.drop_module = self.topology.nodes[node_index].module
        outcome.hops = packet.hop
        self._counters[node_index].queue_drops += 1
        self._counters[packet.src.index].dropped += 1
        self._win_dropped[node_index] += 1
        if packet.src.index != node_index:
            self._win_dropped[packet.src.index] += 1

    def _arrive(self, packet: Packet, node_index: int, now: float) -> None:
        self._win_received[node_index] += 1
        packet.hop += 1
        if node_index == packet.dst.index:
            self._deliver(packet, now)
        else:
            self._forward(packet, node_index, now)

    def _deliver(self, packet: Packet, now: float) -> None:
        outcome = self._outcomes[packet.id]
        outcome.delivered_at = now
        outcome.hops = packet.hop
        self._counters[packet.src.index].delivered += 1
        self._counters[packet.dst.index].received += 1
        receiver = packet.dst
        delay = now - packet.created_at
        kind = packet.kind
        if kind is PacketKind.PING_REQUEST:
            self._sample(f"{receiver.module}.pingApp", END_TO_END_DELAY, delay)
            self._originate(ping_reply(packet, next(self.ids), now), now)
        elif kind is PacketKind.PING_REPLY:
            rtt = now - packet.request_sent_at
            self._sample(f"{receiver.module}.pingApp", END_TO_END_DELAY, delay)
            self._sample(f"{receiver.module}.pingApp", RTT, rtt)
            self._ping_rtts.append(rtt)
        elif kind is PacketKind.FLOOD:
            self._sample(f"{receiver.module}.udpSink", END_TO_END_DELAY, delay)
            if self.config.icmp_unreachable and packet.reply_to != receiver:
                error = icmp_unreachable(packet, next(self.ids), now, self.config.icmp_size_bytes)
                self._originate(error, now)
        elif receiver.kind is NodeKind.HOST:
            self._sample(f"{receiver.module}.udpApp", END_TO_END_DELAY, delay)

    def _trace(self) -> TraceLog:
        counters = {
            node.module: self._counters[node.index] for node in self.topology.nodes
        }
        return TraceLog(
            outcomes=tuple(self._outcomes),
            counters=counters,
            queues=dict(sorted(self._queue_stats.items())),
            ping_rtts=tuple(self._ping_rtts),
            end_time=min(self.queue.now, self.end_time),
            events_processed=self._events,
        )


def run(config: ScenarioConfig) -> TraceLog:
    """
    Run a scenario and return its trace.

    Raises:
        TopologyError: The configured network is invalid.
    """
    return Simulation(config).run()


def simulate(config: ScenarioConfig) -> Tuple[TraceLog, List[StatRecord]]:
    """Run a scenario and return its trace and its statistic records."""
    sim = Simulation(config)
    trace = sim.run()
    return trace, sim.records
