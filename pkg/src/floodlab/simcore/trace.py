"""
Packet-level outcome of a simulation run.
"""

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from floodlab.utils.exceptions import FloodlabError


@dataclass
class PacketOutcome:
    packet_id: int
    kind: str
    src: str
    dst: str
    size_bytes: int
    sent_at: float
    delivered_at: Optional[float] = None
    dropped_at: Optional[float] = None
    drop_module: Optional[str] = None
    hops: int = 0

    @property
    def status(self) -> str:
        if self.delivered_at is not None:
            return "delivered"
        if self.dropped_at is not None:
            return "dropped"
        return "in_flight"


@dataclass
class NodeCounters:
    """
    Per-node totals over the whole run.

    sent, delivered, dropped and in_flight count packets the node originated;
    received counts packets addressed to it that arrived; queue_drops counts
    losses at the node's own output queues.
    """

    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    received: int = 0
    queue_drops: int = 0

    @property
    def in_flight(self) -> int:
        return self.sent - self.delivered - self.dropped


@dataclass
class QueueStats:
    samples: int = 0
    total: int = 0
    peak: int = 0
    drops: int = 0

    def sample(self, length: int) -> None:
        self.samples += 1
        self.total += length
        if length > self.peak:
            self.peak = length

    @property
    def mean(self) -> float:
        return self.total / self.samples if self.samples else 0.0


@dataclass(frozen=True)
class TraceLog:
    """
    Immutable result of one run.

    Attributes:
        outcomes: One entry per originated packet, ordered by packet id.
        counters: Per node module.
        queues: Per output queue module.
        ping_rtts: Round-trip times of echo replies, in arrival order.
        end_time: Simulation time at which the loop stopped.
        events_processed: Number of events handled.
    """

    outcomes: Tuple[PacketOutcome, ...]
    counters: Dict[str, NodeCounters]
    queues: Dict[str, QueueStats]
    ping_rtts: Tuple[float, ...]
    end_time: float
    events_processed: int

    @property
    def sent(self) -> int:
        return len(self.outcomes)

    @property
    def delivered(self) -> int:
        return sum(1 for o in self.outcomes if o.delivered_at is not None)

    @property
    def dropped(self) -> int:
        return sum(1 for o in self.outcomes if o.dropped_at is not None)

    @property
    def in_flight(self) -> int:
        return self.sent - self.delivered - self.dropped

    def conservation_holds(self) -> bool:
        """sent = delivered + dropped + in flight, globally and for every node."""
        statuses = [o.status for o in self.outcomes]
        global_ok = self.sent == (
            statuses.count("delivered") + statuses.count("dropped") + statuses.count("in_flight")
        )
        per_node: Dict[str, List[int]] = {}
        for outcome in self.outcomes:
            totals = per_node.setdefault(outcome.src, [0, 0, 0])
            totals[0] += 1
            totals[1] += outcome.delivered_at is not None
            totals[2] += outcome.dropped_at is not None
        for module, counters in self.counters.items():
            sent, delivered, dropped = per_node.get(module, [0, 0, 0])
            if (counters.sent, counters.delivered, counters.dropped) != (sent, delivered, dropped):
                return False
            if counters.in_flight < 0:
                return False
        return global_ok

    def ping_delivery_ratio(self) -> float:
        """Delivered fraction of echo requests and replies that were delivered or dropped."""
        resolved = delivered = 0
        for outcome in self.outcomes:
            if outcome.kind not in ("ping_request", "ping_reply"):
                continue
            if outcome.delivered_at is not None:
                delivered += 1
                resolved += 1
            elif outcome.dropped_at is not None:
                resolved += 1
        return delivered / resolved if resolved else 1.0

    def mean_ping_rtt(self) -> float:
        return float(np.mean(self.ping_rtts)) if self.ping_rtts else float("nan")

    def summary(self) -> Dict[str, Any]:
        return {
            "sent": self.sent,
            "delivered": self.delivered,
            "dropped": self.dropped,
            "in_flight": self.in_flight,
            "ping_delivery_ratio": self.ping_delivery_ratio(),
            "mean_ping_rtt_s": self.mean_ping_rtt(),
            "events": self.events_processed,
        }

    def iter_lines(self) -> Iterator[str]:
        """One JSON document per packet outcome."""
        for outcome in self.outcomes:
            row = asdict(outcome)
            row["status"] = outcome.status
            yield json.dumps(row, sort_keys=True)

    def to_ndjson(self, path: Union[str, Path]) -> None:
        try:
            with open(path, "w") as handle:
                for line in self.iter_lines():
                    handle.write(line + "\n")
        except OSError as e:
            raise FloodlabError(f"could not write trace {path}: {e}") from e

    def digest(self) -> str:
        """sha256 over the serialised outcomes, counters and ping round trips."""
        sha = hashlib.sha256()
        for line in self.iter_lines():
            sha.update(line.encode())
            sha.update(b"\n")
        counters = {k: asdict(v) for k, v in sorted(self.counters.items())}
        sha.update(json.dumps(counters, sort_keys=True).encode())
        sha.update(json.dumps(list(self.ping_rtts)).encode())
        return sha.hexdigest()
