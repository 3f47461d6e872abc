"""
Traffic sources: echo (ping) applications on the UEs and UDP flood
applications on the hosts.
"""

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Tuple

import numpy as np

from floodlab.simcore.topology import NodeId


class PacketKind(str, Enum):
    PING_REQUEST = "ping_request"
    PING_REPLY = "ping_reply"
    FLOOD = "flood"
    ICMP_ERROR = "icmp_error"


@dataclass
class Packet:
    """
    An abstract datagram.

    Attributes:
        reply_to: Where a response goes; the source unless a flood spoofs it.
        request_sent_at: Creation time of the echo request a reply answers.
        path: Node indices from src to dst, set when the packet is originated.
        hop: Position of the node currently holding the packet within path.
    """

    id: int
    src: NodeId
    dst: NodeId
    size_bytes: int
    created_at: float
    kind: PacketKind
    reply_to: Optional[NodeId] = None
    request_sent_at: Optional[float] = None
    path: Tuple[int, ...] = ()
    hop: int = 0

    def __post_init__(self):
        if self.reply_to is None:
            self.reply_to = self.src


def packet_ids() -> Iterator[int]:
    return itertools.count()


@dataclass
class PingAppState:
    node: NodeId
    peers: List[NodeId]
    size_bytes: int
    interval_s: float
    ids: Iterator[int] = field(default_factory=packet_ids)
    sent: int = 0


def ping_app_next(
    state: PingAppState, now: float, rng: np.random.Generator
) -> Tuple[Packet, float]:
    """
    Emit one echo request to a random peer UE.

    Args:
        state (PingAppState): The sending UE's application.
        now (float): Current simulation time.
        rng (np.random.Generator): Run generator; the peer is uniform over the other UEs.

    Returns:
        Tuple[Packet, float]: The request and the time of the next send.
    """
    choice = int(rng.integers(len(state.peers) - 1))
    # skip over ourselves
    if choice >= state.node.ordinal:
        choice += 1
    peer = state.peers[choice]
    packet = Packet(
        next(state.ids), state.node, peer, state.size_bytes, now, PacketKind.PING_REQUEST
    )
    state.sent += 1
    return packet, now + state.interval_s


def ping_reply(request: Packet, packet_id: int, now: float) -> Packet:
    """Echo reply of the same size, sent back to the requester."""
    return Packet(
        packet_id,
        request.dst,
        request.reply_to,
        request.size_bytes,
        now,
        PacketKind.PING_REPLY,
        request_sent_at=request.created_at,
    )


def icmp_unreachable(datagram: Packet, packet_id: int, now: float, size_bytes: int) -> Packet:
    """Port-unreachable error for a datagram nobody listens for."""
    return Packet(
        packet_id,
        datagram.dst,
        datagram.reply_to,
        size_bytes,
        now,
        PacketKind.ICMP_ERROR,
    )


@dataclass
class FloodAppState:
    node: NodeId
    targets: List[NodeId]
    size_bytes: int
    interval_s: float
    max_sends: int
    spoof_source: bool = False
    ids: Iterator[int] = field(default_factory=packet_ids)
    sent: int = 0
    next_target: int = 0

    @property
    def remaining(self) -> int:
        return self.max_sends - self.sent


def flood_send_count(duration_s: float, interval_s: float) -> int:
    """Number of sends at t = 0, interval, 2 interval, ... strictly before duration_s."""
    return math.floor(duration_s / interval_s + 1e-9)


def flood_app_next(state: FloodAppState, now: float) -> Tuple[Packet, float]:
    """
    Emit one flood datagram toward the next UE in round-robin order.

    Args:
        state (FloodAppState): The sending host's application.
        now (float): Current simulation time.

    Returns:
        Tuple[Packet, float]: The datagram and the time of the next send.
    """
    n_targets = len(state.targets)
    target = state.targets[state.next_target]
    reply_to = state.node
    if state.spoof_source:
        reply_to = state.targets[(state.next_target + 1) % n_targets]
    packet = Packet(
        next(state.ids),
        state.node,
        target,
        state.size_bytes,
        now,
        PacketKind.FLOOD,
        reply_to=reply_to,
    )
    state.next_target = (state.next_target + 1) % n_targets
    state.sent += 1
    # multiples of the interval, not repeated addition
    return packet, state.sent * state.interval_s
