"""
Point-to-point links with one FIFO drop-tail queue per direction.

Transmission is analytic: a packet leaves the queue once every packet ahead
of it has been serialised, so the departure time is known at enqueue.
"""

from dataclasses import dataclass, field
from typing import List, NamedTuple, Union

from floodlab.simcore.topology import Link, NodeId
from floodlab.utils.exceptions import DataError


@dataclass
class LinkChannel:
    """One direction of a link."""

    src: NodeId
    dst: NodeId
    capacity: int
    busy_until: float = 0.0
    occupancy: int = 0


@dataclass
class LinkState:
    link: Link
    channels: List[LinkChannel] = field(default_factory=list)

    def __post_init__(self):
        if not self.channels:
            self.channels = [
                LinkChannel(self.link.a, self.link.b, self.link.queue_capacity_pkts),
                LinkChannel(self.link.b, self.link.a, self.link.queue_capacity_pkts),
            ]


class Transmission(NamedTuple):
    departure_time: float
    arrival_time: float
    # packets in the queue before this one joined
    queue_length: int


class Drop(NamedTuple):
    time: float
    node: NodeId


def serialization_time(size_bytes: int, bandwidth_bps: float) -> float:
    return size_bytes * 8 / bandwidth_bps


def link_transmit(
    state: LinkState, direction: int, size_bytes: int, now: float
) -> Union[Transmission, Drop]:
    """
    Offer a packet to one direction of a link.

    Args:
        state (LinkState): The link and its two queues.
        direction (int): 0 for a -> b, 1 for b -> a.
        size_bytes (int): Packet size.
        now (float): Current simulation time.

    Returns:
        Union[Transmission, Drop]: Departure and arrival times, or a drop at the sending node.
    """
    if size_bytes <= 0:
        raise DataError(f"packet size must be positive, got {size_bytes}")
    channel = state.channels[direction]
    if channel.occupancy >= channel.capacity:
        return Drop(now, channel.src)
    link = state.link
    queue_length = channel.occupancy
    departure = max(now, channel.busy_until) + serialization_time(size_bytes, link.bandwidth_bps)
    channel.busy_until = departure
    channel.occupancy += 1
    return Transmission(departure, departure + link.prop_delay_s, queue_length)


def queue_service(state: LinkState, direction: int) -> None:
    """The head packet finished serialisation and left the queue."""
    state.channels[direction].occupancy -= 1
