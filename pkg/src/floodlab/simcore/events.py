"""
Event queue for the discrete-event loop.

Events are ordered by (time, seq); seq is assigned when an event is
scheduled, so simultaneous events pop in the order they were inserted.
"""

import heapq
import itertools
from enum import Enum
from typing import Any, List, NamedTuple

from floodlab.utils.exceptions import SchedulingError

UNSCHEDULED = -1


class EventKind(str, Enum):
    APP_SEND = "app_send"
    LINK_ARRIVAL = "link_arrival"
    QUEUE_SERVICE = "queue_service"


class Event(NamedTuple):
    time: float
    seq: int
    kind: EventKind
    payload: Any = None


class EventQueue:
    def __init__(self):
        self._heap: List[Event] = []
        self._seq = itertools.count()
        self.now = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def new_event(self, time: float, kind: EventKind, payload: Any = None) -> Event:
        """An unscheduled event; its seq is -1 until schedule() numbers it."""
        return Event(time, UNSCHEDULED, kind, payload)

    def push(self, time: float, kind: EventKind, payload: Any = None) -> Event:
        """Create an event and schedule it."""
        return schedule(self, self.new_event(time, kind, payload))

    def peek(self) -> Event:
        return self._heap[0]

    def pop(self) -> Event:
        """Remove the earliest event and advance the clock to it."""
        event = heapq.heappop(self._heap)
        self.now = event.time
        return event


def schedule(queue: EventQueue, event: Event) -> Event:
    """
    Insert an event into the queue.

    Args:
        queue (EventQueue): The queue.
        event (Event): Event created by queue.new_event.

    Returns:
        Event: The event as queued, numbered after everything scheduled before it.

    Raises:
        SchedulingError: The event lies before the queue's current time.
    """
    if event.time < queue.now:
        raise SchedulingError(
            f"event {event.kind.value} at t={event.time} is before the current time t={queue.now}"
        )
    event = event._replace(seq=next(queue._seq))
    heapq.heappush(queue._heap, event)
    return event
