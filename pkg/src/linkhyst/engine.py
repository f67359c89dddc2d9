"""Deterministic discrete-event scheduler and seeded random streams."""

from __future__ import annotations

import enum
import hashlib
import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable


class SchedulingError(ValueError):
    """Raised when an event would be scheduled before the current time."""


class EventKind(str, enum.Enum):
    HELLO_EMIT = "HelloEmit"
    TC_EMIT = "TcEmit"
    DELIVERY = "Delivery"
    HELLO_MISS_CHECK = "HelloMissCheck"
    TRAFFIC_GEN = "TrafficGen"
    METRICS_SNAPSHOT = "MetricsSnapshot"


class CancelOutcome(enum.Enum):
    CANCELLED = "cancelled"
    ALREADY_FIRED = "already_fired"
    ALREADY_CANCELLED = "already_cancelled"


@dataclass(order=True)
class Event:
    fire_at: float
    seq: int
    kind: EventKind = field(compare=False)
    action: Callable[..., Any] | None = field(default=None, compare=False, repr=False)
    args: tuple = field(default=(), compare=False)
    node: int | None = field(default=None, compare=False)
    cancelled: bool = field(default=False, compare=False)
    fired: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class EventHandle:
    event: Event

    @property
    def pending(self) -> bool:
        return not (self.event.fired or self.event.cancelled)


class EventQueue:
    """Priority queue of events ordered by ``(fire_at, seq)``.

    Handlers may schedule further events while being dispatched; those are
    honored by the same :meth:`run_until` call when they fall inside its
    horizon.
    """

    def __init__(self, start: float = 0.0):
        self._heap: list[Event] = []
        self._seq = 0
        self._now = float(start)
        self.dispatched = 0

    @property
    def now(self) -> float:
        return self._now

    def __len__(self) -> int:
        return sum(1 for e in self._heap if not e.cancelled)

    def schedule(
        self,
        fire_at: float,
        kind: EventKind,
        action: Callable[..., Any] | None = None,
        *args: Any,
        node: int | None = None,
    ) -> EventHandle:
        fire_at = float(fire_at)
        if not math.isfinite(fire_at):
            raise SchedulingError(f"non-finite fire time {fire_at!r}")
        if fire_at < self._now:
            raise SchedulingError(
                f"cannot schedule {kind.value} at t={fire_at} before now={self._now}"
            )
        ev = Event(fire_at, self._seq, kind, action, args, node)
        self._seq += 1
        heapq.heappush(self._heap, ev)
        return EventHandle(ev)

    def cancel(self, handle: EventHandle) -> CancelOutcome:
        ev = handle.event
        if ev.fired:
            return CancelOutcome.ALREADY_FIRED
        if ev.cancelled:
            return CancelOutcome.ALREADY_CANCELLED
        ev.cancelled = True
        return CancelOutcome.CANCELLED

    def run_until(self, t_end: float, observer: Callable[[Event], None] | None = None) -> int:
        """Dispatch every pending event with ``fire_at <= t_end``; return the count."""
        if t_end < self._now:
            raise SchedulingError(f"t_end={t_end} is before now={self._now}")
        count = 0
        heap = self._heap
        while heap and heap[0].fire_at <= t_end:
            ev = heapq.heappop(heap)
            if ev.cancelled:
                continue
            self._now = ev.fire_at
            ev.fired = True
            if observer is not None:
                observer(ev)
            if ev.action is not None:
                ev.action(*ev.args)
            count += 1
        self._now = float(t_end)
        self.dispatched += count
        return count


def derive_seed(seed: int, purpose: str, node: int = 0) -> int:
    """Stable 64-bit seed for the substream ``(seed, purpose, node)``."""
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    digest = hashlib.sha256(f"{seed}/{purpose}/{node}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


class RngStreams:
    """Independent MT19937 substreams keyed by purpose and node.

    Each ``(purpose, node)`` pair gets its own generator, so adding draws for
    one purpose never shifts the sequence seen by another.
    """

    algorithm = "MT19937"

    def __init__(self, seed: int):
        self.seed = int(seed)
        derive_seed(self.seed, "check")
        self._streams: dict[tuple[str, int], random.Random] = {}

    def stream(self, purpose: str, node: int = 0) -> random.Random:
        key = (purpose, node)
        rng = self._streams.get(key)
        if rng is None:
            rng = random.Random(derive_seed(self.seed, purpose, node))
            self._streams[key] = rng
        return rng
