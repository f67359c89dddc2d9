"""Per-neighbor link-quality state machines.

Two algorithms share one :class:`LinkEntry` record:

* loss-based hysteresis: quality rises on every received Hello and decays on
  every missed one;
* signal-based hysteresis: quality follows the trend of the received signal
  strength near the edge of radio range, so a receding neighbor is dropped
  before its Hellos stop arriving.

Every transition is a pure function ``(entry, input, params) -> (entry, event)``.
The caller owns the neighbor table.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class LinkStatus(str, enum.Enum):
    PENDING = "Pending"
    VALID = "Valid"
    INVALID = "Invalid"


class EventKind(str, enum.Enum):
    VALIDATED = "Validated"
    INVALIDATED = "Invalidated"
    NO_CHANGE = "NoChange"


@dataclass(frozen=True)
class LinkEvent:
    kind: EventKind
    neighbor: int
    t: float | None = None

    @property
    def changed(self) -> bool:
        return self.kind is not EventKind.NO_CHANGE


def _check_band(high: float, low: float, initial: float) -> None:
    if not 0.0 < high <= 1.0:
        raise ValueError("hyst_threshold_high must be in (0, 1]")
    if not 0.0 <= low < 1.0:
        raise ValueError("hyst_threshold_low must be in [0, 1)")
    if not low < high:
        raise ValueError("hyst_threshold_low must be < hyst_threshold_high")
    if not 0.0 <= initial <= 1.0:
        raise ValueError("initial_quality must be in [0, 1]")


@dataclass(frozen=True)
class LossHysteresisParams:
    hyst_threshold_high: float = 0.8
    hyst_threshold_low: float = 0.3
    hyst_scaling: float = 0.5
    initial_quality: float = 0.5

    def __post_init__(self):
        _check_band(self.hyst_threshold_high, self.hyst_threshold_low, self.initial_quality)
        if not 0.0 < self.hyst_scaling < 1.0:
            raise ValueError("hyst_scaling must be in (0, 1)")


class SignalMode(str, enum.Enum):
    # literal pseudocode: every Hello at or below the high threshold goes through the trend rule
    PSEUDOCODE = "pseudocode"
    # three bands: punish below the low threshold, trend rule between, reward above
    PROSE = "prose"


@dataclass(frozen=True)
class SignalHysteresisParams:
    ss_threshold_low: float  # dBm
    ss_threshold_high: float  # dBm
    hyst_ss_scaling: float = 0.5
    delta: float = 2.0  # dB
    hyst_threshold_high: float = 0.8
    hyst_threshold_low: float = 0.3
    initial_quality: float = 0.5
    mode: SignalMode = SignalMode.PSEUDOCODE

    def __post_init__(self):
        _check_band(self.hyst_threshold_high, self.hyst_threshold_low, self.initial_quality)
        if not (math.isfinite(self.ss_threshold_low) and math.isfinite(self.ss_threshold_high)):
            raise ValueError("signal thresholds must be finite")
        if not self.ss_threshold_low < self.ss_threshold_high:
            raise ValueError("ss_threshold_low must be < ss_threshold_high")
        if not 0.0 < self.hyst_ss_scaling < 1.0:
            raise ValueError("hyst_ss_scaling must be in (0, 1)")
        if not self.delta > 0:
            raise ValueError("delta must be > 0")


@dataclass(frozen=True)
class LinkEntry:
    neighbor: int
    link_quality: float
    pending: bool = True
    sum_sig_var: float = 0.0  # dB
    last_ss: float | None = None  # dBm, None before the first Hello
    last_hello_time: float = 0.0
    symmetric: bool = False
    status: LinkStatus = LinkStatus.PENDING

    @property
    def usable(self) -> bool:
        """Whether the link may carry routed traffic."""
        return self.status is LinkStatus.VALID and self.symmetric


class DuplicateEntryError(KeyError):
    pass


def create_entry(neighbor: int, params, now: float = 0.0, table: dict | None = None) -> LinkEntry:
    """Fresh pending entry; ``table`` (if given) is checked for an existing one."""
    if table is not None and neighbor in table:
        raise DuplicateEntryError(f"entry for neighbor {neighbor} already exists")
    return LinkEntry(neighbor=neighbor, link_quality=params.initial_quality, last_hello_time=now)


def status_update(e: LinkEntry, p, now: float | None = None) -> tuple[LinkEntry, LinkEvent]:
    """Apply the two-threshold rule after a quality change (both bounds closed)."""
    q = e.link_quality
    if q >= p.hyst_threshold_high and e.status is not LinkStatus.VALID:
        e = replace(e, status=LinkStatus.VALID, pending=False, sum_sig_var=0.0)
        return e, LinkEvent(EventKind.VALIDATED, e.neighbor, now)
    if q <= p.hyst_threshold_low and e.status is LinkStatus.VALID:
        e = replace(e, status=LinkStatus.INVALID, pending=True, sum_sig_var=0.0)
        return e, LinkEvent(EventKind.INVALIDATED, e.neighbor, now)
    return e, LinkEvent(EventKind.NO_CHANGE, e.neighbor, now)


def _reward(q: float, scaling: float) -> float:
    return (1.0 - scaling) * q + scaling


def _punish(q: float, scaling: float) -> float:
    return scaling * q


def loss_on_hello(e: LinkEntry, p: LossHysteresisParams, now: float | None = None):
    e = replace(e, link_quality=_reward(e.link_quality, p.hyst_scaling))
    if now is not None:
        e = replace(e, last_hello_time=now)
    return status_update(e, p, now)


def loss_on_miss(e: LinkEntry, p: LossHysteresisParams, now: float | None = None):
    """A Hello was expected but none arrived."""
    e = replace(e, link_quality=(1.0 - p.hyst_scaling) * e.link_quality)
    return status_update(e, p, now)


def signal_on_hello(
    e: LinkEntry, ss: float, p: SignalHysteresisParams, now: float | None = None
) -> tuple[LinkEntry, LinkEvent]:
    """Update an existing entry from a Hello received at strength ``ss`` dBm.

    A strong Hello is always rewarded. Otherwise the signed change in signal
    strength since the previous Hello is accumulated: a valid link whose
    signal has dropped by ``delta`` dB in total is punished, a pending link
    whose signal has risen by ``delta`` dB is rewarded (capped at the
    validation threshold). The accumulator keeps running across Hellos until
    it triggers or the link changes status.
    """
    if not math.isfinite(ss):
        raise ValueError(f"signal strength must be finite, got {ss}")
    q = e.link_quality
    acc = e.sum_sig_var
    s = p.hyst_ss_scaling
    variation = 0.0 if e.last_ss is None else ss - e.last_ss

    if ss > p.ss_threshold_high:
        q = _reward(q, s)
    elif p.mode is SignalMode.PROSE and ss < p.ss_threshold_low:
        q = _punish(q, s)
    elif p.mode is SignalMode.PROSE:
        acc += variation
        if acc >= p.delta:
            q = _reward(q, s)
            if e.pending:
                q = min(p.hyst_threshold_high, q)
            acc = 0.0
        elif acc <= -p.delta:
            q = _punish(q, s)
            acc = 0.0
    elif not e.pending:
        acc -= variation
        if acc >= p.delta:
            q = _punish(q, s)
            acc = 0.0
    else:
        acc += variation
        if acc >= p.delta:
            q = min(p.hyst_threshold_high, _reward(q, s))
            acc = 0.0

    e = replace(e, link_quality=q, sum_sig_var=acc, last_ss=ss)
    if now is not None:
        e = replace(e, last_hello_time=now)
    return status_update(e, p, now)


def on_hello_miss_signal(e: LinkEntry, p: SignalHysteresisParams, now: float | None = None):
    """Liveness fallback: a silent neighbor decays exactly as in the loss scheme."""
    e = replace(e, link_quality=(1.0 - p.hyst_ss_scaling) * e.link_quality)
    return status_update(e, p, now)


class Expiry(enum.Enum):
    KEEP = "keep"
    REMOVE = "remove"


def expire_entry(e: LinkEntry, now: float, hold_time: float) -> Expiry:
    return Expiry.REMOVE if now - e.last_hello_time > hold_time else Expiry.KEEP
