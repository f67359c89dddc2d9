"""Node trajectories and the chain-of-relays mobility scenario."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

from .radio import PropagationParams

if TYPE_CHECKING:
    from .routing import TimingParams

Position = tuple[float, float]


class ConfigError(ValueError):
    """Invalid configuration value; ``field`` is a dotted path like ``scenario.spacing``."""

    def __init__(self, field: str, reason: str, line: int | None = None):
        self.field = field
        self.reason = reason
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{field}: {reason}")


def kmh_to_ms(speed_kmh: float) -> float:
    return speed_kmh / 3.6


@dataclass(frozen=True)
class Static:
    position: Position

    def position_at(self, t: float) -> Position:
        return self.position


@dataclass(frozen=True)
class Linear:
    origin: Position
    velocity: tuple[float, float]
    start_time: float = 0.0

    def position_at(self, t: float) -> Position:
        dt = max(0.0, t - self.start_time)
        return (self.origin[0] + self.velocity[0] * dt, self.origin[1] + self.velocity[1] * dt)


Trajectory = Union[Static, Linear]


def position_at(tr: Trajectory, t: float) -> Position:
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    return tr.position_at(t)


def distance(a: Position, b: Position) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class ChainScenarioParams:
    n_static: int = 10
    spacing: float = 100.0  # m
    mobile_start_offset: float = 10.0  # m behind static node 0
    lateral_offset: float = 0.0  # m
    speed: float = 60.0  # km/h
    sim_padding: float = 10.0  # s

    def validate(self) -> None:
        if self.n_static < 2:
            raise ConfigError("scenario.n_static", "must be >= 2")
        if not self.spacing > 0:
            raise ConfigError("scenario.spacing", "must be > 0")
        if not self.mobile_start_offset >= 0:
            raise ConfigError("scenario.mobile_start_offset", "must be >= 0")
        if not math.isfinite(self.lateral_offset):
            raise ConfigError("scenario.lateral_offset", "must be finite")
        if not self.speed > 0 or not math.isfinite(self.speed):
            raise ConfigError("scenario.speed", "must be > 0")
        if not self.sim_padding >= 0:
            raise ConfigError("scenario.sim_padding", "must be >= 0")


@dataclass(frozen=True)
class TrafficParams:
    packets_per_second: float = 2.0
    payload_bytes: int = 512
    start_time: float = 5.0  # s, after routing has converged

    def validate(self) -> None:
        if not self.packets_per_second > 0:
            raise ConfigError("traffic.packets_per_second", "must be > 0")
        if self.payload_bytes <= 0:
            raise ConfigError("traffic.payload_bytes", "must be > 0")
        if not self.start_time >= 0:
            raise ConfigError("traffic.start_time", "must be >= 0")


@dataclass
class Scenario:
    trajectories: list[Trajectory]
    radio: PropagationParams
    timing: "TimingParams"
    traffic: TrafficParams
    source: int
    sink: int
    end_time: float
    names: list[str] = field(default_factory=list)

    @property
    def n_nodes(self) -> int:
        return len(self.trajectories)

    def position(self, node: int, t: float) -> Position:
        return self.trajectories[node].position_at(t)


def pass_time(p: ChainScenarioParams) -> float:
    """Seconds until the mobile is level with the last static node."""
    return ((p.n_static - 1) * p.spacing + p.mobile_start_offset) / kmh_to_ms(p.speed)


def build_chain_scenario(
    p: ChainScenarioParams,
    radio: PropagationParams,
    timing: "TimingParams",
    traffic: TrafficParams,
) -> Scenario:
    """Static relays at ``x = i * spacing``; the mobile (last node id) drives along +x.

    The mobile sends to static node 0. Node ids: ``0..n_static-1`` static,
    ``n_static`` mobile.
    """
    p.validate()
    traffic.validate()
    trajectories: list[Trajectory] = [Static((i * p.spacing, 0.0)) for i in range(p.n_static)]
    trajectories.append(
        Linear((-p.mobile_start_offset, p.lateral_offset), (kmh_to_ms(p.speed), 0.0))
    )
    names = [f"s{i}" for i in range(p.n_static)] + ["mobile"]
    return Scenario(
        trajectories=trajectories,
        radio=radio,
        timing=timing,
        traffic=traffic,
        source=p.n_static,
        sink=0,
        end_time=pass_time(p) + p.sim_padding,
        names=names,
    )
