"""Experiment configuration: INI-style file grammar, defaults and validation.

Grammar (parsed with :mod:`configparser`)::

    # comment
    [section]
    key = value

Sections and keys are fixed; anything unknown is an error. Lists are
comma-separated. ``seeds`` accepts either a list (``1, 2, 3``) or a count
(``8`` means seeds 1..8). Signal thresholds accept ``auto`` to derive them
from the radio range.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from typing import Any

from .adjacency import LossHysteresisParams, SignalHysteresisParams, SignalMode
from .mobility import ChainScenarioParams, ConfigError, TrafficParams
from .radio import PropagationModel, PropagationParams, deterministic_range, rx_power
from .routing import Algorithm, TimingParams


@dataclass(frozen=True)
class RadioSettings:
    model: PropagationModel = PropagationModel.TWO_RAY
    tx_power: float = 24.5
    frequency: float = 914e6
    antenna_gain_tx: float = 1.0
    antenna_gain_rx: float = 1.0
    antenna_height_tx: float = 1.5
    antenna_height_rx: float = 1.5
    system_loss: float = 1.0
    range_m: float = 250.0
    rx_threshold: float | None = None  # dBm; overrides range_m when set
    shadowing_sigma: float = 0.0
    bernoulli_loss_prob: float = 0.0

    def params(self) -> PropagationParams:
        base = PropagationParams(
            tx_power=self.tx_power,
            frequency=self.frequency,
            antenna_gain_tx=self.antenna_gain_tx,
            antenna_gain_rx=self.antenna_gain_rx,
            antenna_height_tx=self.antenna_height_tx,
            antenna_height_rx=self.antenna_height_rx,
            system_loss=self.system_loss,
            shadowing_sigma=self.shadowing_sigma,
            bernoulli_loss_prob=self.bernoulli_loss_prob,
            model=self.model,
        )
        if self.rx_threshold is not None:
            return replace(base, rx_threshold=self.rx_threshold)
        return base.with_range(self.range_m)


@dataclass(frozen=True)
class SignalSettings:
    ss_threshold_low: float | None = None  # dBm, None = power at low_range_fraction * range
    ss_threshold_high: float | None = None
    low_range_fraction: float = 1.0
    high_range_fraction: float = 0.6
    hyst_ss_scaling: float = 0.5
    delta: float = 2.0
    hyst_threshold_high: float = 0.8
    hyst_threshold_low: float = 0.3
    initial_quality: float = 0.5
    mode: SignalMode = SignalMode.PSEUDOCODE

    def params(self, radio: PropagationParams) -> SignalHysteresisParams:
        r_star = deterministic_range(radio)
        low = self.ss_threshold_low
        high = self.ss_threshold_high
        if low is None:
            low = rx_power(radio, self.low_range_fraction * r_star)
        if high is None:
            high = rx_power(radio, self.high_range_fraction * r_star)
        return SignalHysteresisParams(
            ss_threshold_low=low,
            ss_threshold_high=high,
            hyst_ss_scaling=self.hyst_ss_scaling,
            delta=self.delta,
            hyst_threshold_high=self.hyst_threshold_high,
            hyst_threshold_low=self.hyst_threshold_low,
            initial_quality=self.initial_quality,
            mode=self.mode,
        )


@dataclass(frozen=True)
class SweepSettings:
    speeds_kmh: tuple[float, ...] = (20.0, 40.0, 60.0, 80.0, 100.0)
    seeds: tuple[int, ...] = tuple(range(1, 9))
    algorithms: tuple[Algorithm, ...] = (Algorithm.LOSS, Algorithm.SIGNAL)
    jobs: int = 1


@dataclass(frozen=True)
class OutputSettings:
    path: str = "results.csv"
    figures: bool = True
    overhead_unit: str = "transmissions"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ChainScenarioParams = field(default_factory=ChainScenarioParams)
    radio: RadioSettings = field(default_factory=RadioSettings)
    timing: TimingParams = field(default_factory=TimingParams)
    algorithm: Algorithm = Algorithm.SIGNAL
    loss: LossHysteresisParams = field(default_factory=LossHysteresisParams)
    signal: SignalSettings = field(default_factory=SignalSettings)
    traffic: TrafficParams = field(default_factory=TrafficParams)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def propagation(self) -> PropagationParams:
        return self.radio.params()

    def signal_params(self) -> SignalHysteresisParams:
        return self.signal.params(self.propagation())

    def validate(self) -> "ExperimentConfig":
        self.scenario.validate()
        self.timing.validate()
        self.traffic.validate()
        radio = _wrap("radio", self.propagation)
        if not math.isfinite(self.radio.range_m) or self.radio.range_m <= 0:
            raise ConfigError("radio.range_m", "must be > 0")
        _wrap("signal", lambda: self.signal.params(radio))
        if not self.sweep.speeds_kmh:
            raise ConfigError("sweep.speeds_kmh", "must not be empty")
        for s in self.sweep.speeds_kmh:
            if not s > 0:
                raise ConfigError("sweep.speeds_kmh", f"speed {s} must be > 0")
        if not self.sweep.seeds:
            raise ConfigError("sweep.seeds", "must not be empty")
        for s in self.sweep.seeds:
            if not 0 <= s < 2**64:
                raise ConfigError("sweep.seeds", f"seed {s} must be a 64-bit unsigned integer")
        if self.sweep.jobs < 1:
            raise ConfigError("sweep.jobs", "must be >= 1")
        if self.output.overhead_unit not in ("transmissions", "bytes"):
            raise ConfigError("output.overhead_unit", "must be 'transmissions' or 'bytes'")
        return self


def _wrap(section: str, fn):
    try:
        return fn()
    except ConfigError:
        raise
    except ValueError as exc:
        msg = str(exc)
        name = msg.split(" ", 1)[0]
        raise ConfigError(f"{section}.{name}" if name.isidentifier() else section, msg) from None


# key in file -> (section attribute, field name, kind)
_SCHEMA: dict[str, dict[str, tuple[str, str]]] = {
    "scenario": {
        "n_static": ("n_static", "int"),
        "spacing_m": ("spacing", "float"),
        "mobile_start_offset_m": ("mobile_start_offset", "float"),
        "lateral_offset_m": ("lateral_offset", "float"),
        "speed_kmh": ("speed", "float"),
        "sim_padding_s": ("sim_padding", "float"),
    },
    "radio": {
        "model": ("model", "model"),
        "tx_power_dbm": ("tx_power", "float"),
        "frequency_hz": ("frequency", "float"),
        "antenna_gain_tx": ("antenna_gain_tx", "float"),
        "antenna_gain_rx": ("antenna_gain_rx", "float"),
        "antenna_height_tx_m": ("antenna_height_tx", "float"),
        "antenna_height_rx_m": ("antenna_height_rx", "float"),
        "system_loss": ("system_loss", "float"),
        "range_m": ("range_m", "float"),
        "rx_threshold_dbm": ("rx_threshold", "auto_float"),
        "shadowing_sigma_db": ("shadowing_sigma", "float"),
        "bernoulli_loss_prob": ("bernoulli_loss_prob", "float"),
    },
    "timing": {
        "hello_interval_s": ("hello_interval", "float"),
        "hello_jitter_max_s": ("hello_jitter_max", "float"),
        "tc_interval_s": ("tc_interval", "float"),
        "neighbor_hold_time_s": ("neighbor_hold_time", "float"),
        "topology_hold_time_s": ("topology_hold_time", "float"),
        "miss_timeout_factor": ("miss_timeout_factor", "float"),
        "ttl": ("ttl", "int"),
    },
    "adjacency": {
        "algorithm": ("algorithm", "algorithm"),
    },
    "loss": {
        "hyst_threshold_high": ("hyst_threshold_high", "float"),
        "hyst_threshold_low": ("hyst_threshold_low", "float"),
        "hyst_scaling": ("hyst_scaling", "float"),
        "initial_quality": ("initial_quality", "float"),
    },
    "signal": {
        "ss_threshold_low_dbm": ("ss_threshold_low", "auto_float"),
        "ss_threshold_high_dbm": ("ss_threshold_high", "auto_float"),
        "low_range_fraction": ("low_range_fraction", "float"),
        "high_range_fraction": ("high_range_fraction", "float"),
        "hyst_ss_scaling": ("hyst_ss_scaling", "float"),
        "delta_db": ("delta", "float"),
        "hyst_threshold_high": ("hyst_threshold_high", "float"),
        "hyst_threshold_low": ("hyst_threshold_low", "float"),
        "initial_quality": ("initial_quality", "float"),
        "mode": ("mode", "mode"),
    },
    "traffic": {
        "packets_per_second": ("packets_per_second", "float"),
        "payload_bytes": ("payload_bytes", "int"),
        "start_time_s": ("start_time", "float"),
    },
    "sweep": {
        "speeds_kmh": ("speeds_kmh", "float_list"),
        "seeds": ("seeds", "seeds"),
        "algorithms": ("algorithms", "algorithm_list"),
        "jobs": ("jobs", "int"),
    },
    "output": {
        "path": ("path", "str"),
        "figures": ("figures", "bool"),
        "overhead_unit": ("overhead_unit", "str"),
    },
}


def _convert(kind: str, raw: str) -> Any:
    raw = raw.strip()
    if kind == "int":
        return int(raw)
    if kind == "float":
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v
    if kind == "auto_float":
        return None if raw.lower() == "auto" else _convert("float", raw)
    if kind == "str":
        return raw
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "model":
        return PropagationModel(raw)
    if kind == "mode":
        return SignalMode(raw)
    if kind == "algorithm":
        return Algorithm(raw)
    if kind == "algorithm_list":
        return tuple(Algorithm(x.strip()) for x in raw.split(",") if x.strip())
    if kind == "float_list":
        return tuple(_convert("float", x) for x in raw.split(",") if x.strip())
    if kind == "seeds":
        items = [x.strip() for x in raw.split(",") if x.strip()]
        if len(items) == 1 and "," not in raw:
            n = int(items[0])
            if n < 1:
                raise ValueError("seed count must be >= 1")
            return tuple(range(1, n + 1))
        return tuple(int(x) for x in items)
    raise AssertionError(kind)


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    """Map (section, key) to the 1-based line it appears on, for diagnostics."""
    out = {}
    section = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
        elif "=" in s and section is not None:
            out[(section, s.split("=", 1)[0].strip().lower())] = i
    return out


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("<syntax>", "key outside of any [section]", exc.lineno) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"{exc.section}.{exc.option}", "duplicate key", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(exc.section, "duplicate section", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("<syntax>", "malformed line", lineno) from None

    lines = _key_lines(text)
    updates: dict[str, dict[str, Any]] = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(section, "unknown section")
        for key, raw in cp.items(section):
            line = lines.get((section, key))
            spec = _SCHEMA[section].get(key)
            if spec is None:
                raise ConfigError(f"{section}.{key}", "unknown key", line)
            name, kind = spec
            try:
                value = _convert(kind, raw)
            except ValueError as exc:
                raise ConfigError(f"{section}.{name}", f"invalid value {raw.strip()!r} ({exc})", line) from None
            updates.setdefault(section, {})[name] = value

    cfg = ExperimentConfig()
    kwargs: dict[str, Any] = {}
    for section, values in updates.items():
        if section == "adjacency":
            kwargs["algorithm"] = values["algorithm"]
            continue
        current = getattr(cfg, section)
        try:
            kwargs[section] = replace(current, **values)
        except ValueError as exc:
            msg = str(exc)
            name = msg.split(" ", 1)[0]
            raise ConfigError(f"{section}.{name}" if name.isidentifier() else section, msg) from None
    return replace(cfg, **kwargs).validate()


def _format(kind: str, value: Any) -> str:
    if value is None:
        return "auto"
    if kind in ("float_list",):
        return ", ".join(repr(float(v)) for v in value)
    if kind == "seeds":
        return ", ".join(str(v) for v in value)
    if kind == "algorithm_list":
        return ", ".join(a.value for a in value)
    if kind == "bool":
        return "true" if value else "false"
    if hasattr(value, "value"):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(cfg: ExperimentConfig) -> str:
    """Render the effective configuration in the same grammar ``parse_config`` reads."""
    out = []
    for section, keys in _SCHEMA.items():
        out.append(f"[{section}]")
        obj = cfg if section == "adjacency" else getattr(cfg, section)
        for key, (name, kind) in keys.items():
            out.append(f"{key} = {_format(kind, getattr(obj, name))}")
        out.append("")
    return "\n".join(out)


def load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig().validate()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RadioSettings",
    "SignalSettings",
    "SweepSettings",
    "OutputSettings",
    "parse_config",
    "format_config",
    "load_config",
]
