"""Received signal strength and per-frame reception decisions.

Powers are carried in dBm throughout. Two deterministic path-loss models are
provided (free space and two-ray ground reflection); random effects
(log-normal shadowing and an i.i.d. Bernoulli drop) are applied on top by
:func:`reception_decision`.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, replace

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    if mw <= 0:
        raise ValueError(f"power must be positive, got {mw} mW")
    return 10.0 * math.log10(mw)


class PropagationModel(str, enum.Enum):
    FRIIS = "friis"
    TWO_RAY = "two_ray"


@dataclass(frozen=True)
class PropagationParams:
    tx_power: float = 24.5  # dBm
    frequency: float = 914e6  # Hz
    antenna_gain_tx: float = 1.0
    antenna_gain_rx: float = 1.0
    antenna_height_tx: float = 1.5  # m
    antenna_height_rx: float = 1.5  # m
    system_loss: float = 1.0
    rx_threshold: float = -64.37394998465425  # dBm, two-ray power at 250 m
    shadowing_sigma: float = 0.0  # dB
    bernoulli_loss_prob: float = 0.0
    model: PropagationModel = PropagationModel.TWO_RAY

    def __post_init__(self):
        for name in ("tx_power", "rx_threshold", "frequency"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")
        if self.antenna_gain_tx < 0 or self.antenna_gain_rx < 0:
            raise ValueError("antenna gains must be >= 0")
        if self.antenna_height_tx <= 0 or self.antenna_height_rx <= 0:
            raise ValueError("antenna heights must be > 0")
        if self.system_loss < 1:
            raise ValueError("system_loss must be >= 1")
        if not self.shadowing_sigma >= 0:
            raise ValueError("shadowing_sigma must be >= 0")
        if not 0.0 <= self.bernoulli_loss_prob <= 1.0:
            raise ValueError("bernoulli_loss_prob must be in [0, 1]")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    def with_range(self, range_m: float) -> "PropagationParams":
        """Copy whose reception threshold puts the deterministic range at ``range_m``."""
        return replace(self, rx_threshold=rx_power(self, range_m))


def _check_distance(d: float) -> None:
    if not d > 0:
        raise ValueError(f"distance must be > 0, got {d}")


def _gain_factor(p: PropagationParams) -> float:
    return p.antenna_gain_tx * p.antenna_gain_rx / p.system_loss


def friis_rx_power(p: PropagationParams, d: float) -> float:
    _check_distance(d)
    lam = p.wavelength
    linear = _gain_factor(p) * lam * lam / ((4.0 * math.pi) ** 2 * d * d)
    return p.tx_power + 10.0 * math.log10(linear)


def crossover_distance(p: PropagationParams) -> float:
    return 4.0 * math.pi * p.antenna_height_tx * p.antenna_height_rx / p.wavelength


def two_ray_rx_power(p: PropagationParams, d: float) -> float:
    _check_distance(d)
    if d < crossover_distance(p):
        return friis_rx_power(p, d)
    hh = p.antenna_height_tx * p.antenna_height_rx
    linear = _gain_factor(p) * hh * hh / d**4
    return p.tx_power + 10.0 * math.log10(linear)


def rx_power(p: PropagationParams, d: float) -> float:
    if p.model is PropagationModel.FRIIS:
        return friis_rx_power(p, d)
    return two_ray_rx_power(p, d)


def deterministic_range(p: PropagationParams, hi: float = 1e7, tol: float = 1e-13) -> float:
    """Largest distance whose mean received power still meets the threshold.

    Found by bisection on the (monotone) path-loss curve.
    """
    lo = 1e-6
    if rx_power(p, lo) < p.rx_threshold:
        return 0.0
    if rx_power(p, hi) >= p.rx_threshold:
        return hi
    while hi - lo > tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if rx_power(p, mid) >= p.rx_threshold:
            lo = mid
        else:
            hi = mid
    return lo


class DropReason(str, enum.Enum):
    BELOW_THRESHOLD = "BelowThreshold"
    RANDOM_LOSS = "RandomLoss"


@dataclass(frozen=True)
class Received:
    effective_power: float


@dataclass(frozen=True)
class Dropped:
    reason: DropReason
    effective_power: float


def reception_decision(
    p: PropagationParams,
    power: float,
    shadow_rng: random.Random | None = None,
    loss_rng: random.Random | None = None,
) -> Received | Dropped:
    """Decide whether a frame arriving with mean power ``power`` is received.

    Reception exactly at the threshold counts as received. Random draws are
    taken only when the matching effect is enabled, so disabling one effect
    leaves the other's sequence untouched.
    """
    effective = power
    if p.shadowing_sigma > 0:
        if shadow_rng is None:
            raise ValueError("shadowing enabled but no random stream given")
        effective += shadow_rng.gauss(0.0, p.shadowing_sigma)
    if effective < p.rx_threshold:
        return Dropped(DropReason.BELOW_THRESHOLD, effective)
    if p.bernoulli_loss_prob > 0:
        if loss_rng is None:
            raise ValueError("random loss enabled but no random stream given")
        if loss_rng.random() < p.bernoulli_loss_prob:
            return Dropped(DropReason.RANDOM_LOSS, effective)
    return Received(effective)
