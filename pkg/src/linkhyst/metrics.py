"""Per-run counters and cross-run statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

# two-sided 95% Student t quantiles t_{0.975, df}, df = 1..64
T_975 = (
    12.706204736432, 4.302652729696, 3.182446305284, 2.776445105198,
    2.570581835636, 2.446911851145, 2.364624251593, 2.306004135204,
    2.262157162854, 2.228138851965, 2.200985160083, 2.178812829663,
    2.160368656461, 2.144786687917, 2.131449545559, 2.119905299221,
    2.109815577833, 2.100922040241, 2.093024054408, 2.085963447266,
    2.079613844728, 2.073873067904, 2.068657610419, 2.063898561628,
    2.059538552753, 2.055529438643, 2.051830516480, 2.048407141795,
    2.045229642133, 2.042272456301, 2.039513446396, 2.036933343460,
    2.034515297449, 2.032244509318, 2.030107928250, 2.028094000980,
    2.026192463029, 2.024394163912, 2.022690920037, 2.021075390306,
    2.019540970441, 2.018081702818, 2.016692199228, 2.015367574444,
    2.014103388881, 2.012895598919, 2.011740513730, 2.010634757624,
    2.009575237129, 2.008559112101, 2.007583770316, 2.006646805062,
    2.005745995318, 2.004879288188, 2.004044783289, 2.003240718848,
    2.002465459291, 2.001717484145, 2.000995378088, 2.000297822014,
    1.999623584995, 1.998971517033, 1.998340542521, 1.997729654318,
)
NORMAL_975 = 1.959963984540


def t_quantile_975(df: int) -> float:
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if df <= len(T_975):
        return T_975[df - 1]
    return NORMAL_975


@dataclass
class RunResult:
    data_sent: int
    data_received: int
    control_transmissions: int
    run_seed: int
    speed: float
    algorithm: str
    control_bytes: int = 0
    hello_transmissions: int = 0
    tc_transmissions: int = 0
    drops: dict[str, int] = field(default_factory=dict)
    trace_hash: str = ""

    def __post_init__(self):
        if self.data_received > self.data_sent:
            raise ValueError("data_received cannot exceed data_sent")


@dataclass(frozen=True)
class AggregateStat:
    mean: float
    ci95_halfwidth: float
    n: int


def pdr(r: RunResult) -> float:
    if r.data_sent <= 0:
        raise ValueError("PDR undefined: no data packets were sent")
    return r.data_received / r.data_sent


def overhead(r: RunResult, unit: str = "transmissions") -> int:
    if unit == "bytes":
        return r.control_bytes
    return r.control_transmissions


def mean_ci95(samples: Sequence[float]) -> AggregateStat:
    """Sample mean with a two-sided 95% Student-t half-width."""
    xs = [float(x) for x in samples]
    n = len(xs)
    if n < 2:
        raise ValueError(f"need at least 2 samples for a confidence interval, got {n}")
    mean = math.fsum(xs) / n
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    half = t_quantile_975(n - 1) * math.sqrt(var / n)
    return AggregateStat(mean, half, n)
