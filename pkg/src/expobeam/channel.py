"""LOS link budget: pathloss with shadow fading and broadband SNR.

Pathloss follows the street-canyon LOS model
PL = 32.4 + 21*log10(d3D) + 20*log10(f_GHz), with lognormal shadow
fading of configurable sigma (default 4 dB) drawn from a caller-owned
RNG so the scenario engine controls the random stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    carrier_freq_ghz: float = 28.0
    shadow_sigma_db: float = 4.0
    pathloss_model: str = "umi-street-canyon-los"

    def __post_init__(self) -> None:
        if self.shadow_sigma_db < 0.0:
            raise ValueError("shadow sigma must be non-negative")
        if self.carrier_freq_ghz <= 0.0:
            raise ValueError("carrier frequency must be positive")


class PathlossSample(NamedTuple):
    db: float
    clamped: bool


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float
    gain_db: float
    pathloss_db: float
    noise_power_dbm: float

    def __post_init__(self) -> None:
        for v in (self.tx_power_dbm, self.gain_db, self.pathloss_db, self.noise_power_dbm):
            if not math.isfinite(v):
                raise ValueError("link budget fields must be finite")


def pathloss_los(params: ChannelParams, d3d_m: float,
                 rng: Optional[np.random.Generator] = None) -> PathlossSample:
    """LOS pathloss in dB at 3-D distance ``d3d_m``.

    Distances below the 1 m model floor clamp to 1 m and set the
    ``clamped`` flag. When ``rng`` is given, one Gaussian shadow-fading
    draw is added.
    """
    if d3d_m <= 0.0:
        raise ValueError("distance must be positive")
    clamped = d3d_m < 1.0
    d = max(d3d_m, 1.0)
    pl = 32.4 + 21.0 * math.log10(d) + 20.0 * math.log10(params.carrier_freq_ghz)
    if rng is not None and params.shadow_sigma_db > 0.0:
        pl += params.shadow_sigma_db * float(rng.standard_normal())
    return PathlossSample(pl, clamped)


def noise_power_dbm(bandwidth_mhz: float, noise_figure_db: float) -> float:
    """Thermal noise power: -174 dBm/Hz plus bandwidth and noise figure."""
    if bandwidth_mhz <= 0.0:
        raise ValueError("bandwidth must be positive")
    return -174.0 + 10.0 * math.log10(bandwidth_mhz * 1e6) + noise_figure_db


def snr_db(budget: LinkBudget) -> float:
    """Broadband SNR in dB."""
    return budget.tx_power_dbm + budget.gain_db - budget.pathloss_db - budget.noise_power_dbm
