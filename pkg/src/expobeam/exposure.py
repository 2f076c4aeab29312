"""Far-field power-density prediction at head positions.

Plane-wave equivalent S = P_T * G / (4*pi*R^2) with the beam gain
evaluated toward the head, reported in mW/cm^2. Free-space prediction:
shadow fading is deliberately not applied here (it belongs to the SNR
path only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .antenna import ArrayConfig, BeamWeights, array_gain
from .codebook import BeamId
from .geometry import ArrayPose, Point3D, direction_to, distance

GROUND_REFLECTION_FACTOR = 2.56  # optional worst-case enhancement
W_M2_TO_MW_CM2 = 0.1


class NearFieldError(ValueError):
    """Geometry below the far-field validity floor."""


@dataclass(frozen=True)
class ExposureSample:
    position: Point3D
    power_density_mw_cm2: float
    beam: BeamId
    range_m: float

    def __post_init__(self) -> None:
        if self.power_density_mw_cm2 < 0.0:
            raise ValueError("power density must be non-negative")


def power_density_from_gain(
    gain_db: float,
    tx_power_dbm: float,
    range_m: float,
    near_field_floor_m: float = 0.5,
    ground_reflection: bool = False,
) -> float:
    """Power density in mW/cm^2 from a gain value toward the head."""
    if range_m < near_field_floor_m:
        raise NearFieldError(f"near-field: model invalid at {range_m} m")
    p_watt = 10.0 ** ((tx_power_dbm - 30.0) / 10.0)
    g_lin = 10.0 ** (gain_db / 10.0)
    s_w_m2 = p_watt * g_lin / (4.0 * math.pi * range_m ** 2)
    if ground_reflection:
        s_w_m2 *= GROUND_REFLECTION_FACTOR
    return s_w_m2 * W_M2_TO_MW_CM2


def power_density(
    cfg: ArrayConfig,
    w: BeamWeights,
    tx_power_dbm: float,
    head: Point3D,
    pose: ArrayPose,
    near_field_floor_m: float = 0.5,
    ground_reflection: bool = False,
) -> float:
    """Power density at ``head`` for a beam with weights ``w``, mW/cm^2."""
    r = distance(pose.position, head)
    gain = array_gain(cfg, w, direction_to(head, pose))
    return power_density_from_gain(gain, tx_power_dbm, r,
                                   near_field_floor_m=near_field_floor_m,
                                   ground_reflection=ground_reflection)


def exceeds_limit(sample: ExposureSample, limit_mw_cm2: float) -> bool:
    """True when the sample is non-compliant (strictly above the limit)."""
    return sample.power_density_mw_cm2 > limit_mw_cm2
