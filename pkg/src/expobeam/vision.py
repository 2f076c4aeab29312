"""Stochastic stand-in for pose-estimation positioning error.

Keypoint deviation is drawn as a head-size-normalized distance
(half-normal, truncated) and converted to an angular offset at the
entity's range: alpha = atan(r * head_size / range). The offset is
split into azimuth/tilt components by a uniform random in-image angle.
Ranges are left untouched; the error is purely angular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import ArrayPose, Direction, Point3D, direction_to, distance

# Phi^-1(0.95), so sigma = q90 / this puts the 90th percentile at q90.
_HALF_NORMAL_P90 = 1.6448536269514722


@dataclass(frozen=True)
class CvErrorModel:
    head_size_m: float = 0.25
    # Default scale calibrated for a 90th-percentile normalized deviation
    # of 0.15 (well-localized head/wrist keypoints at close range).
    sigma_norm: float = 0.15 / _HALF_NORMAL_P90
    max_norm: float = 1.5  # truncation of the normalized deviation

    def __post_init__(self) -> None:
        if self.head_size_m <= 0.0:
            raise ValueError("head size must be positive")
        if self.sigma_norm < 0.0 or self.max_norm < 0.0:
            raise ValueError("distribution parameters must be non-negative")


@dataclass(frozen=True)
class DetectedEntity:
    joint: str
    position: Point3D  # true position; detection error is angular only
    direction: Direction
    range_m: float


@dataclass(frozen=True)
class DetectedEntities:
    head: DetectedEntity
    ue: DetectedEntity


def draw_normalized_deviation(model: CvErrorModel, rng: np.random.Generator) -> float:
    """One truncated half-normal normalized keypoint deviation."""
    if model.sigma_norm == 0.0:
        return 0.0
    return min(abs(model.sigma_norm * float(rng.standard_normal())), model.max_norm)


def angular_error(model: CvErrorModel, range_m: float,
                  rng: np.random.Generator) -> tuple[float, float]:
    """(azimuth, downtilt) error components in degrees for one detection."""
    if range_m <= 0.0:
        raise ValueError("range must be positive")
    r = draw_normalized_deviation(model, rng)
    alpha = math.degrees(math.atan(r * model.head_size_m / range_m))
    psi = rng.uniform(0.0, 2.0 * math.pi)
    return alpha * math.cos(psi), alpha * math.sin(psi)


def _detect(joint: str, position: Point3D, pose: ArrayPose,
            model: Optional[CvErrorModel],
            rng: Optional[np.random.Generator]) -> DetectedEntity:
    true_dir = direction_to(position, pose)
    range_m = distance(pose.position, position)
    if model is None or rng is None:
        return DetectedEntity(joint, position, true_dir, range_m)
    daz, dtilt = angular_error(model, range_m, rng)
    tilt = min(max(true_dir.downtilt_deg + dtilt, -90.0), 90.0)
    return DetectedEntity(joint, position,
                          Direction(true_dir.azimuth_deg + daz, tilt), range_m)


def perturb(
    head: Point3D,
    ue: Point3D,
    pose: ArrayPose,
    model: Optional[CvErrorModel],
    head_rng: Optional[np.random.Generator] = None,
    ue_rng: Optional[np.random.Generator] = None,
) -> DetectedEntities:
    """Detected head and UE entities with independent angular errors."""
    return DetectedEntities(
        head=_detect("head", head, pose, model, head_rng),
        ue=_detect("ue", ue, pose, model, ue_rng),
    )
