"""Coordinate frames and angular geometry.

World frame: z up, base-station array phase center at a configurable
position (default height 5 m). Directions are expressed in the array
frame as (azimuth, downtilt) in degrees: azimuth 0 at boresight,
positive toward +y; downtilt 0 at horizontal boresight, positive toward
the ground.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class GeometryError(ValueError):
    pass


def _wrap_azimuth(az_deg: float) -> float:
    """Wrap an azimuth to [-180, 180)."""
    az = math.fmod(az_deg + 180.0, 360.0)
    if az < 0.0:
        az += 360.0
    return az - 180.0


@dataclass(frozen=True)
class Point3D:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise GeometryError(f"non-finite coordinate: {v!r}")


@dataclass(frozen=True)
class Direction:
    """Angular direction in the array frame, degrees."""

    azimuth_deg: float
    downtilt_deg: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "azimuth_deg", _wrap_azimuth(self.azimuth_deg))
        if not -90.0 <= self.downtilt_deg <= 90.0:
            raise GeometryError(f"downtilt out of [-90, 90]: {self.downtilt_deg}")


@dataclass(frozen=True)
class ArrayPose:
    """Placement of the array panel in the world frame.

    The panel boresight points along +x rotated by ``boresight_az_deg``
    about z, then tilted down by ``downtilt_deg``. Steering on top of
    this mechanical pose is purely electrical.
    """

    position: Point3D = Point3D(0.0, 0.0, 5.0)
    boresight_az_deg: float = 0.0
    downtilt_deg: float = 0.0


def distance(p: Point3D, q: Point3D) -> float:
    """Euclidean distance between two world points, meters."""
    return math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2)


def direction_to(point: Point3D, pose: ArrayPose) -> Direction:
    """Azimuth/downtilt of ``point`` as seen from the array panel.

    Raises GeometryError for a point at the array phase center.
    """
    vx = point.x - pose.position.x
    vy = point.y - pose.position.y
    vz = point.z - pose.position.z
    if vx == 0.0 and vy == 0.0 and vz == 0.0:
        raise GeometryError("degenerate direction: point at array phase center")

    # Rotate into the panel frame: yaw about z, then mechanical downtilt
    # about the panel's y axis.
    yaw = math.radians(pose.boresight_az_deg)
    ca, sa = math.cos(yaw), math.sin(yaw)
    x1 = vx * ca + vy * sa
    y1 = -vx * sa + vy * ca
    z1 = vz

    tilt = math.radians(pose.downtilt_deg)
    ct, st = math.cos(tilt), math.sin(tilt)
    xa = x1 * ct - z1 * st
    ya = y1
    za = x1 * st + z1 * ct

    az = math.degrees(math.atan2(ya, xa))
    dt = math.degrees(math.atan2(-za, math.hypot(xa, ya)))
    return Direction(az, dt)
