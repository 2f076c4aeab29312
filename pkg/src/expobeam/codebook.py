"""Beam codebooks: uniform angular grids of conjugate-weight beams.

A codebook lays beams on a uniform (azimuth, downtilt) grid over a
coverage sector; the per-axis spacing is twice the angular offset at
which a boresight beam drops by the chosen crossover level, so adjacent
beams cross at that level near boresight. Beam indices (m, n) form the
integer lattice used by the avoidance distance metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

from .antenna import ArrayConfig, BeamWeights, conjugate_weights, half_power_offset
from .geometry import Direction


class CodebookError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class BeamId:
    m: int  # azimuth index
    n: int  # downtilt index


class NearestBeam(NamedTuple):
    beam: BeamId
    clamped: bool


def beam_distance(a: BeamId, b: BeamId) -> float:
    """Euclidean distance in beam-index space."""
    return math.hypot(a.m - b.m, a.n - b.n)


@dataclass(frozen=True)
class SectorSpan:
    """Coverage sector in the array frame, degrees."""

    az_min_deg: float = -60.0
    az_max_deg: float = 60.0
    tilt_min_deg: float = -35.0
    tilt_max_deg: float = 25.0

    def __post_init__(self) -> None:
        if self.az_min_deg > self.az_max_deg or self.tilt_min_deg > self.tilt_max_deg:
            raise CodebookError("empty sector")


def _axis_layout(lo: float, hi: float, spacing: float) -> tuple[int, float]:
    """Beam count and first-beam angle covering [lo, hi] at ``spacing``.

    The grid is centered in the sector so leftover span splits evenly
    at both edges (a symmetric sector then carries an on-axis beam).
    """
    span = hi - lo
    if span < spacing:
        return 1, 0.5 * (lo + hi)
    count = int(math.floor(span / spacing + 1e-9)) + 1
    return count, lo + 0.5 * (span - (count - 1) * spacing)


@dataclass(frozen=True)
class Codebook:
    array: Optional[ArrayConfig]
    crossover_db: float
    sector: SectorSpan
    spacing_az_deg: float
    spacing_tilt_deg: float
    az_count: int
    tilt_count: int
    az_start_deg: float
    tilt_start_deg: float

    @classmethod
    def uniform_grid(
        cls,
        az_count: int,
        tilt_count: int = 1,
        spacing_deg: float = 1.0,
        crossover_db: float = 3.0,
        array: Optional[ArrayConfig] = None,
    ) -> "Codebook":
        """Synthetic index grid centered on boresight (index-level tests)."""
        az_span = spacing_deg * max(az_count - 1, 0)
        tilt_span = spacing_deg * max(tilt_count - 1, 0)
        return cls(
            array=array,
            crossover_db=crossover_db,
            sector=SectorSpan(-az_span / 2, az_span / 2 + 1e-9,
                              -tilt_span / 2, tilt_span / 2 + 1e-9),
            spacing_az_deg=spacing_deg,
            spacing_tilt_deg=spacing_deg,
            az_count=az_count,
            tilt_count=tilt_count,
            az_start_deg=-az_span / 2,
            tilt_start_deg=-tilt_span / 2,
        )

    def __len__(self) -> int:
        return self.az_count * self.tilt_count

    def __contains__(self, beam: BeamId) -> bool:
        return 0 <= beam.m < self.az_count and 0 <= beam.n < self.tilt_count

    def validate(self, beam: BeamId) -> None:
        if beam not in self:
            raise CodebookError(f"beam {beam} not in this codebook "
                                f"({self.az_count}x{self.tilt_count})")

    def beams(self) -> Iterator[BeamId]:
        for m in range(self.az_count):
            for n in range(self.tilt_count):
                yield BeamId(m, n)

    def steering(self, beam: BeamId) -> Direction:
        self.validate(beam)
        return Direction(
            self.az_start_deg + beam.m * self.spacing_az_deg,
            self.tilt_start_deg + beam.n * self.spacing_tilt_deg,
        )

    def weights(self, beam: BeamId) -> BeamWeights:
        if self.array is None:
            raise CodebookError("codebook has no array config attached")
        return conjugate_weights(self.array, self.steering(beam))

    def beam_distance(self, a: BeamId, b: BeamId) -> float:
        self.validate(a)
        self.validate(b)
        return beam_distance(a, b)

    def _axis_index(self, value: float, start: float, spacing: float, count: int) -> tuple[int, bool]:
        # Round half down so midpoint ties go to the lower index.
        raw = math.ceil((value - start) / spacing - 0.5)
        idx = min(max(raw, 0), count - 1)
        return idx, idx != raw

    def nearest_beam(self, direction: Direction) -> NearestBeam:
        """Beam whose steering angle is closest to ``direction`` per axis.

        Directions outside the grid clamp to the edge beam with
        ``clamped`` set.
        """
        m, clamped_m = self._axis_index(
            direction.azimuth_deg, self.az_start_deg, self.spacing_az_deg, self.az_count)
        n, clamped_n = self._axis_index(
            direction.downtilt_deg, self.tilt_start_deg, self.spacing_tilt_deg, self.tilt_count)
        return NearestBeam(BeamId(m, n), clamped_m or clamped_n)


def build_codebook(
    cfg: ArrayConfig,
    sector: SectorSpan,
    crossover_db: float,
    axes: str = "both",
) -> Codebook:
    """Build the beam grid for ``sector`` at the given crossover level.

    ``axes`` selects where the crossover level applies: "both" (default)
    or "azimuth" (tilt axis then falls back to half-power spacing).
    """
    if not 0.0 < crossover_db <= 6.0:
        raise CodebookError(f"crossover level out of (0, 6] dB: {crossover_db}")
    if axes not in ("both", "azimuth"):
        raise CodebookError(f"unknown axes mode {axes!r}")

    spacing_az = 2.0 * half_power_offset(cfg, crossover_db, "azimuth")
    tilt_level = crossover_db if axes == "both" else 3.0
    spacing_tilt = 2.0 * half_power_offset(cfg, tilt_level, "tilt")

    az_count, az_start = _axis_layout(sector.az_min_deg, sector.az_max_deg, spacing_az)
    tilt_count, tilt_start = _axis_layout(sector.tilt_min_deg, sector.tilt_max_deg, spacing_tilt)
    return Codebook(
        array=cfg,
        crossover_db=crossover_db,
        sector=sector,
        spacing_az_deg=spacing_az,
        spacing_tilt_deg=spacing_tilt,
        az_count=az_count,
        tilt_count=tilt_count,
        az_start_deg=az_start,
        tilt_start_deg=tilt_start,
    )
