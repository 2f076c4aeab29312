"""Seeded Monte-Carlo engine over the pedestrian evaluation area.

Sweeps head positions over a ground grid, runs the detection ->
beam-mapping -> avoidance -> link/exposure pipeline per trial, and
aggregates exposure maps, exposure CDFs and SNR CDFs per codebook and
avoidance setting. Per-(point, trial) random streams are derived from
the master seed so results are independent of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .antenna import ArrayConfig, beam_gain_db
from .avoidance import (AvoidanceError, AvoidancePolicy, DEFAULT_POLICY_COARSE,
                        DEFAULT_POLICY_FINE, BeamDecision, d0_for_range, select_beam)
from .channel import ChannelParams, noise_power_dbm, pathloss_los
from .codebook import BeamId, Codebook, SectorSpan, beam_distance, build_codebook
from .exposure import NearFieldError, power_density_from_gain
from .geometry import ArrayPose, Point3D, distance, direction_to
from .vision import CvErrorModel, perturb

MUTED_SNR_DB = -math.inf


def level_label(level: float) -> str:
    """Crossover level as a filename-safe label: 3.0 -> '3db', 0.5 -> '0p5db'."""
    return f"{level:g}".replace(".", "p") + "db"


@dataclass(frozen=True)
class GridSpec:
    x_min: float = 1.0
    x_max: float = 6.0
    y_min: float = -2.0
    y_max: float = 2.0
    step: float = 0.1

    def __post_init__(self) -> None:
        if self.step <= 0.0 or self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("invalid grid spec")

    @property
    def nx(self) -> int:
        return int(math.floor((self.x_max - self.x_min) / self.step + 1e-9)) + 1

    @property
    def ny(self) -> int:
        return int(math.floor((self.y_max - self.y_min) / self.step + 1e-9)) + 1

    def x(self, ix: int) -> float:
        return self.x_min + ix * self.step

    def y(self, iy: int) -> float:
        return self.y_min + iy * self.step


@dataclass(frozen=True)
class PedestrianPose:
    """Device placement relative to the head, in a BS-facing frame.

    ``forward`` points horizontally from the head toward the array,
    ``lateral`` to the pedestrian's side, ``down`` toward the ground.
    Pose A: device at the head (call / headset). Pose B: device in
    front of the torso (selfie / watch).
    """

    name: str
    head_height_m: float = 1.7
    ue_forward_m: float = 0.0
    ue_lateral_m: float = 0.0
    ue_down_m: float = 0.0

    def __post_init__(self) -> None:
        if self.head_height_m <= 0.0:
            raise ValueError("head must be above ground")


POSE_A = PedestrianPose("A", ue_down_m=0.10)
POSE_B = PedestrianPose("B", ue_forward_m=0.40, ue_down_m=0.45)


def ue_position(pose: PedestrianPose, head: Point3D, array_pos: Point3D) -> Point3D:
    dx = array_pos.x - head.x
    dy = array_pos.y - head.y
    norm = math.hypot(dx, dy)
    if norm < 1e-12:
        tx, ty = 1.0, 0.0
    else:
        tx, ty = dx / norm, dy / norm
    # lateral axis: z-hat cross forward
    lx, ly = -ty, tx
    return Point3D(
        head.x + pose.ue_forward_m * tx + pose.ue_lateral_m * lx,
        head.y + pose.ue_forward_m * ty + pose.ue_lateral_m * ly,
        head.z - pose.ue_down_m,
    )


@dataclass(frozen=True)
class ScenarioConfig:
    array: ArrayConfig = field(default_factory=ArrayConfig)
    mount: ArrayPose = ArrayPose(Point3D(0.0, 0.0, 5.0), 0.0, 64.0)
    sector: SectorSpan = SectorSpan(-60.0, 60.0, -37.0, 27.0)
    crossover_levels: tuple[float, ...] = (3.0, 0.5)
    policies: tuple[tuple[float, AvoidancePolicy], ...] = (
        (3.0, DEFAULT_POLICY_COARSE),
        (0.5, DEFAULT_POLICY_FINE),
    )
    codebook_axes: str = "both"
    channel: ChannelParams = ChannelParams()
    bandwidth_mhz: float = 100.0
    noise_figure_db: float = 9.0
    tx_power_dbm: float = 20.0
    exposure_limit_mw_cm2: float = 0.3
    near_field_floor_m: float = 0.5
    cv: Optional[CvErrorModel] = field(default_factory=CvErrorModel)
    pose: PedestrianPose = POSE_A
    grid: GridSpec = GridSpec()
    trials_per_point: int = 20
    seed: int = 1

    def policy_for(self, level: float) -> AvoidancePolicy:
        for lvl, pol in self.policies:
            if lvl == level:
                return pol
        raise ValueError(f"no avoidance policy for crossover level {level}")

    def validate(self) -> None:
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if not self.crossover_levels:
            raise ValueError("at least one crossover level required")
        for level in self.crossover_levels:
            self.policy_for(level)
        if self.exposure_limit_mw_cm2 <= 0.0:
            raise ValueError("exposure limit must be positive")
        # far-field validity over the whole grid
        g = self.grid
        for x in (g.x_min, g.x_max):
            for y in (g.y_min, g.y_max):
                head = Point3D(x, y, self.pose.head_height_m)
                if distance(self.mount.position, head) < self.near_field_floor_m:
                    raise NearFieldError(
                        f"head grid point ({x}, {y}) is inside the near-field floor")


@dataclass
class ComboResult:
    level: float
    avoidance: bool
    snr_db: np.ndarray  # sorted, muted trials excluded
    exposure_mw_cm2: np.ndarray  # sorted
    exposure_map: np.ndarray  # (nx, ny) mean per cell
    beam_map_m: np.ndarray  # (nx, ny) trial-0 beam indices
    beam_map_n: np.ndarray
    d0_map: np.ndarray
    trigger_rate: float
    mute_rate: float
    mean_head_beam_distance: float

    @property
    def key(self) -> str:
        return f"{level_label(self.level)}_{'on' if self.avoidance else 'off'}"

    def percentiles(self) -> dict[str, float]:
        out = {
            "exposure_p50": float(np.percentile(self.exposure_mw_cm2, 50)),
            "exposure_p95": float(np.percentile(self.exposure_mw_cm2, 95)),
            "exposure_max": float(self.exposure_mw_cm2[-1]) if self.exposure_mw_cm2.size else 0.0,
        }
        if self.snr_db.size:
            out["snr_p50"] = float(np.percentile(self.snr_db, 50))
            out["snr_p95"] = float(np.percentile(self.snr_db, 95))
        return out


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    combos: dict[str, ComboResult]

    def combo(self, level: float, avoidance: bool) -> ComboResult:
        return self.combos[f"{level_label(level)}_{'on' if avoidance else 'off'}"]


@dataclass(frozen=True)
class _SimContext:
    cfg: ScenarioConfig
    codebooks: tuple[Codebook, ...]
    noise_dbm: float


_CTX_CACHE: dict[ScenarioConfig, _SimContext] = {}


def _context(cfg: ScenarioConfig) -> _SimContext:
    ctx = _CTX_CACHE.get(cfg)
    if ctx is None:
        codebooks = tuple(
            build_codebook(cfg.array, cfg.sector, level, cfg.codebook_axes)
            for level in cfg.crossover_levels
        )
        ctx = _SimContext(cfg, codebooks,
                          noise_power_dbm(cfg.bandwidth_mhz, cfg.noise_figure_db))
        _CTX_CACHE[cfg] = ctx
    return ctx


def _trial_streams(cfg: ScenarioConfig, ix: int, iy: int, trial: int):
    ss = np.random.SeedSequence(entropy=(cfg.seed, ix, iy, trial))
    head_ss, ue_ss, shadow_ss = ss.spawn(3)
    return (np.random.default_rng(head_ss), np.random.default_rng(ue_ss),
            np.random.default_rng(shadow_ss))


def run_point(cfg: ScenarioConfig, ix: int, iy: int) -> list[dict]:
    """All trial records for one grid point, one dict per codebook level."""
    ctx = _context(cfg)
    t = cfg.trials_per_point
    head = Point3D(cfg.grid.x(ix), cfg.grid.y(iy), cfg.pose.head_height_m)
    ue = ue_position(cfg.pose, head, cfg.mount.position)
    r_head = distance(cfg.mount.position, head)
    r_ue = distance(cfg.mount.position, ue)
    dir_head_true = direction_to(head, cfg.mount)
    dir_ue_true = direction_to(ue, cfg.mount)
    pl_det = pathloss_los(cfg.channel, r_ue).db

    n_levels = len(ctx.codebooks)
    recs = [
        {k: np.zeros(t) for k in ("snr_off", "snr_on", "exp_off", "exp_on", "head_dist")}
        for _ in range(n_levels)
    ]
    for rec in recs:
        rec["triggered"] = np.zeros(t, dtype=bool)
        rec["muted"] = np.zeros(t, dtype=bool)
        rec["beams0"] = None

    for trial in range(t):
        head_rng, ue_rng, shadow_rng = _trial_streams(cfg, ix, iy, trial)
        detected = perturb(head, ue, cfg.mount, cfg.cv, head_rng, ue_rng)
        shadow = (cfg.channel.shadow_sigma_db * float(shadow_rng.standard_normal())
                  if cfg.channel.shadow_sigma_db > 0.0 else 0.0)
        pl = pl_det + shadow

        for li, cb in enumerate(ctx.codebooks):
            rec = recs[li]
            beam_head = cb.nearest_beam(detected.head.direction).beam
            beam_ue = cb.nearest_beam(detected.ue.direction).beam
            d0 = d0_for_range(cfg.policy_for(cfg.crossover_levels[li]), r_head)

            gain_ue_init = beam_gain_db(cfg.array, cb.steering(beam_ue), dir_ue_true)
            gain_head_init = beam_gain_db(cfg.array, cb.steering(beam_ue), dir_head_true)
            rec["snr_off"][trial] = cfg.tx_power_dbm + gain_ue_init - pl - ctx.noise_dbm
            rec["exp_off"][trial] = power_density_from_gain(
                gain_head_init, cfg.tx_power_dbm, r_head,
                near_field_floor_m=cfg.near_field_floor_m)

            try:
                decision = select_beam(cb, beam_ue, beam_head, d0)
            except AvoidanceError:
                rec["muted"][trial] = True
                rec["triggered"][trial] = True
                rec["snr_on"][trial] = MUTED_SNR_DB
                rec["exp_on"][trial] = 0.0
                rec["head_dist"][trial] = math.nan
                if rec["beams0"] is None:
                    rec["beams0"] = (beam_ue, beam_ue, d0)
                continue

            rec["triggered"][trial] = decision.triggered
            rec["head_dist"][trial] = beam_distance(beam_head, decision.selected)
            if decision.selected == beam_ue:
                gain_ue_sel, gain_head_sel = gain_ue_init, gain_head_init
            else:
                steer = cb.steering(decision.selected)
                gain_ue_sel = beam_gain_db(cfg.array, steer, dir_ue_true)
                gain_head_sel = beam_gain_db(cfg.array, steer, dir_head_true)
            rec["snr_on"][trial] = cfg.tx_power_dbm + gain_ue_sel - pl - ctx.noise_dbm
            rec["exp_on"][trial] = power_density_from_gain(
                gain_head_sel, cfg.tx_power_dbm, r_head,
                near_field_floor_m=cfg.near_field_floor_m)
            if rec["beams0"] is None:
                rec["beams0"] = (beam_ue, decision.selected, d0)

    return recs


def _chunk_task(args: tuple[ScenarioConfig, list[tuple[int, int]]]) -> list[list[dict]]:
    cfg, points = args
    return [run_point(cfg, ix, iy) for ix, iy in points]


def run_scenario(cfg: ScenarioConfig, workers: int = 1) -> ScenarioResult:
    """Aggregate run_point over the grid; deterministic for a fixed seed."""
    cfg.validate()
    ctx = _context(cfg)
    grid = cfg.grid
    points = [(ix, iy) for ix in range(grid.nx) for iy in range(grid.ny)]

    if workers <= 1:
        per_point = [run_point(cfg, ix, iy) for ix, iy in points]
    else:
        chunks = [points[i::workers * 4] for i in range(workers * 4)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk_results = list(pool.map(_chunk_task, [(cfg, c) for c in chunks]))
        # reassemble in grid order regardless of chunk striding
        per_point_map: dict[tuple[int, int], list[dict]] = {}
        for chunk, res in zip(chunks, chunk_results):
            for pt, recs in zip(chunk, res):
                per_point_map[pt] = recs
        per_point = [per_point_map[pt] for pt in points]

    combos: dict[str, ComboResult] = {}
    t = cfg.trials_per_point
    for li, level in enumerate(cfg.crossover_levels):
        for avoidance in (False, True):
            snr_key = "snr_on" if avoidance else "snr_off"
            exp_key = "exp_on" if avoidance else "exp_off"
            snr_all, exp_all, trig_all, mute_all, hdist_all = [], [], [], [], []
            exp_map = np.zeros((grid.nx, grid.ny))
            beam_m = np.zeros((grid.nx, grid.ny), dtype=int)
            beam_n = np.zeros((grid.nx, grid.ny), dtype=int)
            d0_map = np.zeros((grid.nx, grid.ny))
            for (ix, iy), recs in zip(points, per_point):
                rec = recs[li]
                snr_all.append(rec[snr_key])
                exp_all.append(rec[exp_key])
                trig_all.append(rec["triggered"])
                mute_all.append(rec["muted"])
                hdist_all.append(rec["head_dist"])
                exp_map[ix, iy] = float(np.mean(rec[exp_key]))
                initial0, selected0, d0_0 = rec["beams0"]
                b = selected0 if avoidance else initial0
                beam_m[ix, iy], beam_n[ix, iy] = b.m, b.n
                d0_map[ix, iy] = d0_0
            snr = np.concatenate(snr_all)
            muted = np.concatenate(mute_all)
            exposure = np.sort(np.concatenate(exp_all))
            if avoidance:
                snr_sorted = np.sort(snr[~muted])
                trig_rate = float(np.mean(np.concatenate(trig_all)))
                mute_rate = float(np.mean(muted))
                hdist = np.concatenate(hdist_all)
                mean_hdist = float(np.nanmean(hdist)) if hdist.size else 0.0
            else:
                snr_sorted = np.sort(snr)
                trig_rate = 0.0
                mute_rate = 0.0
                mean_hdist = math.nan
            combo = ComboResult(
                level=level, avoidance=avoidance, snr_db=snr_sorted,
                exposure_mw_cm2=exposure, exposure_map=exp_map,
                beam_map_m=beam_m, beam_map_n=beam_n, d0_map=d0_map,
                trigger_rate=trig_rate, mute_rate=mute_rate,
                mean_head_beam_distance=mean_hdist,
            )
            combos[combo.key] = combo
    return ScenarioResult(config=cfg, combos=combos)


@dataclass(frozen=True)
class SweepRow:
    d0: float
    mean_exposure_mw_cm2: float
    median_snr_db: float
    mean_head_beam_distance: float


def sweep_d0(cfg: ScenarioConfig, d0_values: list[float],
             workers: int = 1) -> list[SweepRow]:
    """Re-run the scenario with each uniform d0 replacing the band tables.

    Rows report the finest configured codebook with avoidance on.
    """
    finest = min(cfg.crossover_levels)
    rows = []
    for d0 in d0_values:
        uniform = AvoidancePolicy(bands=((math.inf, float(d0)),))
        cfg_d0 = replace(
            cfg, policies=tuple((lvl, uniform) for lvl, _ in cfg.policies))
        result = run_scenario(cfg_d0, workers=workers)
        combo = result.combo(finest, avoidance=True)
        median_snr = float(np.percentile(combo.snr_db, 50)) if combo.snr_db.size else MUTED_SNR_DB
        rows.append(SweepRow(
            d0=float(d0),
            mean_exposure_mw_cm2=float(np.mean(combo.exposure_mw_cm2)),
            median_snr_db=median_snr,
            mean_head_beam_distance=combo.mean_head_beam_distance,
        ))
    return rows
