"""TOML experiment configs: load, apply defaults, echo back.

Every key is optional; omitted sections fall back to the package
defaults. ``config_to_dict`` and ``config_from_dict`` round-trip so a
result's config echo can reproduce the run.
"""

from __future__ import annotations

import sys
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .antenna import ArrayConfig, ElementPattern
from .avoidance import AvoidancePolicy
from .channel import ChannelParams
from .codebook import SectorSpan
from .geometry import ArrayPose, Point3D
from .scenario import POSE_A, POSE_B, GridSpec, PedestrianPose, ScenarioConfig
from .vision import CvErrorModel


class ConfigError(ValueError):
    pass


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"{path}: config file not found") from exc
    except tomllib.TOMLDecodeError as exc:
        # TOMLDecodeError messages carry "at line N, column M"
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        return config_from_dict(data)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def pose_from_dict(d: dict[str, Any]) -> PedestrianPose:
    name = d.get("name", "A")
    base = {"A": POSE_A, "B": POSE_B}.get(name)
    if base is not None and set(d) <= {"name"}:
        return base
    return PedestrianPose(
        name=name,
        head_height_m=d.get("head_height_m", 1.7),
        ue_forward_m=d.get("ue_forward_m", 0.0),
        ue_lateral_m=d.get("ue_lateral_m", 0.0),
        ue_down_m=d.get("ue_down_m", 0.0),
    )


def named_pose(name: str) -> PedestrianPose:
    try:
        return {"A": POSE_A, "B": POSE_B}[name]
    except KeyError:
        raise ConfigError(f"unknown pose {name!r}; expected A or B") from None


def config_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    defaults = ScenarioConfig()

    el = data.get("element", {})
    element = ElementPattern(
        g_max_dbi=el.get("g_max_dbi", 8.0),
        hpbw_az_deg=el.get("hpbw_az_deg", 65.0),
        hpbw_el_deg=el.get("hpbw_el_deg", 65.0),
        front_back_db=el.get("front_back_db", 30.0),
        sla_v_db=el.get("sla_v_db", 30.0),
    )
    ar = data.get("array", {})
    array = ArrayConfig(
        n_h=ar.get("n_h", 32),
        n_v=ar.get("n_v", 32),
        d_h=ar.get("d_h", 0.5),
        d_v=ar.get("d_v", 0.5),
        carrier_freq_ghz=ar.get("carrier_freq_ghz", 28.0),
        element=element,
    )
    mt = data.get("mount", {})
    pos = mt.get("position", [0.0, 0.0, 5.0])
    mount = ArrayPose(
        position=Point3D(*pos),
        boresight_az_deg=mt.get("boresight_az_deg", 0.0),
        downtilt_deg=mt.get("downtilt_deg", defaults.mount.downtilt_deg),
    )
    se = data.get("sector", {})
    d_sec = defaults.sector
    sector = SectorSpan(
        az_min_deg=se.get("az_min_deg", d_sec.az_min_deg),
        az_max_deg=se.get("az_max_deg", d_sec.az_max_deg),
        tilt_min_deg=se.get("tilt_min_deg", d_sec.tilt_min_deg),
        tilt_max_deg=se.get("tilt_max_deg", d_sec.tilt_max_deg),
    )
    cb = data.get("codebook", {})
    levels = tuple(float(v) for v in cb.get("levels", [3.0, 0.5]))
    axes = cb.get("axes", "both")

    pol = data.get("policy", {})
    policies = []
    for level in levels:
        key = f"{level:g}"
        if key in pol:
            bands = tuple((float(r), float(d)) for r, d in pol[key]["bands"])
            policies.append((level, AvoidancePolicy(bands=bands)))
        else:
            policies.append((level, defaults.policy_for(level)
                             if _has_default_policy(defaults, level)
                             else AvoidancePolicy(bands=((6.7, 1.0),))))

    ch = data.get("channel", {})
    channel = ChannelParams(
        carrier_freq_ghz=ch.get("carrier_freq_ghz", array.carrier_freq_ghz),
        shadow_sigma_db=ch.get("shadow_sigma_db", 4.0),
        pathloss_model=ch.get("pathloss_model", "umi-street-canyon-los"),
    )

    vi = data.get("vision", {})
    if vi.get("enabled", True):
        cv = CvErrorModel(
            head_size_m=vi.get("head_size_m", 0.25),
            sigma_norm=vi.get("sigma_norm", CvErrorModel().sigma_norm),
            max_norm=vi.get("max_norm", 1.5),
        )
    else:
        cv = None

    sc = data.get("scenario", {})
    grid = GridSpec(
        x_min=sc.get("x_min", 1.0), x_max=sc.get("x_max", 6.0),
        y_min=sc.get("y_min", -2.0), y_max=sc.get("y_max", 2.0),
        step=sc.get("step", 0.1),
    )
    pose = pose_from_dict(data.get("pose", {"name": sc.get("pose", "A")}))

    return ScenarioConfig(
        array=array, mount=mount, sector=sector,
        crossover_levels=levels, policies=tuple(policies), codebook_axes=axes,
        channel=channel,
        bandwidth_mhz=sc.get("bandwidth_mhz", 100.0),
        noise_figure_db=sc.get("noise_figure_db", 9.0),
        tx_power_dbm=sc.get("tx_power_dbm", 20.0),
        exposure_limit_mw_cm2=sc.get("exposure_limit_mw_cm2", 0.3),
        near_field_floor_m=sc.get("near_field_floor_m", 0.5),
        cv=cv, pose=pose, grid=grid,
        trials_per_point=sc.get("trials_per_point", 20),
        seed=sc.get("seed", 1),
    )


def _has_default_policy(defaults: ScenarioConfig, level: float) -> bool:
    try:
        defaults.policy_for(level)
        return True
    except ValueError:
        return False


def config_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    """Echo a config as a plain dict that config_from_dict re-parses."""
    return {
        "array": {
            "n_h": cfg.array.n_h, "n_v": cfg.array.n_v,
            "d_h": cfg.array.d_h, "d_v": cfg.array.d_v,
            "carrier_freq_ghz": cfg.array.carrier_freq_ghz,
        },
        "element": {
            "g_max_dbi": cfg.array.element.g_max_dbi,
            "hpbw_az_deg": cfg.array.element.hpbw_az_deg,
            "hpbw_el_deg": cfg.array.element.hpbw_el_deg,
            "front_back_db": cfg.array.element.front_back_db,
            "sla_v_db": cfg.array.element.sla_v_db,
        },
        "mount": {
            "position": [cfg.mount.position.x, cfg.mount.position.y, cfg.mount.position.z],
            "boresight_az_deg": cfg.mount.boresight_az_deg,
            "downtilt_deg": cfg.mount.downtilt_deg,
        },
        "sector": {
            "az_min_deg": cfg.sector.az_min_deg, "az_max_deg": cfg.sector.az_max_deg,
            "tilt_min_deg": cfg.sector.tilt_min_deg, "tilt_max_deg": cfg.sector.tilt_max_deg,
        },
        "codebook": {"levels": list(cfg.crossover_levels), "axes": cfg.codebook_axes},
        "policy": {
            f"{level:g}": {"bands": [[r, d] for r, d in pol.bands]}
            for level, pol in cfg.policies
        },
        "channel": {
            "carrier_freq_ghz": cfg.channel.carrier_freq_ghz,
            "shadow_sigma_db": cfg.channel.shadow_sigma_db,
            "pathloss_model": cfg.channel.pathloss_model,
        },
        "vision": (
            {"enabled": True, "head_size_m": cfg.cv.head_size_m,
             "sigma_norm": cfg.cv.sigma_norm, "max_norm": cfg.cv.max_norm}
            if cfg.cv is not None else {"enabled": False}
        ),
        "pose": {
            "name": cfg.pose.name,
            "head_height_m": cfg.pose.head_height_m,
            "ue_forward_m": cfg.pose.ue_forward_m,
            "ue_lateral_m": cfg.pose.ue_lateral_m,
            "ue_down_m": cfg.pose.ue_down_m,
        },
        "scenario": {
            "x_min": cfg.grid.x_min, "x_max": cfg.grid.x_max,
            "y_min": cfg.grid.y_min, "y_max": cfg.grid.y_max,
            "step": cfg.grid.step,
            "bandwidth_mhz": cfg.bandwidth_mhz,
            "noise_figure_db": cfg.noise_figure_db,
            "tx_power_dbm": cfg.tx_power_dbm,
            "exposure_limit_mw_cm2": cfg.exposure_limit_mw_cm2,
            "near_field_floor_m": cfg.near_field_floor_m,
            "trials_per_point": cfg.trials_per_point,
            "seed": cfg.seed,
        },
    }
