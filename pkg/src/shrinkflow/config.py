"""Runtime configuration: every tolerance/threshold used anywhere in the lab.

All verdict-bearing numbers live here so that outputs can embed the effective
config and runs stay auditable.  The environment variable SHRINKFLOW_CONFIG may
point at a JSON file whose keys override individual fields.
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

ENV_VAR = "SHRINKFLOW_CONFIG"


@dataclass(frozen=True)
class LabConfig:
    # entropy supremum search
    grid_points_space: int = 17        # per axis over [-R, R]
    grid_points_scale: int = 25        # log-spaced t0 values
    refine_seeds: int = 8              # grid maxima refined by ascent
    ascent_max_iter: int = 200
    ascent_grad_tol: float = 1e-8
    mesh_floor_factor: float = 10.0    # t_min = (factor * node spacing)^2

    # curve handling
    collapse_rel: float = 1e-12        # drop segments shorter than this * length

    # flow stepping
    dt_safety: float = 0.2             # dt = safety * h^2 * min(1, 1/max(k^2 h^2, 1))
    refine_angle: float = 0.2          # double N when max|k|*h exceeds this (radians)
    node_cap: int = 8192
    k_stop_factor: float = 30.0        # stop when max|k| > factor * initial max|k|
    fit_window: float = 0.25           # trailing fraction of samples used for T_est fit
    sample_every: int = 25             # record a sample every this many steps

    # singularity classification
    slope_band_lo: float = -0.6        # type-I band for d log max|k| / d log(T-t)
    slope_band_hi: float = -0.4
    match_threshold: float = 5e-2      # rotation-optimized Hausdorff / profile length
    rotation_step_deg: float = 1.0

    # spectral
    spectral_zero_tol: float = 2e-2    # |mu| below this is treated as the zero mode
    eigen_cluster_tol: float = 5e-2    # eigenspace grouping for known-pair checks
    gs_drop_tol: float = 1e-10

    # shrinker construction
    shoot_angle_tol: float = 1e-12     # |lobe angle - pi m/n| after shooting
    profile_dense_nodes: int = 8192    # dense theta grid for profile assembly

    # piecewise driver
    jump_margin: float = 1e-3          # required entropy drop below excluded shrinker
    jump_eps: float = 0.1              # line-search starts at +-eps, halved per level
    jump_eps_levels: int = 6
    jump_trigger_factor: float = 10.0  # jump allowed once max|k| > factor * initial
    graph_sup_limit: float = 0.1       # rescaled slice must be a graph within this
    max_jumps: int = 8


def default_config() -> LabConfig:
    return LabConfig()


def load_config(path: str | None = None) -> LabConfig:
    """Default config, with overrides from `path` or $SHRINKFLOW_CONFIG if set."""
    path = path or os.environ.get(ENV_VAR)
    cfg = LabConfig()
    if not path:
        return cfg
    with open(path, "r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    unknown = set(overrides) - {f.name for f in dataclasses.fields(LabConfig)}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return dataclasses.replace(cfg, **overrides)


def config_asdict(cfg: LabConfig) -> dict:
    return dataclasses.asdict(cfg)
