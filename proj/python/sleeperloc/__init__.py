"""Sleeper-anchored subway localization: geometry, simulation, estimation, metrics."""

from ._core import (
    CorrectionFactor,
    DetectionScore,
    Homography,
    SleeperlocError,
    apply_homography,
    calibrate_pixel_scale,
    cli_main,
    compare_scenario,
    correction_factor,
    estimate_homography,
    invert_homography,
    nearest_sleeper_phase,
    peak_detect,
    pixel_to_world,
    remainder_gamma,
    render_aerial_strip,
    score_detections,
    sensor_distance,
    sleeper_count,
    visible_sleepers,
)

__all__ = [
    "CorrectionFactor",
    "DetectionScore",
    "Homography",
    "SleeperlocError",
    "apply_homography",
    "calibrate_pixel_scale",
    "cli_main",
    "compare_scenario",
    "correction_factor",
    "estimate_homography",
    "invert_homography",
    "nearest_sleeper_phase",
    "peak_detect",
    "pixel_to_world",
    "remainder_gamma",
    "render_aerial_strip",
    "score_detections",
    "sensor_distance",
    "sleeper_count",
    "visible_sleepers",
]
