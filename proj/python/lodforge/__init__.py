"""Structure-aware level-of-detail building models."""

from ._lodforge import (
    LodforgeError,
    check_obj,
    load_manifest,
    mean_shift_1d,
    rmse,
    run_pipeline,
    synth,
)

__all__ = [
    "LodforgeError",
    "check_obj",
    "load_manifest",
    "mean_shift_1d",
    "rmse",
    "run_pipeline",
    "synth",
]
