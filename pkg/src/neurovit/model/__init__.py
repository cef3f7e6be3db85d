"""The 3D-patch vision transformer: config, parameters, forward, checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import PRESETS, ModelConfig, nit, vit_b16_3d
from .vit import (
    LN_EPS,
    ParamStore,
    classify,
    count_params,
    encoder_forward,
    extract_patches,
    init_params,
    param_shapes,
    patch_embed,
    predict_proba,
)

__all__ = [
    "LN_EPS",
    "PRESETS",
    "ModelConfig",
    "ParamStore",
    "classify",
    "count_params",
    "encoder_forward",
    "extract_patches",
    "init_params",
    "load_checkpoint",
    "nit",
    "param_shapes",
    "patch_embed",
    "predict_proba",
    "save_checkpoint",
    "vit_b16_3d",
]
