"""CAM-family explanation maps aligned to the input grid."""

from .maps import NORMALIZATIONS, ExplanationMap, align_channel_maps, normalize_map, normalize_values, resample_time
from .methods import (
    CAM_FAMILY,
    METHODS,
    CamContext,
    ablation_cam,
    activation_smoothed_score_cam,
    cam,
    channel_weights,
    explain,
    explain_batch,
    grad_cam,
    grad_cam_pp,
    input_smoothed_score_cam,
    integrated_score_cam,
    score_cam,
    smooth_grad_cam_pp,
    xgrad_cam,
)

__all__ = [
    "CAM_FAMILY",
    "METHODS",
    "NORMALIZATIONS",
    "CamContext",
    "ExplanationMap",
    "ablation_cam",
    "activation_smoothed_score_cam",
    "align_channel_maps",
    "cam",
    "channel_weights",
    "explain",
    "explain_batch",
    "grad_cam",
    "grad_cam_pp",
    "input_smoothed_score_cam",
    "integrated_score_cam",
    "normalize_map",
    "normalize_values",
    "resample_time",
    "score_cam",
    "smooth_grad_cam_pp",
    "xgrad_cam",
]
