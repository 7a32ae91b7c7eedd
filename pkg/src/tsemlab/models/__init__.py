"""MTEX-CNN, XCM and TSEM networks, training and checkpoints."""

from .checkpoint import load_model, read_checkpoint, save_model
from .config import ARCHITECTURES, ModelConfig, window_from_fraction
from .graph import MTEXCNN, TSEM, XCM, ModelGraph, build_model, build_mtexcnn, build_tsem, build_xcm
from .training import TrainReport, predict, predict_proba, train

__all__ = [
    "ARCHITECTURES",
    "MTEXCNN",
    "ModelConfig",
    "ModelGraph",
    "TSEM",
    "TrainReport",
    "XCM",
    "build_model",
    "build_mtexcnn",
    "build_tsem",
    "build_xcm",
    "load_model",
    "predict",
    "predict_proba",
    "read_checkpoint",
    "save_model",
    "train",
    "window_from_fraction",
]
