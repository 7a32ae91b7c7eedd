"""TSEM / XCM / MTEX-CNN classifiers with CAM-family attribution and evaluation."""

__version__ = "0.1.0"
