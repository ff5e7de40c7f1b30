"""Saliency detection for RGB-D images from depth confidence, compactness and seed contrast."""

__version__ = "0.1.0"

from .confidence import DepthConfidence, depth_confidence, depth_entropy
from .dataset import RgbdSample, SaliencyMap, load_rgbd_pair, scan_dataset, write_saliency_map
from .evaluation import EvalReport, aggregate, f_measure, mae, pr_curve
from .pipeline import PipelineConfig, PipelineOutput, fuse, run_pipeline

__all__ = [
    "DepthConfidence", "depth_confidence", "depth_entropy",
    "RgbdSample", "SaliencyMap", "load_rgbd_pair", "scan_dataset", "write_saliency_map",
    "EvalReport", "aggregate", "f_measure", "mae", "pr_curve",
    "PipelineConfig", "PipelineOutput", "fuse", "run_pipeline",
]
