"""Builders shared by the test modules."""

from pathlib import Path

import numpy as np
from PIL import Image

from stereosal.graph import SuperpixelSet


def make_features(b, n, d=None, k=None, shape=(240, 320), lab=None):
    """Build a SuperpixelSet directly from arrays, bypassing segmentation."""
    b = np.asarray(b, dtype=float)
    N = len(b)
    n = np.asarray(n)
    d = np.zeros(N) if d is None else np.asarray(d, dtype=float)
    k = np.ones((N, 256)) if k is None else np.asarray(k, dtype=float)
    lab = np.zeros((N, 3)) if lab is None else np.asarray(lab, dtype=float)
    return SuperpixelSet(lab, d, b, n, k, shape)


def save_gray(path, arr):
    Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(path)


def write_dataset(root: Path, samples, with_gt=True):
    """Write samples in the rgb/ depth/ gt/ layout (depth as 8-bit)."""
    for sub in ("rgb", "depth", "gt"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    for s in samples:
        Image.fromarray(s.rgb).save(root / "rgb" / f"{s.id}.png")
        save_gray(root / "depth" / f"{s.id}.png", np.round(s.depth * 255))
        if with_gt and s.gt is not None:
            save_gray(root / "gt" / f"{s.id}.png", s.gt * 255)
    return root
