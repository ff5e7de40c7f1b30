"""Compactness saliency from color spread, depth spread and an objectness prior.

A region whose similar regions cluster tightly in the image (and near the
image center, for near depths) is considered salient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import SaliencyMap, minmax
from .graph import SegmentationMap, SuperpixelSet


@dataclass(frozen=True)
class CompactnessResult:
    cc: np.ndarray
    dc: np.ndarray
    mu: np.ndarray
    obj: np.ndarray
    s_cs: np.ndarray
    center: np.ndarray


def _weights(A_hat: np.ndarray, features: SuperpixelSet) -> tuple[np.ndarray, np.ndarray]:
    wn = np.asarray(A_hat, dtype=np.float64) * features.pixel_count[None, :]
    return wn, wn.sum(axis=1)


def spatial_mean(A_hat: np.ndarray, features: SuperpixelSet) -> np.ndarray:
    """Affinity- and size-weighted centroid seen from every region, (N, 2)."""
    wn, total = _weights(A_hat, features)
    return (wn @ features.centroid) / total[:, None]


def color_compactness(A_hat: np.ndarray, features: SuperpixelSet, mu: np.ndarray) -> np.ndarray:
    wn, total = _weights(A_hat, features)
    b = features.centroid
    spread = np.linalg.norm(b[None, :, :] - mu[:, None, :], axis=2)
    return (wn * spread).sum(axis=1) / total


def depth_compactness(A_hat: np.ndarray, features: SuperpixelSet, lambda_d: float,
                      sigma2: float = 0.1, depth_index: str = "i") -> np.ndarray:
    """Weighted distance of similar regions to the image center, damped by depth.

    ``depth_index="i"`` applies ``exp(-lambda_d * d_i / sigma2)`` of the region
    itself (outside the sum); ``"j"`` damps each summand by its own depth and is
    kept for ablation only.
    """
    wn, total = _weights(A_hat, features)
    dist_c = np.linalg.norm(features.centroid - features.image_center[None, :], axis=1)
    damp = np.exp(-lambda_d * features.mean_depth / sigma2)
    if depth_index == "i":
        return (wn @ dist_c) / total * damp
    if depth_index == "j":
        return (wn @ (dist_c * damp)) / total
    raise ValueError(f"depth_index must be 'i' or 'j', got {depth_index!r}")


def center_prior(features: SuperpixelSet) -> np.ndarray:
    """Gaussian prior on centroid distance to the image center, sigma = diag / 4."""
    dist2 = ((features.centroid - features.image_center[None, :]) ** 2).sum(axis=1)
    s = 0.25 * features.diagonal
    return np.exp(-dist2 / (2.0 * s * s))


def objectness_prior(features: SuperpixelSet, seg: Optional[SegmentationMap] = None,
                     external_map: Optional[np.ndarray] = None) -> np.ndarray:
    """Per-region objectness: mean of ``external_map`` or the center prior."""
    if external_map is None:
        return center_prior(features)
    m = np.asarray(external_map, dtype=np.float64)
    if seg is None:
        raise ValueError("an external objectness map needs the segmentation")
    if m.shape != tuple(features.image_shape):
        raise ValueError(f"objectness map shape {m.shape} does not match image {features.image_shape}")
    if not np.all(np.isfinite(m)) or m.min() < 0 or m.max() > 1:
        raise ValueError("objectness map values must lie in [0, 1]")
    labels = seg.labels.ravel()
    sums = np.bincount(labels, weights=m.ravel(), minlength=seg.n_actual)
    return sums / features.pixel_count


def compactness_saliency(cc: np.ndarray, dc: np.ndarray, obj: np.ndarray) -> np.ndarray:
    cc, dc, obj = (np.asarray(v, dtype=np.float64) for v in (cc, dc, obj))
    if not cc.shape == dc.shape == obj.shape:
        raise ValueError("cc, dc and obj must have equal length")
    return (1.0 - minmax(cc + dc)) * obj


def pixelize(scores: np.ndarray, seg: SegmentationMap, sample_id: str = "") -> SaliencyMap:
    """Paint each region with its score and min-max normalize the image."""
    scores = np.asarray(scores, dtype=np.float64)
    return SaliencyMap(minmax(scores[seg.labels]), sample_id)


def compute_compactness(A_hat: np.ndarray, features: SuperpixelSet, lambda_d: float,
                        sigma2: float = 0.1, obj: Optional[np.ndarray] = None,
                        depth_index: str = "i") -> CompactnessResult:
    mu = spatial_mean(A_hat, features)
    cc = color_compactness(A_hat, features, mu)
    dc = depth_compactness(A_hat, features, lambda_d, sigma2, depth_index)
    if obj is None:
        obj = center_prior(features)
    s_cs = compactness_saliency(cc, dc, obj)
    return CompactnessResult(cc, dc, mu, obj, s_cs, features.image_center)
