"""Superpixel abstraction of an RGB-D image and the region affinity graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist
from skimage.color import rgb2lab
from skimage.measure import label as cc_label
from skimage.segmentation import slic

from .dataset import RgbdSample

LBP_BINS = 256


@dataclass(frozen=True)
class SegmentationMap:
    labels: np.ndarray
    n_actual: int

    @property
    def shape(self):
        return self.labels.shape


@dataclass(frozen=True)
class SuperpixelSet:
    """Per-region features, one row per superpixel.

    Attributes:
        mean_lab: (N, 3) CIE Lab means (L in [0, 100]).
        mean_depth: (N,) mean normalized depth.
        centroid: (N, 2) pixel centroids as (x, y).
        pixel_count: (N,) region areas.
        lbp_hist: (N, 256) raw LBP code counts; row i sums to pixel_count[i].
    """

    mean_lab: np.ndarray
    mean_depth: np.ndarray
    centroid: np.ndarray
    pixel_count: np.ndarray
    lbp_hist: np.ndarray
    image_shape: tuple[int, int]

    def __len__(self):
        return len(self.pixel_count)

    @property
    def image_center(self) -> np.ndarray:
        h, w = self.image_shape
        return np.array([(w - 1) / 2.0, (h - 1) / 2.0])

    @property
    def diagonal(self) -> float:
        h, w = self.image_shape
        return float(np.hypot(h, w))


@dataclass(frozen=True)
class AffinityGraph:
    """Dense pairwise affinity ``A`` and its adjacency-restricted copy ``W``."""

    A: np.ndarray
    W: sp.csr_matrix
    adjacency: np.ndarray  # boolean (N, N), False on the diagonal
    lambda_d: float
    sigma2: float

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])


def relabel_connected(labels: np.ndarray) -> np.ndarray:
    """Split every label into its 4-connected pieces and renumber from 0."""
    out = cc_label(labels + 1, background=0, connectivity=1)
    return (out - 1).astype(np.int32)


def slic_segment(rgb: np.ndarray, n_superpixels: int = 200, compactness: float = 10.0,
                 max_iter: int = 10) -> SegmentationMap:
    """SLIC over-segmentation with 4-connected, contiguous labels.

    Centers are grid seeded, so the result is deterministic. The number of
    regions can differ a little from ``n_superpixels``.
    """
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[0] < 2 or rgb.shape[1] < 2:
        raise ValueError(f"image must be at least 2x2 with 3 channels, got {rgb.shape}")
    h, w = rgb.shape[:2]
    if not 2 <= n_superpixels <= h * w:
        raise ValueError(f"n_superpixels must be in [2, {h * w}], got {n_superpixels}")
    labels = slic(
        rgb, n_segments=n_superpixels, compactness=compactness, max_num_iter=max_iter,
        start_label=0, enforce_connectivity=True, convert2lab=True, channel_axis=-1,
        # orphans below a quarter of the grid cell are merged, as in the original SLIC
        min_size_factor=0.25,
    )
    labels = relabel_connected(labels)
    return SegmentationMap(labels, int(labels.max()) + 1)


def lbp_codes(gray: np.ndarray) -> np.ndarray:
    """8-neighbour, radius-1 local binary pattern codes.

    Bit k is set when neighbour k is >= the centre pixel; neighbours are taken
    clockwise from the top-left. Borders use edge replication.
    """
    g = np.asarray(gray, dtype=np.float64)
    p = np.pad(g, 1, mode="edge")
    h, w = g.shape
    offsets = [(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)]
    codes = np.zeros((h, w), dtype=np.int32)
    for bit, (dy, dx) in enumerate(offsets):
        nb = p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
        codes |= (nb >= g).astype(np.int32) << bit
    return codes


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=np.float64)
    return rgb[..., 0] * 0.299 + rgb[..., 1] * 0.587 + rgb[..., 2] * 0.114


def _as_float_rgb(rgb: np.ndarray) -> np.ndarray:
    if np.issubdtype(rgb.dtype, np.integer):
        return rgb.astype(np.float64) / np.iinfo(rgb.dtype).max
    return rgb.astype(np.float64)


def extract_features(sample: RgbdSample, seg: SegmentationMap) -> SuperpixelSet:
    if seg.labels.shape != sample.shape:
        raise ValueError(f"segmentation {seg.labels.shape} does not match sample {sample.shape}")
    labels = seg.labels.ravel()
    n = seg.n_actual
    h, w = sample.shape

    counts = np.bincount(labels, minlength=n).astype(np.float64)
    if np.any(counts == 0):
        raise ValueError("segmentation has empty labels")

    def region_mean(values):
        return np.bincount(labels, weights=values, minlength=n) / counts

    rgb_f = _as_float_rgb(sample.rgb)
    lab = rgb2lab(rgb_f).reshape(-1, 3)
    mean_lab = np.stack([region_mean(lab[:, c]) for c in range(3)], axis=1)
    mean_depth = region_mean(sample.depth.ravel())

    ys, xs = np.indices((h, w))
    centroid = np.stack([region_mean(xs.ravel()), region_mean(ys.ravel())], axis=1)

    codes = lbp_codes(rgb_to_gray(rgb_f)).ravel()
    hist = np.bincount(labels * LBP_BINS + codes, minlength=n * LBP_BINS)
    hist = hist.reshape(n, LBP_BINS).astype(np.float64)

    return SuperpixelSet(mean_lab, mean_depth, centroid, counts.astype(np.int64), hist, (h, w))


def region_adjacency(labels: np.ndarray, n: int, ring: int = 1) -> np.ndarray:
    """Boolean matrix of regions sharing a pixel edge, widened to ``ring`` hops."""
    a = labels[:, :-1].ravel(), labels[:, 1:].ravel()
    b = labels[:-1, :].ravel(), labels[1:, :].ravel()
    src = np.concatenate([a[0], b[0]])
    dst = np.concatenate([a[1], b[1]])
    keep = src != dst
    adj = np.zeros((n, n), dtype=bool)
    adj[src[keep], dst[keep]] = True
    adj |= adj.T
    if ring > 1:
        reach = adj.copy()
        step = adj.astype(np.int64)
        hop = step.copy()
        for _ in range(ring - 1):
            hop = (hop @ step > 0).astype(np.int64)
            reach |= hop.astype(bool)
        np.fill_diagonal(reach, False)
        adj = reach
    return adj


def normalized_lab(mean_lab: np.ndarray) -> np.ndarray:
    """Scale Lab into [0, 1]^3 so color and depth distances are commensurable."""
    lab = np.asarray(mean_lab, dtype=np.float64)
    return np.stack([lab[:, 0] / 100.0, (lab[:, 1] + 128.0) / 255.0,
                     (lab[:, 2] + 128.0) / 255.0], axis=1)


def affinity_matrix(lab01: np.ndarray, depth: np.ndarray, lambda_d: float, sigma2: float) -> np.ndarray:
    """a_ij = exp(-(||c_i - c_j|| + lambda_d * |d_i - d_j|) / sigma2)."""
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    color_dist = cdist(lab01, lab01)
    depth = np.asarray(depth, dtype=np.float64)
    depth_dist = np.abs(depth[:, None] - depth[None, :])
    A = np.exp(-(color_dist + lambda_d * depth_dist) / sigma2)
    # cdist is symmetric up to rounding; enforce it exactly
    A = np.triu(A) + np.triu(A, 1).T
    np.fill_diagonal(A, 1.0)
    return A


def build_affinity(features: SuperpixelSet, seg: SegmentationMap, lambda_d: float,
                   sigma2: float = 0.1, ring: int = 1) -> AffinityGraph:
    A = affinity_matrix(normalized_lab(features.mean_lab), features.mean_depth, lambda_d, sigma2)
    adj = region_adjacency(seg.labels, seg.n_actual, ring)
    W = sp.csr_matrix(np.where(adj, A, 0.0))
    return AffinityGraph(A, W, adj, float(lambda_d), float(sigma2))
