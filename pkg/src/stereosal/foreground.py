"""Foreground seeds and seed-contrast saliency."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dataset import minmax
from .diffusion import DiffusionOperator, manifold_rank
from .graph import SuperpixelSet

log = logging.getLogger(__name__)

FALLBACK_FRACTION = 0.10


@dataclass(frozen=True)
class SeedSet:
    preliminary: np.ndarray
    refined: np.ndarray
    mean_seed_depth: float

    def __len__(self):
        return len(self.refined)


def select_seeds_drss(s_cs, depths, tau: float = 0.5, refine: bool = True) -> SeedSet:
    """Depth-refined seed selection.

    Regions scoring above ``tau`` form the preliminary set; of those, only the
    ones at least as near as the preliminary mean depth are kept. If nothing
    passes ``tau`` the top 10% by score are used instead; if refinement empties
    the set the preliminary seeds are kept unrefined.

    Args:
        s_cs: per-region compactness saliency, min-max normalized.
        depths: per-region mean depth, 1.0 = near.
        tau: preliminary threshold.
        refine: set to False to skip the depth step (ablation).
    """
    s_cs = np.asarray(s_cs, dtype=np.float64)
    depths = np.asarray(depths, dtype=np.float64)
    prelim = np.flatnonzero(s_cs > tau)
    if prelim.size == 0:
        k = max(1, int(np.ceil(FALLBACK_FRACTION * s_cs.size)))
        prelim = np.sort(np.argsort(-s_cs, kind="stable")[:k])
        log.warning("no region above tau=%.3f, falling back to top %d regions", tau, k)
    mean_depth = float(depths[prelim].mean())
    if not refine:
        return SeedSet(prelim, prelim.copy(), mean_depth)
    refined = prelim[depths[prelim] >= mean_depth]
    if refined.size == 0:
        # only reachable through rounding in the mean
        log.warning("depth refinement removed every seed, keeping preliminary set")
        refined = prelim.copy()
    return SeedSet(prelim, refined, mean_depth)


def texture_similarity(k_i, k_j) -> float:
    """Cosine similarity of two LBP histograms, 0 when either is all zeros."""
    k_i = np.asarray(k_i, dtype=np.float64)
    k_j = np.asarray(k_j, dtype=np.float64)
    denom = np.linalg.norm(k_i) * np.linalg.norm(k_j)
    if denom == 0:
        log.warning("zero-norm texture histogram")
        return 0.0
    return float(abs(k_i @ k_j) / denom)


def texture_similarity_matrix(hist: np.ndarray, cols=None) -> np.ndarray:
    hist = np.asarray(hist, dtype=np.float64)
    norms = np.linalg.norm(hist, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = hist / safe[:, None]
    unit[norms == 0] = 0.0
    other = unit if cols is None else unit[cols]
    return np.abs(unit @ other.T)


def foreground_contrast(A: np.ndarray, features: SuperpixelSet, seeds, sigma2: float = 0.1,
                        normalize_positions: bool = True) -> np.ndarray:
    """Size-weighted similarity of every region to the seed regions.

    Each seed j contributes ``a_ij * D_t(i, j) * exp(-dist_ij / sigma2) * n_j``
    where ``dist_ij`` is the centroid distance, divided by the image diagonal
    when ``normalize_positions`` is set.
    """
    idx = np.asarray(getattr(seeds, "refined", seeds), dtype=np.intp)
    if idx.size == 0:
        raise ValueError("foreground contrast needs at least one seed")
    b = features.centroid
    dist = np.linalg.norm(b[:, None, :] - b[None, idx, :], axis=2)
    if normalize_positions:
        dist = dist / features.diagonal
    tex = texture_similarity_matrix(features.lbp_hist, idx)
    terms = np.asarray(A)[:, idx] * tex * np.exp(-dist / sigma2) * features.pixel_count[idx][None, :]
    return terms.sum(axis=1)


def finalize_foreground(s_fg: np.ndarray, op: DiffusionOperator) -> np.ndarray:
    """Normalize, propagate over the graph and normalize again (per region)."""
    return minmax(manifold_rank(op, minmax(s_fg)))
