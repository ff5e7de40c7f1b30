"""Global reliability score of a depth map.

The score grows with a low mean depth (far-dominated scene), a large
mean-to-spread ratio and a spread of pixels over several depth levels. A
constant map carries no information and scores zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_LEVELS = (0.4, 0.6)
SIGMA_EPS = 1e-6


@dataclass(frozen=True)
class DepthConfidence:
    lambda_d: float
    m_d: float
    sigma_d: float
    cv: float
    entropy: float
    level_probs: tuple[float, ...]


def _check_thresholds(thresholds: Sequence[float]) -> np.ndarray:
    t = np.asarray(thresholds, dtype=np.float64).ravel()
    if t.size and (np.any(np.diff(t) <= 0) or t[0] <= 0 or t[-1] >= 1):
        raise ValueError(f"thresholds must be strictly ascending inside (0, 1), got {list(t)}")
    return t


def depth_entropy(depth: np.ndarray, thresholds: Sequence[float] = DEFAULT_LEVELS):
    """Entropy of the depth-level histogram.

    Level k holds values in ``[T_{k-1}, T_k)`` with ``T_0 = 0``; the last level
    is closed so that 1.0 lands in it.

    Returns:
        ``(entropy, level_probs)`` with natural-log entropy in ``[0, ln L]``.
    """
    depth = np.asarray(depth, dtype=np.float64)
    if depth.size == 0:
        raise ValueError("depth field is empty")
    t = _check_thresholds(thresholds)
    levels = np.searchsorted(t, depth.ravel(), side="right")
    counts = np.bincount(levels, minlength=t.size + 1)
    probs = counts / counts.sum()
    nz = probs[probs > 0]
    entropy = float(-(nz * np.log(nz)).sum())
    return max(0.0, entropy), tuple(float(p) for p in probs)


def confidence_from_stats(m_d: float, sigma_d: float, entropy: float) -> float:
    """exp((1 - m) * (m / sigma) * H) - 1, zero for a degenerate spread."""
    if sigma_d < SIGMA_EPS:
        return 0.0
    cv = m_d / sigma_d
    return float(np.expm1((1.0 - m_d) * cv * entropy))


def depth_confidence(depth: np.ndarray, thresholds: Sequence[float] = DEFAULT_LEVELS) -> DepthConfidence:
    depth = np.asarray(depth, dtype=np.float64)
    entropy, probs = depth_entropy(depth, thresholds)
    m_d = float(depth.mean())
    sigma_d = float(depth.std())
    # cv is reported as 0 when the spread is degenerate
    cv = m_d / sigma_d if sigma_d >= SIGMA_EPS else 0.0
    lam = confidence_from_stats(m_d, sigma_d, entropy)
    # m_d can overshoot 1 by an ulp on all-ones input
    lam = max(0.0, lam)
    return DepthConfidence(lam, m_d, sigma_d, cv, entropy, probs)
