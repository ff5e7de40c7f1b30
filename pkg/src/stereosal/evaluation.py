"""Saliency benchmark metrics: PR curve, adaptive-threshold F-measure, MAE."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .dataset import SaliencyMap, to_uint8

log = logging.getLogger(__name__)

BETA2 = 0.3
N_THRESHOLDS = 256


class EvaluationError(ValueError):
    pass


def _values(pred) -> np.ndarray:
    v = pred.values if isinstance(pred, SaliencyMap) else pred
    return np.asarray(v, dtype=np.float64)


def _check(pred: np.ndarray, gt: np.ndarray, need_positive: bool = True) -> np.ndarray:
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise EvaluationError(f"dimension mismatch: prediction {pred.shape}, ground truth {gt.shape}")
    gt = gt.astype(bool)
    if need_positive and not gt.any():
        raise EvaluationError("ground truth has no positive pixel")
    return gt


def _precision_recall(mask: np.ndarray, gt: np.ndarray) -> tuple[float, float]:
    tp = np.count_nonzero(mask & gt)
    fp = np.count_nonzero(mask & ~gt)
    fn = np.count_nonzero(~mask & gt)
    precision = tp / (tp + fp) if tp + fp > 0 else 1.0
    recall = tp / (tp + fn)
    return precision, recall


def pr_curve(pred, gt) -> np.ndarray:
    """Precision and recall at every 8-bit threshold.

    Returns:
        (256, 2) array; row t holds (precision, recall) of the mask
        ``round(pred * 255) >= t``. An empty mask has precision 1.
    """
    p = _values(pred)
    gt = _check(p, gt)
    levels = to_uint8(p).ravel()
    pos = gt.ravel()
    # cumulative counts from the top level down give the confusion matrix for each t at once
    hist_pos = np.bincount(levels[pos], minlength=N_THRESHOLDS)
    hist_neg = np.bincount(levels[~pos], minlength=N_THRESHOLDS)
    tp = np.cumsum(hist_pos[::-1])[::-1].astype(np.float64)
    fp = np.cumsum(hist_neg[::-1])[::-1].astype(np.float64)
    n_pos = float(pos.sum())
    selected = tp + fp
    precision = np.divide(tp, selected, out=np.ones_like(tp), where=selected > 0)
    recall = tp / n_pos
    return np.stack([precision, recall], axis=1)


def f_beta(precision: float, recall: float, beta2: float = BETA2) -> float:
    denom = beta2 * precision + recall
    if denom <= 0:
        return 0.0
    return (1.0 + beta2) * precision * recall / denom


def adaptive_threshold(pred) -> float:
    return min(2.0 * float(_values(pred).mean()), 1.0)


def f_measure(pred, gt, beta2: float = BETA2) -> tuple[float, float, float]:
    """Precision, recall and F at the adaptive threshold ``min(2 * mean, 1)``."""
    p = _values(pred)
    gt = _check(p, gt)
    mask = p >= adaptive_threshold(p)
    precision, recall = _precision_recall(mask, gt)
    return precision, recall, f_beta(precision, recall, beta2)


def mae(pred, gt) -> float:
    p = _values(pred)
    g = np.asarray(_values(gt) if isinstance(gt, SaliencyMap) else gt, dtype=np.float64)
    if p.shape != g.shape:
        raise EvaluationError(f"dimension mismatch: {p.shape} vs {g.shape}")
    return float(np.abs(p - g).mean())


@dataclass
class ImageScore:
    id: str
    precision: float
    recall: float
    f_measure: float
    mae: float
    pr: np.ndarray = field(repr=False)


def score_image(pred, gt, sample_id: str = "", beta2: float = BETA2) -> ImageScore:
    p = _values(pred)
    curve = pr_curve(p, gt)
    precision, recall, f = f_measure(p, gt, beta2)
    return ImageScore(sample_id, precision, recall, f, mae(p, gt), curve)


@dataclass
class EvalReport:
    rows: list[ImageScore]
    precision: float
    recall: float
    f_measure: float
    mae: float
    pr_curve: np.ndarray  # (256, 3): threshold, mean precision, mean recall
    excluded: list[str] = field(default_factory=list)

    def write_csv(self, path) -> Path:
        """Write the per-image table and a sibling ``*_pr.csv`` curve file.

        Returns:
            Path of the PR-curve file.
        """
        path = Path(path)
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["id", "precision", "recall", "f_measure", "mae"])
            for r in self.rows:
                wr.writerow([r.id, f"{r.precision:.6f}", f"{r.recall:.6f}", f"{r.f_measure:.6f}", f"{r.mae:.6f}"])
            wr.writerow(["__mean__", f"{self.precision:.6f}", f"{self.recall:.6f}",
                         f"{self.f_measure:.6f}", f"{self.mae:.6f}"])
        pr_path = path.with_name(path.stem + "_pr.csv")
        with pr_path.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["threshold", "precision", "recall"])
            for t, p, r in self.pr_curve:
                wr.writerow([int(t), f"{p:.6f}", f"{r:.6f}"])
        return pr_path


def aggregate(rows: Iterable[ImageScore], excluded: Optional[list[str]] = None) -> EvalReport:
    """Unweighted mean over images; the PR curve is averaged per threshold."""
    rows = list(rows)
    if not rows:
        raise EvaluationError("no valid samples to aggregate")
    curves = np.stack([r.pr for r in rows])
    mean_curve = curves.mean(axis=0)
    pr = np.column_stack([np.arange(N_THRESHOLDS), mean_curve])
    return EvalReport(
        rows=rows,
        precision=float(np.mean([r.precision for r in rows])),
        recall=float(np.mean([r.recall for r in rows])),
        f_measure=float(np.mean([r.f_measure for r in rows])),
        mae=float(np.mean([r.mae for r in rows])),
        pr_curve=pr,
        excluded=list(excluded or []),
    )


def evaluate(pairs) -> EvalReport:
    """Score ``(id, pred, gt)`` triples, skipping images without positives."""
    rows, excluded = [], []
    for sid, pred, gt in pairs:
        try:
            rows.append(score_image(pred, gt, sid))
        except EvaluationError as exc:
            log.warning("excluding %s: %s", sid, exc)
            excluded.append(sid)
    return aggregate(rows, excluded)
