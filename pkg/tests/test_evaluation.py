import csv

import numpy as np
import pytest

from oracles import confusion
from stereosal.evaluation import (
    EvaluationError, aggregate, evaluate, f_beta, f_measure, mae, pr_curve, score_image,
)


class TestPrCurve:
    def test_perfect(self):
        gt = np.zeros((6, 6), np.uint8)
        gt[1:4, 2:5] = 1
        curve = pr_curve(gt.astype(float), gt)
        assert curve.shape == (256, 2)
        np.testing.assert_array_equal(curve[1:], 1.0)

    def test_all_zero_prediction(self):
        gt = np.array([[1, 0], [0, 1]])
        curve = pr_curve(np.zeros((2, 2)), gt)
        assert curve[0, 1] == 1.0
        assert np.all(curve[1:, 1] == 0.0)
        assert np.all(curve[1:, 0] == 1.0)  # empty mask

    def test_toy(self):
        pred = np.array([1.0, 0.6, 0.4, 0.0])
        gt = np.array([1, 1, 0, 0])
        curve = pr_curve(pred, gt)
        assert tuple(curve[128]) == (1.0, 1.0)
        assert curve[102, 0] == pytest.approx(2 / 3) and curve[102, 1] == 1.0

    def test_against_confusion_oracle(self):
        rng = np.random.default_rng(0)
        pred = rng.uniform(size=200)
        gt = rng.uniform(size=200) < 0.3
        levels = [int(np.floor(p * 255 + 0.5)) for p in pred]
        curve = pr_curve(pred, gt)
        for t in range(0, 256, 17):
            tp, fp, fn = confusion(levels, gt, t)
            p = tp / (tp + fp) if tp + fp else 1.0
            assert curve[t, 0] == pytest.approx(p)
            assert curve[t, 1] == pytest.approx(tp / (tp + fn))

    def test_empty_gt(self):
        with pytest.raises(EvaluationError):
            pr_curve(np.zeros((2, 2)), np.zeros((2, 2)))

    def test_recall_monotone(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            shape = tuple(rng.integers(2, 20, size=2))
            gt = rng.uniform(size=shape) < rng.uniform(0.05, 0.9)
            gt.flat[0] = True
            r = pr_curve(rng.uniform(size=shape), gt)[:, 1]
            assert r[0] == 1.0
            assert np.all(np.diff(r) <= 0)


class TestFMeasure:
    def test_perfect(self):
        gt = np.zeros((10, 10))
        gt[2:5, 2:5] = 1
        assert f_measure(gt, gt)[2] == pytest.approx(1.0)

    def test_uniform_half(self):
        gt = np.zeros((4, 4))
        gt[0] = 1
        p, r, f = f_measure(np.full((4, 4), 0.5), gt)
        assert (p, r, f) == (1.0, 0.0, 0.0)

    def test_formula(self):
        assert f_beta(0.6, 0.5, 0.3) == pytest.approx(0.39 / 0.68)
        assert f_beta(0.6, 0.5, 0.3) == pytest.approx(0.5735, abs=1e-4)
        assert f_beta(0.0, 0.0) == 0.0

    def test_range_and_zero_iff(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            gt = rng.uniform(size=(8, 8)) < 0.3
            gt[0, 0] = True
            p, r, f = f_measure(rng.uniform(size=(8, 8)) ** 3, gt)
            assert 0 <= f <= 1
            assert (f == 0) == (p * r == 0)


class TestMae:
    def test_identity_and_inverse(self):
        gt = np.array([[0, 1], [1, 0]], dtype=float)
        assert mae(gt, gt) == 0.0
        assert mae(1 - gt, gt) == 1.0

    def test_uniform_quarter(self):
        gt = np.zeros((4, 4))
        gt[:2] = 1
        assert mae(np.full((4, 4), 0.25), gt) == pytest.approx(0.5)

    def test_metric_properties(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b, c = (rng.uniform(size=(5, 5)) for _ in range(3))
            assert mae(a, b) == pytest.approx(mae(b, a))
            assert mae(a, c) <= mae(a, b) + mae(b, c) + 1e-12

    def test_mismatch(self):
        with pytest.raises(EvaluationError):
            mae(np.zeros((2, 2)), np.zeros((2, 3)))


class TestAggregate:
    def _row(self, sid, err):
        gt = np.zeros((10, 10))
        gt[:5] = 1
        pred = np.clip(gt + err, 0, 1)
        return score_image(pred, gt, sid)

    def test_singleton(self):
        row = self._row("a", 0.1)
        rep = aggregate([row])
        assert rep.mae == row.mae and rep.f_measure == row.f_measure
        assert rep.pr_curve.shape == (256, 3)

    def test_mean_mae(self):
        gt = np.zeros((2, 5))
        gt[0] = 1
        r1 = score_image(np.abs(gt - 0.2), gt, "a")
        r2 = score_image(np.abs(gt - 0.4), gt, "b")
        assert r1.mae == pytest.approx(0.2) and r2.mae == pytest.approx(0.4)
        assert aggregate([r1, r2]).mae == pytest.approx(0.3)

    def test_exclusion(self):
        gt = np.zeros((4, 4))
        gt[0] = 1
        pairs = [("a", gt, gt), ("b", gt * 0.5, gt), ("empty", gt, np.zeros((4, 4)))]
        rep = evaluate(pairs)
        assert [r.id for r in rep.rows] == ["a", "b"]
        assert rep.excluded == ["empty"]

    def test_no_rows(self):
        with pytest.raises(EvaluationError):
            aggregate([])

    def test_csv(self, tmp_path):
        rep = aggregate([self._row("a", 0.1), self._row("b", 0.3)])
        pr_path = rep.write_csv(tmp_path / "report.csv")
        rows = list(csv.reader(open(tmp_path / "report.csv")))
        assert rows[0] == ["id", "precision", "recall", "f_measure", "mae"]
        assert [r[0] for r in rows[1:]] == ["a", "b", "__mean__"]
        pr = list(csv.reader(open(pr_path)))
        assert len(pr) == 257
