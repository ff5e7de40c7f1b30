"""Scoring saliency maps: PR curve, adaptive F-measure and MAE.

Run:  python3 demos/03_evaluation.py
"""
import numpy as np

from stereosal import aggregate, f_measure, mae, pr_curve, run_pipeline
from stereosal.evaluation import adaptive_threshold, score_image
from stereosal.synthetic import make_scene

# The toy from the metric definitions: four pixels, two positives.
pred = np.array([1.0, 0.6, 0.4, 0.0])
gt = np.array([1, 1, 0, 0])
curve = pr_curve(pred, gt)
print("t=102 ->", curve[102], " t=128 ->", curve[128])

# A uniform map at 0.5 binarizes at min(2*0.5, 1) = 1 and selects nothing.
flat = np.full((4, 4), 0.5)
mask = np.zeros((4, 4))
mask[0] = 1
print("adaptive threshold", adaptive_threshold(flat), "->", f_measure(flat, mask))

# A small synthetic benchmark.
rows = []
for seed in range(5):
    s = make_scene(seed)
    rows.append(score_image(run_pipeline(s).s_final.values, s.gt, s.id))
report = aggregate(rows)
for r in rows:
    print(f"{r.id}: F={r.f_measure:.3f} MAE={r.mae:.4f}")
print(f"mean: P={report.precision:.3f} R={report.recall:.3f} F={report.f_measure:.3f} MAE={report.mae:.4f}")

# report.write_csv("report.csv") would also write report_pr.csv for plotting.
best = report.pr_curve[np.argmax(report.pr_curve[:, 1] + report.pr_curve[:, 2])]
print("threshold with the best P+R:", best)
print("mae of the perfect map:", mae(s.gt.astype(float), s.gt))
