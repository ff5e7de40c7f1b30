"""Command line: ``stereosal run | batch | eval``.

Every detector parameter is a flag whose default is the published setting, so
running without flags reproduces the reference configuration. Set
``STEREOSAL_LOG`` (DEBUG, INFO, WARNING, ...) to change verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .dataset import (
    SaliencyMap, ScanResult, load_gt, read_image, read_saliency_map, scan_dataset,
    load_rgbd_pair, write_saliency_map, index_images,
)
from .evaluation import EvaluationError, evaluate
from .pipeline import PipelineConfig, run_pipeline

log = logging.getLogger("stereosal")

MANIFEST_NAME = "manifest.json"


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    # None means "not given": the value then comes from --config-from or the defaults
    g = p.add_argument_group("detector parameters")
    g.add_argument("--superpixels", dest="n_superpixels", type=int, default=None, help="SLIC regions (200)")
    g.add_argument("--sigma2", type=float, default=None, help="affinity bandwidth (0.1)")
    g.add_argument("--levels", type=_float_list, default=None, help="depth level thresholds (0.4,0.6)")
    g.add_argument("--tau", type=float, default=None, help="seed threshold (0.5)")
    g.add_argument("--gamma", type=float, default=None, help="fusion weight of the compactness map (0.8)")
    g.add_argument("--alpha", type=float, default=None, help="manifold ranking alpha (0.99)")
    g.add_argument("--slic-compactness", dest="slic_compactness", type=float, default=None, help="(10)")
    g.add_argument("--ring", type=int, default=None, help="adjacency ring size (1)")
    g.add_argument("--invert-depth", dest="invert_depth", action="store_const", const=True, default=None,
                   help="input depth is bright = far")
    g.add_argument("--no-diffusion", dest="diffusion", action="store_const", const=False, default=None,
                   help="use the raw affinity in the compactness stage")
    g.add_argument("--objectness-map", dest="objectness", default=None,
                   help="objectness image (run) or directory of <id> images (batch)")
    g.add_argument("--config-from", dest="config_from", default=None,
                   help="take the configuration snapshot from an earlier manifest")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--emit-intermediate", action="store_true",
                   help="also write compactness, foreground and seed maps")


def build_config(args) -> PipelineConfig:
    base = {}
    if args.config_from:
        with open(args.config_from) as fh:
            base = json.load(fh)["config"]
    cfg = PipelineConfig.from_dict(base).to_dict()
    for name in PipelineConfig.__dataclass_fields__:
        val = getattr(args, name, None)
        if val is not None:
            cfg[name] = val
    return PipelineConfig.from_dict(cfg)


def _load_objectness(path, shape) -> np.ndarray:
    arr = read_image(path).astype(np.float64)
    if arr.ndim == 3:
        arr = arr[..., :3].mean(axis=2)
    arr /= 65535.0 if arr.max() > 255 else 255.0
    if arr.shape != tuple(shape):
        raise ValueError(f"objectness map {path} is {arr.shape}, image is {tuple(shape)}")
    return arr


def _seed_image(out) -> np.ndarray:
    labels = out.segmentation.labels
    region = np.zeros(out.segmentation.n_actual)
    region[out.seeds.preliminary] = 0.5
    region[out.seeds.refined] = 1.0
    return region[labels]


def process_sample(sample_id: str, rgb_path, depth_path, out_dir, cfg: PipelineConfig,
                   objectness_path=None, emit_intermediate: bool = False) -> dict:
    """Run one sample end to end and write its maps; returns the manifest entry."""
    out_dir = Path(out_dir)
    t0 = time.perf_counter()
    sample = load_rgbd_pair(rgb_path, depth_path, cfg.invert_depth, sample_id=sample_id)
    obj = _load_objectness(objectness_path, sample.shape) if objectness_path else None
    out = run_pipeline(sample, cfg, obj)

    paths = {"final": out_dir / f"{sample_id}.png"}
    write_saliency_map(out.s_final, paths["final"])
    if emit_intermediate:
        paths["cs"] = out_dir / f"{sample_id}_cs.png"
        paths["fs"] = out_dir / f"{sample_id}_fs.png"
        paths["seeds"] = out_dir / f"{sample_id}_seeds.png"
        write_saliency_map(out.s_cs, paths["cs"])
        write_saliency_map(out.s_fs, paths["fs"])
        write_saliency_map(SaliencyMap(_seed_image(out), sample_id), paths["seeds"])

    c = out.confidence
    return {
        "id": sample_id,
        "rgb": str(rgb_path),
        "depth": str(depth_path),
        "outputs": {k: str(v) for k, v in paths.items()},
        "lambda_d": c.lambda_d,
        "depth_stats": {"m_d": c.m_d, "sigma_d": c.sigma_d, "cv": c.cv, "entropy": c.entropy,
                        "level_probs": list(c.level_probs)},
        "n_superpixels": out.segmentation.n_actual,
        "n_seeds": len(out.seeds.refined),
        "timings_ms": {k: round(v, 3) for k, v in out.timings.items()},
        "total_ms": round((time.perf_counter() - t0) * 1000.0, 3),
    }


def write_manifest(out_dir, cfg: PipelineConfig, entries: list[dict], failures: Optional[list] = None) -> Path:
    """Merge ``entries`` into ``<out_dir>/manifest.json`` keyed by sample id."""
    path = Path(out_dir) / MANIFEST_NAME
    samples = {}
    if path.exists():
        try:
            old = json.loads(path.read_text())
            if old.get("config") == cfg.to_dict():
                samples = {e["id"]: e for e in old.get("samples", [])}
        except (json.JSONDecodeError, KeyError):
            log.warning("ignoring unreadable manifest %s", path)
    for e in entries:
        samples[e["id"]] = e
    doc = {
        "tool": "stereosal",
        "version": __version__,
        "config": cfg.to_dict(),
        "samples": [samples[k] for k in sorted(samples)],
        "failures": failures or [],
    }
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(doc, indent=2))
    tmp.replace(path)
    return path


def cmd_run(args) -> int:
    cfg = build_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sample_id = args.id or Path(args.rgb).stem
    entry = process_sample(sample_id, args.rgb, args.depth, out_dir, cfg, cfg.objectness,
                           args.emit_intermediate)
    write_manifest(out_dir, cfg, [entry])
    log.info("%s: lambda_d=%.4f -> %s", sample_id, entry["lambda_d"], entry["outputs"]["final"])
    return 0


def _batch_job(job):
    sid, rgb, depth, out_dir, cfg_dict, obj, emit = job
    cfg = PipelineConfig.from_dict(cfg_dict)
    try:
        return sid, process_sample(sid, rgb, depth, out_dir, cfg, obj, emit), None
    except Exception as exc:
        return sid, None, f"{type(exc).__name__}: {exc}"


def cmd_batch(args) -> int:
    cfg = build_config(args)
    scan: ScanResult = scan_dataset(args.dataset)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    obj_index = {}
    if cfg.objectness:
        if not Path(cfg.objectness).is_dir():
            raise ValueError("--objectness-map must be a directory in batch mode")
        obj_index = index_images(Path(cfg.objectness))

    jobs = [(s.id, str(s.rgb), str(s.depth), str(out_dir), cfg.to_dict(), obj_index.get(s.id),
             args.emit_intermediate) for s in scan]
    n_workers = max(1, int(args.jobs))
    if n_workers == 1 or len(jobs) <= 1:
        results = [_batch_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_batch_job, jobs))

    entries, failures = [], []
    for sid, entry, err in results:
        if err is None:
            entries.append(entry)
        else:
            log.error("sample %s failed: %s", sid, err)
            failures.append({"id": sid, "error": err})
    failures += [{"id": sid, "error": "no depth map"} for sid in scan.skipped]
    write_manifest(out_dir, cfg, entries, failures)
    log.info("batch: %d written, %d failed", len(entries), len(failures))
    return 1 if any(f["error"] != "no depth map" for f in failures) else 0


def cmd_eval(args) -> int:
    preds = index_images(Path(args.pred_dir))
    gts = index_images(Path(args.gt_dir))
    ids = sorted(set(preds) & set(gts))
    if not ids:
        log.error("no prediction in %s matches a ground-truth basename in %s", args.pred_dir, args.gt_dir)
        return 1
    pairs = []
    for sid in ids:
        pairs.append((sid, read_saliency_map(preds[sid], sid).values, load_gt(gts[sid])))
    try:
        report = evaluate(pairs)
    except EvaluationError as exc:
        log.error("%s", exc)
        return 1
    report_path = Path(args.report)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    pr_path = report.write_csv(report_path)
    for sid in report.excluded:
        log.warning("excluded %s (empty ground truth)", sid)
    print(f"images={len(report.rows)} excluded={len(report.excluded)} "
          f"precision={report.precision:.4f} recall={report.recall:.4f} "
          f"F={report.f_measure:.4f} MAE={report.mae:.4f}")
    log.info("report %s, PR curve %s", report_path, pr_path)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stereosal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="detect saliency on one RGB-D pair")
    p.add_argument("--rgb", required=True)
    p.add_argument("--depth", required=True)
    p.add_argument("--id", default=None, help="output name (defaults to the rgb basename)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="detect saliency on every sample of a dataset directory")
    p.add_argument("--dataset", required=True, help="root with rgb/, depth/ and optional gt/")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (1); output does not depend on it")
    _add_config_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("eval", help="score saliency maps against ground truth")
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--report", required=True, help="CSV path; the PR curve goes next to it")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("STEREOSAL_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        log.error("%s", exc)
        log.debug("traceback", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
