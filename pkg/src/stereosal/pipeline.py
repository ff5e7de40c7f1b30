"""End-to-end RGB-D saliency: compactness stage, seed contrast stage, fusion."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .compactness import compute_compactness, objectness_prior, pixelize
from .confidence import DEFAULT_LEVELS, DepthConfidence, depth_confidence
from .dataset import RgbdSample, SaliencyMap, ShapeMismatchError, minmax
from .diffusion import DEFAULT_ALPHA, DiffusionOperator, diffuse_affinity
from .foreground import SeedSet, finalize_foreground, foreground_contrast, select_seeds_drss
from .graph import SegmentationMap, build_affinity, extract_features, slic_segment


class StageError(RuntimeError):
    def __init__(self, stage: str, exc: BaseException):
        self.stage = stage
        super().__init__(f"stage '{stage}' failed: {exc}")


@dataclass(frozen=True)
class PipelineConfig:
    """Pipeline parameters; the defaults reproduce the published setting.

    ``lambda_override``, ``drss`` and ``dc_depth_index`` exist for ablations
    and are left at their defaults in normal use.
    """

    n_superpixels: int = 200
    sigma2: float = 0.1
    levels: tuple[float, ...] = DEFAULT_LEVELS
    tau: float = 0.5
    gamma: float = 0.8
    alpha: float = DEFAULT_ALPHA
    invert_depth: bool = False
    objectness: Optional[str] = None
    diffusion: bool = True
    slic_compactness: float = 10.0
    ring: int = 1
    lambda_override: Optional[float] = None
    drss: bool = True
    dc_depth_index: str = "i"

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(t) for t in self.levels))
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError(f"levels must be ascending, got {self.levels}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.ring < 1:
            raise ValueError("ring must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["levels"] = list(self.levels)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        if "levels" in known:
            known["levels"] = tuple(known["levels"])
        return cls(**known)


@dataclass
class PipelineOutput:
    s_cs: SaliencyMap
    s_fs: SaliencyMap
    s_final: SaliencyMap
    confidence: DepthConfidence
    seeds: SeedSet
    segmentation: SegmentationMap
    lambda_used: float
    timings: dict = field(default_factory=dict)


def fuse(s_cs: SaliencyMap, s_fs: SaliencyMap, gamma: float = 0.8) -> SaliencyMap:
    """Convex combination ``gamma * s_cs + (1 - gamma) * s_fs``, no renormalization."""
    if s_cs.shape != s_fs.shape:
        raise ShapeMismatchError("s_cs", s_cs.shape, "s_fs", s_fs.shape)
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    if gamma == 1.0:
        values = s_cs.values.copy()
    elif gamma == 0.0:
        values = s_fs.values.copy()
    else:
        values = gamma * s_cs.values + (1.0 - gamma) * s_fs.values
    return SaliencyMap(np.clip(values, 0.0, 1.0), s_cs.id)


class _Stages:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        self.timings[name] = (time.perf_counter() - t0) * 1000.0
        return out


def run_pipeline(sample: RgbdSample, cfg: PipelineConfig = PipelineConfig(),
                 objectness_map: Optional[np.ndarray] = None) -> PipelineOutput:
    """Compute the compactness, foreground and fused saliency maps of one sample.

    ``objectness_map`` (H x W in [0, 1]) replaces the center prior when given.
    """
    st = _Stages()
    conf = st.run("depth_confidence", depth_confidence, sample.depth, cfg.levels)
    lam = conf.lambda_d if cfg.lambda_override is None else float(cfg.lambda_override)

    seg = st.run("slic_segment", slic_segment, sample.rgb, cfg.n_superpixels, cfg.slic_compactness)
    feats = st.run("extract_features", extract_features, sample, seg)
    graph = st.run("build_affinity", build_affinity, feats, seg, lam, cfg.sigma2, cfg.ring)

    op = st.run("diffusion_operator", DiffusionOperator, graph.W, cfg.alpha)
    if cfg.diffusion:
        A_hat = st.run("diffuse_affinity", diffuse_affinity, op, graph.A)
    else:
        A_hat = graph.A

    obj = st.run("objectness", objectness_prior, feats, seg, objectness_map)
    comp = st.run("compactness", compute_compactness, A_hat, feats, lam, cfg.sigma2, obj,
                  cfg.dc_depth_index)

    seeds = st.run("seeds", select_seeds_drss, minmax(comp.s_cs), feats.mean_depth, cfg.tau, cfg.drss)
    s_fg = st.run("foreground_contrast", foreground_contrast, graph.A, feats, seeds, cfg.sigma2)
    fs_regions = st.run("foreground_propagation", finalize_foreground, s_fg, op)

    s_cs = pixelize(comp.s_cs, seg, sample.id)
    s_fs = pixelize(fs_regions, seg, sample.id)
    s_final = st.run("fuse", fuse, s_cs, s_fs, cfg.gamma)
    return PipelineOutput(s_cs, s_fs, s_final, conf, seeds, seg, lam, st.timings)
