"""Loading, validation and persistence of RGB-D samples and saliency maps."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

log = logging.getLogger(__name__)

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")


class DatasetError(Exception):
    """Bad dataset layout or an unusable sample."""


class ShapeMismatchError(DatasetError, ValueError):
    def __init__(self, what_a: str, shape_a, what_b: str, shape_b):
        self.shapes = (tuple(shape_a), tuple(shape_b))
        super().__init__(
            f"dimension mismatch: {what_a} is {tuple(shape_a)[:2]}, "
            f"{what_b} is {tuple(shape_b)[:2]}"
        )


def minmax(x: np.ndarray) -> np.ndarray:
    """Min-max normalize to [0, 1]; a constant array maps to all zeros."""
    x = np.asarray(x, dtype=np.float64)
    lo = x.min()
    hi = x.max()
    if hi - lo <= 0:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


@dataclass(frozen=True)
class RgbdSample:
    """One aligned RGB / depth / ground-truth triple.

    ``depth`` is float64 in [0, 1] with 1.0 meaning nearest to the camera.
    ``gt`` is a {0, 1} uint8 mask or None.
    """

    rgb: np.ndarray
    depth: np.ndarray
    gt: Optional[np.ndarray] = None
    id: str = ""

    def __post_init__(self):
        if self.rgb.ndim != 3 or self.rgb.shape[2] != 3:
            raise DatasetError(f"rgb must be H x W x 3, got {self.rgb.shape}")
        if self.depth.shape != self.rgb.shape[:2]:
            raise ShapeMismatchError("rgb", self.rgb.shape, "depth", self.depth.shape)
        if self.depth.size and (self.depth.min() < 0 or self.depth.max() > 1):
            raise DatasetError("depth values must lie in [0, 1]")
        if self.gt is not None:
            if self.gt.shape != self.rgb.shape[:2]:
                raise ShapeMismatchError("rgb", self.rgb.shape, "gt", self.gt.shape)
            if not np.isin(self.gt, (0, 1)).all():
                raise DatasetError("gt must be a binary {0, 1} mask")

    @property
    def shape(self) -> tuple[int, int]:
        return self.depth.shape


@dataclass(frozen=True)
class SaliencyMap:
    values: np.ndarray
    id: str = ""

    def __post_init__(self):
        v = self.values
        if v.ndim != 2:
            raise ValueError(f"saliency map must be 2-D, got shape {v.shape}")
        if v.size and (np.nanmin(v) < 0 or np.nanmax(v) > 1):
            raise ValueError("saliency values must lie in [0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def read_image(path, mode: Optional[str] = None) -> np.ndarray:
    """Decode an image file into a numpy array.

    Args:
        path: Image file.
        mode: Optional PIL mode to convert to ("RGB", "L"). ``None`` keeps the
            native mode, which preserves 16-bit depth planes.

    Raises:
        OSError: if the file is missing or cannot be decoded. The message names
            the path.
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            if mode is not None:
                img = img.convert(mode)
            arr = np.array(img)
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError) as exc:
        raise OSError(f"cannot decode image {path}: {exc}") from exc
    return arr


def _as_gray(arr: np.ndarray) -> np.ndarray:
    if arr.ndim == 3:
        # depth stored as RGB(A) copies of one plane
        arr = arr[..., :3].astype(np.float64).mean(axis=2)
    return arr.astype(np.float64)


def normalize_depth(depth: np.ndarray, invert: bool = False) -> np.ndarray:
    d = minmax(_as_gray(depth))
    if invert:
        d = 1.0 - d
    return d


def load_gt(path) -> np.ndarray:
    """Read a mask and binarize it (pixel > 127 -> 1)."""
    g = _as_gray(read_image(path))
    if g.max() > 255:
        g = g / 257.0
    return (g > 127).astype(np.uint8)


def load_rgbd_pair(rgb_path, depth_path, invert_depth: bool = False,
                   gt_path=None, sample_id: Optional[str] = None) -> RgbdSample:
    """Load an RGB image and its depth map as a validated sample.

    Depth is min-max normalized to [0, 1] (constant planes become all zeros),
    then flipped when ``invert_depth`` is set so that 1.0 is nearest.
    """
    rgb = read_image(rgb_path, "RGB")
    raw_depth = read_image(depth_path)
    if raw_depth.shape[:2] != rgb.shape[:2]:
        raise ShapeMismatchError(
            f"rgb {rgb_path}", rgb.shape, f"depth {depth_path}", raw_depth.shape
        )
    depth = normalize_depth(raw_depth, invert_depth)
    gt = None
    if gt_path is not None:
        gt = load_gt(gt_path)
        if gt.shape != rgb.shape[:2]:
            raise ShapeMismatchError(f"rgb {rgb_path}", rgb.shape, f"gt {gt_path}", gt.shape)
    if sample_id is None:
        sample_id = Path(rgb_path).stem
    return RgbdSample(rgb=rgb, depth=depth, gt=gt, id=sample_id)


class SampleEntry(NamedTuple):
    id: str
    rgb: Path
    depth: Path
    gt: Optional[Path]


@dataclass
class ScanResult:
    samples: list[SampleEntry] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.samples)

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, i):
        return self.samples[i]


def index_images(folder: Path) -> dict[str, Path]:
    out: dict[str, Path] = {}
    if not folder.is_dir():
        return out
    for p in sorted(folder.iterdir()):
        if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS:
            if p.stem in out:
                log.warning("duplicate basename %s in %s, keeping %s", p.stem, folder, out[p.stem].name)
                continue
            out[p.stem] = p
    return out


def scan_dataset(root) -> ScanResult:
    """Enumerate ``root/rgb``, ``root/depth`` and optional ``root/gt``.

    Samples are matched by basename and sorted by id. RGB files without a
    depth partner are left out and listed in ``ScanResult.skipped``.
    """
    root = Path(root)
    rgb_dir, depth_dir, gt_dir = root / "rgb", root / "depth", root / "gt"
    for d in (rgb_dir, depth_dir):
        if not d.is_dir():
            raise DatasetError(f"dataset root {root} has no {d.name}/ directory")
    rgbs = index_images(rgb_dir)
    depths = index_images(depth_dir)
    gts = index_images(gt_dir)

    result = ScanResult()
    for sid in sorted(rgbs):
        if sid not in depths:
            result.skipped.append(sid)
            continue
        result.samples.append(SampleEntry(sid, rgbs[sid], depths[sid], gts.get(sid)))
    if result.skipped:
        log.warning("skipped %d sample(s) without depth: %s", len(result.skipped),
                    ", ".join(result.skipped))
    if not result.samples:
        log.warning("no samples found under %s", root)
    return result


def to_uint8(values: np.ndarray) -> np.ndarray:
    # round half up, not numpy round-half-to-even
    return np.floor(np.clip(values, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def write_saliency_map(smap: SaliencyMap, path) -> None:
    """Write ``smap`` as an 8-bit grayscale image, pixel = round(value * 255)."""
    path = Path(path)
    try:
        Image.fromarray(to_uint8(smap.values)).save(path)
    except (OSError, ValueError) as exc:
        raise OSError(f"cannot write saliency map to {path}: {exc}") from exc


def read_saliency_map(path, sample_id: Optional[str] = None) -> SaliencyMap:
    arr = _as_gray(read_image(path))
    scale = 65535.0 if arr.max() > 255 else 255.0
    return SaliencyMap(arr / scale, sample_id if sample_id is not None else Path(path).stem)
