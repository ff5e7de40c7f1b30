"""Generated RGB-D scenes with a known salient object.

Used by the tests and demos; nothing here is needed to run the detector.
"""

from __future__ import annotations

import numpy as np

from .dataset import RgbdSample


def _object_mask(h, w, cx, cy, rx, ry, shape):
    ys, xs = np.indices((h, w))
    if shape == "box":
        return (np.abs(xs - cx) <= rx) & (np.abs(ys - cy) <= ry)
    return ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0


def textured_background(h, w, rng) -> np.ndarray:
    """Smoothly varying multi-hue background with stripe texture and noise."""
    ys, xs = np.indices((h, w)).astype(np.float64)
    base = np.empty((h, w, 3))
    phase = rng.uniform(0, 2 * np.pi, size=3)
    for c in range(3):
        base[..., c] = 0.45 + 0.2 * np.sin(xs / w * 2 * np.pi + phase[c]) * np.cos(ys / h * np.pi + phase[c])
    # fine texture so LBP statistics are non-trivial
    stripes = 0.06 * np.sin((xs + ys) * rng.uniform(0.6, 1.2))
    base += stripes[..., None]
    base += rng.normal(0, 0.03, size=base.shape)
    return base


def make_scene(seed: int = 0, width: int = 320, height: int = 240, shape: str = "ellipse",
               jitter: bool = True, distractor: bool = False,
               background_depth: tuple[float, float] = (0.05, 0.3)) -> RgbdSample:
    """A near, high-contrast object near the image center on a far textured ground.

    Depth uses the 1.0 = near convention: the background recedes linearly from
    ``background_depth[1]`` at the bottom edge to ``background_depth[0]`` at
    the top, the object sits at about 0.9. A bright background (high mean
    depth) yields a low confidence score even though the depth ordering is
    still right.
    With ``distractor`` a compact far patch of a second saturated color is
    painted beside the object; it is not part of the ground truth.
    """
    rng = np.random.default_rng(seed)
    h, w = height, width
    cx, cy = w / 2.0, h / 2.0
    rx, ry = 0.17 * w, 0.2 * h
    if jitter:
        cx += rng.uniform(-0.06, 0.06) * w
        cy += rng.uniform(-0.06, 0.06) * h
        rx *= rng.uniform(0.85, 1.15)
        ry *= rng.uniform(0.85, 1.15)
    mask = _object_mask(h, w, cx, cy, rx, ry, shape)

    rgb = textured_background(h, w, rng)
    hue = rng.integers(3)
    color = np.full(3, 0.12)
    color[hue] = 0.92
    obj = color[None, None, :] + rng.normal(0, 0.02, size=(h, w, 3))
    rgb[mask] = obj[mask]
    decoy = np.zeros_like(mask)
    if distractor:
        side = rng.choice([-1, 1])
        dx = cx + side * (rx + 0.04 * w)
        decoy = _object_mask(h, w, dx, cy, 0.06 * w, 0.1 * h, "box") & ~mask
        other = np.full(3, 0.12)
        other[(hue + 1) % 3] = 0.92
        rgb[decoy] = other + rng.normal(0, 0.02, size=(int(decoy.sum()), 3))
    rgb = (np.clip(rgb, 0, 1) * 255).round().astype(np.uint8)

    ys = np.indices((h, w))[0].astype(np.float64)
    far, near = background_depth
    depth = far + (near - far) * ys / (h - 1) + rng.normal(0, 0.01, size=(h, w))
    depth[mask] = 0.9 + rng.normal(0, 0.01, size=int(mask.sum()))
    depth[decoy] = far + rng.normal(0, 0.01, size=int(decoy.sum()))
    depth = np.clip(depth, 0, 1)
    return RgbdSample(rgb=rgb, depth=depth, gt=mask.astype(np.uint8), id=f"scene{seed:03d}")


def corrupt_depth(sample: RgbdSample, seed: int = 0, block: int = 24) -> RgbdSample:
    """Replace the depth with a poor map: bright, concentrated, and unrelated to the scene.

    Piecewise-constant blocks of random near depths in [0.62, 0.98] plus mild
    pixel noise. This mimics failed stereo estimates, which pile up at large
    values and carry structure that has nothing to do with the object.
    """
    rng = np.random.default_rng(10_000 + seed)
    h, w = sample.shape
    gh, gw = -(-h // block), -(-w // block)
    blocks = rng.uniform(0.62, 0.98, size=(gh, gw))
    depth = np.kron(blocks, np.ones((block, block)))[:h, :w]
    depth = depth + rng.normal(0, 0.005, size=(h, w))
    depth = np.clip(depth, 0.61, 1.0)
    return RgbdSample(rgb=sample.rgb, depth=depth, gt=sample.gt, id=sample.id + "_poor")


def uniform_noise_depth(sample: RgbdSample, seed: int = 0) -> RgbdSample:
    rng = np.random.default_rng(20_000 + seed)
    depth = rng.uniform(0.0, 1.0, size=sample.shape)
    return RgbdSample(rgb=sample.rgb, depth=depth, gt=sample.gt, id=sample.id + "_noise")


def make_twin_scene(seed: int = 0, width: int = 320, height: int = 240) -> RgbdSample:
    """Two equally compact objects mirrored about the center, only one of them near.

    Every depth value falls into the top level, so the confidence score is
    zero and the compactness stage cannot tell the objects apart; only the
    depth ordering (near object 0.95, twin 0.68, ground 0.65 to 0.75) can.
    """
    rng = np.random.default_rng(seed)
    h, w = height, width
    side = rng.choice([-1, 1])
    rx, ry = 0.1 * w, 0.16 * h
    near = _object_mask(h, w, w / 2 + side * 0.2 * w, h / 2, rx, ry, "ellipse")
    far = _object_mask(h, w, w / 2 - side * 0.2 * w, h / 2, rx, ry, "ellipse")

    rgb = textured_background(h, w, rng)
    hue = rng.integers(3)
    c_near = np.full(3, 0.12)
    c_near[hue] = 0.92
    c_far = np.full(3, 0.12)
    c_far[(hue + 1) % 3] = 0.92
    rgb[near] = c_near
    rgb[far] = c_far
    rgb = (np.clip(rgb + rng.normal(0, 0.02, rgb.shape), 0, 1) * 255).round().astype(np.uint8)

    ys = np.indices((h, w))[0]
    depth = 0.65 + 0.1 * ys / (h - 1) + rng.normal(0, 0.01, (h, w))
    depth[near] = 0.95
    depth[far] = 0.68
    depth = np.clip(depth, 0.61, 1.0)
    return RgbdSample(rgb=rgb, depth=depth, gt=near.astype(np.uint8), id=f"twin{seed:03d}")
