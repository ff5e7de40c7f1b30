import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from helpers import save_gray
from stereosal.dataset import (
    DatasetError, RgbdSample, SaliencyMap, ShapeMismatchError, load_rgbd_pair, minmax,
    read_saliency_map, scan_dataset, write_saliency_map,
)


def _pair(tmp_path, depth, rgb_shape=None):
    depth = np.asarray(depth)
    h, w = rgb_shape or depth.shape
    rgb = np.full((h, w, 3), 90, dtype=np.uint8)
    Image.fromarray(rgb).save(tmp_path / "x.png")
    mode_arr = depth.astype(np.uint16 if depth.max() > 255 else np.uint8)
    Image.fromarray(mode_arr).save(tmp_path / "x_depth.png")
    return tmp_path / "x.png", tmp_path / "x_depth.png"


class TestLoadPair:
    def test_constant_depth_normalizes_to_zero(self, tmp_path):
        s = load_rgbd_pair(*_pair(tmp_path, np.full((4, 5), 128)))
        assert np.all(s.depth == 0.0)

    def test_endpoints(self, tmp_path):
        s = load_rgbd_pair(*_pair(tmp_path, [[0, 255], [255, 0]]))
        assert set(np.unique(s.depth)) == {0.0, 1.0}

    def test_invert(self, tmp_path):
        s = load_rgbd_pair(*_pair(tmp_path, [[50, 100, 150]]), invert_depth=True)
        np.testing.assert_allclose(s.depth[0], [1.0, 0.5, 0.0])

    def test_rgb_untouched(self, tmp_path):
        s = load_rgbd_pair(*_pair(tmp_path, [[0, 10], [20, 30]]))
        assert s.rgb.dtype == np.uint8 and np.all(s.rgb == 90)

    def test_sixteen_bit_depth(self, tmp_path):
        s = load_rgbd_pair(*_pair(tmp_path, [[1000, 3000], [5000, 65535]]))
        assert s.depth.min() == 0.0 and s.depth.max() == 1.0
        assert s.depth[0, 1] == pytest.approx(2000 / 64535)

    def test_dimension_mismatch_names_both(self, tmp_path):
        rgb_p, depth_p = _pair(tmp_path, np.zeros((4, 5)), rgb_shape=(6, 7))
        with pytest.raises(ShapeMismatchError) as exc:
            load_rgbd_pair(rgb_p, depth_p)
        assert "(6, 7)" in str(exc.value) and "(4, 5)" in str(exc.value)

    def test_undecodable(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"not an image")
        good, _ = _pair(tmp_path, np.zeros((3, 3)))
        with pytest.raises(OSError, match="bad.png"):
            load_rgbd_pair(good, bad)

    def test_gt_binarized(self, tmp_path):
        rgb_p, depth_p = _pair(tmp_path, np.zeros((2, 2)))
        save_gray(tmp_path / "gt.png", [[0, 127], [128, 255]])
        s = load_rgbd_pair(rgb_p, depth_p, gt_path=tmp_path / "gt.png")
        np.testing.assert_array_equal(s.gt, [[0, 0], [1, 1]])


def test_sample_invariants():
    rgb = np.zeros((3, 3, 3), np.uint8)
    with pytest.raises(ShapeMismatchError):
        RgbdSample(rgb, np.zeros((3, 4)))
    with pytest.raises(DatasetError):
        RgbdSample(rgb, np.full((3, 3), 1.5))
    with pytest.raises(DatasetError):
        RgbdSample(rgb, np.zeros((3, 3)), gt=np.full((3, 3), 2))


class TestScan:
    def _touch(self, root, rel):
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        save_gray(p, np.zeros((2, 2)))

    def test_matching(self, tmp_path):
        for rel in ["rgb/a.png", "rgb/b.png", "depth/a.png", "depth/b.png", "gt/a.png"]:
            self._touch(tmp_path, rel)
        res = scan_dataset(tmp_path)
        assert [s.id for s in res] == ["a", "b"]
        assert res[0].gt is not None and res[1].gt is None

    def test_empty_warns(self, tmp_path, caplog):
        (tmp_path / "rgb").mkdir()
        (tmp_path / "depth").mkdir()
        with caplog.at_level(logging.WARNING):
            res = scan_dataset(tmp_path)
        assert len(res) == 0
        assert "no samples" in caplog.text

    def test_unmatched_skipped(self, tmp_path):
        for rel in ["rgb/a.png", "rgb/c.jpg", "depth/a.bmp"]:
            p = tmp_path / rel
            p.parent.mkdir(parents=True, exist_ok=True)
            Image.fromarray(np.zeros((2, 2, 3), np.uint8)).save(p)
        res = scan_dataset(tmp_path)
        assert [s.id for s in res] == ["a"]
        assert res.skipped == ["c"]

    def test_missing_depth_dir(self, tmp_path):
        (tmp_path / "rgb").mkdir()
        with pytest.raises(DatasetError, match="depth"):
            scan_dataset(tmp_path)


class TestWrite:
    @pytest.mark.parametrize("value,pixel", [(1.0, 255), (0.0, 0), (0.5, 128)])
    def test_quantization(self, tmp_path, value, pixel):
        p = tmp_path / "m.png"
        write_saliency_map(SaliencyMap(np.full((2, 3), value)), p)
        stored = np.array(Image.open(p))
        assert stored.dtype == np.uint8 and stored.ndim == 2
        assert np.all(stored == pixel)

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            write_saliency_map(SaliencyMap(np.zeros((2, 2))), tmp_path / "missing" / "m.png")


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (5, 7), elements=st.floats(0, 1)))
def test_round_trip_within_one_level(tmp_path_factory, values):
    p = tmp_path_factory.mktemp("rt") / "m.png"
    write_saliency_map(SaliencyMap(values), p)
    back = read_saliency_map(p).values
    assert np.abs(back - values).max() <= 1 / 255 + 1e-12


@given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-1e3, 1e3)))
def test_minmax_idempotent(x):
    once = minmax(x)
    np.testing.assert_allclose(minmax(once), once, atol=1e-12)
    assert once.min() >= 0 and once.max() <= 1
