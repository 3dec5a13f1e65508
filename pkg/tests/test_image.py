import math

import numpy as np
import pytest

from svdsep import image, linalg
from svdsep.errors import (
    ConfigError,
    InsufficientRankError,
    InvalidInputError,
    OrderError,
    RangeError,
    ShapeError,
)
from svdsep.image import GrayImage, WindowConfig


def random_window(rng, side=5):
    return rng.uniform(size=(side, side))


class TestGrayImage:
    def test_range_enforced(self):
        with pytest.raises(InvalidInputError):
            GrayImage(np.full((3, 3), 1.5))

    def test_too_small_rejected(self):
        with pytest.raises(ShapeError):
            GrayImage(np.zeros((1, 5)))

    def test_uint8_round_trip(self):
        arr = np.arange(256, dtype=np.uint8).reshape(16, 16)
        img = GrayImage.from_uint8(arr)
        assert img.pixels.min() >= 0.0 and img.pixels.max() <= 1.0
        assert np.array_equal(img.to_uint8(), arr)


class TestInformationDensity:
    def test_identity(self):
        assert image.information_density(np.eye(2), 1, 2) == pytest.approx(math.sqrt(2.0))

    def test_single_value_range(self):
        assert image.information_density(np.diag([3.0, 1.0]), 1, 1) == pytest.approx(3.0)

    def test_matches_eigenvalue_oracle(self):
        # independent route: eigenvalues of D^T D, not the svd path
        rng = np.random.default_rng(0)
        for _ in range(10):
            d = random_window(rng)
            lam = np.sort(np.linalg.eigvalsh(d.T @ d))[::-1]
            for hi in range(1, 6):
                expected = math.sqrt(float(np.sum(lam[:hi])))
                assert image.information_density(d, 1, hi) == pytest.approx(expected, rel=1e-9)

    def test_monotone_in_upper_index(self):
        rng = np.random.default_rng(1)
        d = random_window(rng)
        values = [image.information_density(d, 1, hi) for hi in range(1, 6)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_default_range_is_full_rank(self):
        rng = np.random.default_rng(2)
        d = random_window(rng)
        full = image.information_density(d)
        assert full == pytest.approx(math.sqrt(float(np.sum(d * d))), rel=1e-9)

    def test_bad_range_rejected(self):
        with pytest.raises(RangeError):
            image.information_density(np.eye(2), 2, 1)
        with pytest.raises(RangeError):
            image.information_density(np.eye(2), 1, 5)
        with pytest.raises(RangeError):
            image.information_density(np.diag([3.0, 0.0]), 1, 2)  # rank 1

    def test_scales_linearly(self):
        rng = np.random.default_rng(3)
        d = random_window(rng)
        base = image.information_density(d)
        for c in (0.1, 2.0, 10.0):
            assert image.information_density(c * d) == pytest.approx(c * base, rel=1e-9)


class TestSingularSmoothness:
    def test_diag_two_one(self):
        assert image.singular_smoothness(np.diag([2.0, 1.0]), 1) == pytest.approx(math.sqrt(3.0))

    def test_scale_invariant(self):
        rng = np.random.default_rng(4)
        d = random_window(rng)
        base = image.singular_smoothness(d, 1)
        assert image.singular_smoothness(7.0 * d, 1) == pytest.approx(base, rel=1e-12)

    def test_constant_window_capped_by_guard(self):
        d = np.full((5, 5), 0.37)  # rank 1, sigma_2 = 0
        guard = 1e-6
        got = image.singular_smoothness(d, 1, epsilon_guard=guard)
        assert got == pytest.approx(1.0 / guard, rel=1e-9)

    def test_zero_window(self):
        assert image.singular_smoothness(np.zeros((4, 4)), 1) == 0.0

    def test_higher_order_accumulates(self):
        d = np.diag([3.0, 2.0, 1.0])
        expected = math.sqrt((9.0 - 4.0) / 4.0 + (4.0 - 1.0) / 1.0)
        assert image.singular_smoothness(d, 2) == pytest.approx(expected, rel=1e-12)

    def test_order_exceeding_window_rejected(self):
        with pytest.raises(OrderError):
            image.singular_smoothness(np.eye(3), 3)

    def test_bad_guard_rejected(self):
        with pytest.raises(InvalidInputError):
            image.singular_smoothness(np.eye(3), 1, epsilon_guard=0.0)


class TestSelectOrder:
    def test_first_qualifying_gap(self):
        spec = linalg.svd(np.diag([5.0, 1.0, 0.99, 0.5]), rank_tolerance=1e-12)
        assert image.select_order(spec, 0.05) == 2

    def test_huge_delta_gives_order_one(self):
        spec = linalg.svd(np.diag([5.0, 1.0, 0.5]), rank_tolerance=1e-12)
        assert image.select_order(spec, 10.0) == 1

    def test_fallback_full_order(self):
        spec = linalg.svd(np.diag([5.0, 3.0, 1.0]), rank_tolerance=1e-12)
        assert image.select_order(spec, 0.0) == 2  # r - 1

    def test_rank_one_rejected(self):
        with pytest.raises(InsufficientRankError):
            image.select_order(linalg.svd(np.ones((4, 4))), 0.1)

    def test_negative_delta_rejected(self):
        spec = linalg.svd(np.diag([5.0, 1.0]))
        with pytest.raises(InvalidInputError):
            image.select_order(spec, -0.1)


class TestSlidingScan:
    def test_grid_geometry(self):
        img = GrayImage(np.random.default_rng(5).uniform(size=(20, 20)))
        smap = image.sliding_scan(img, WindowConfig(window_size=5, stride=5))
        assert smap.grid.shape == (4, 4)
        assert smap.decompositions == 16

    def test_geometry_formula_sweep(self):
        rng = np.random.default_rng(6)
        img = GrayImage(rng.uniform(size=(37, 61)))
        for w in (2, 5, 8):
            for stride in (1, 2, 3, 7):
                smap = image.sliding_scan(img, WindowConfig(window_size=w, stride=stride))
                assert smap.grid_rows == (37 - w) // stride + 1
                assert smap.grid_cols == (61 - w) // stride + 1
                assert smap.decompositions == smap.grid_rows * smap.grid_cols

    def test_constant_image_uniform_map(self):
        img = GrayImage(np.full((12, 12), 0.25))
        for metric in (image.METRIC_SMOOTHNESS, image.METRIC_DENSITY):
            smap = image.sliding_scan(img, WindowConfig(window_size=4, stride=2), metric=metric)
            assert np.all(smap.grid == smap.grid[0, 0])
            assert np.all(np.isfinite(smap.grid))

    def test_window_placement(self):
        # windows must tile row-major with the top-left at (i*stride, j*stride)
        px = np.zeros((8, 8))
        px[4:8, 0:4] = np.random.default_rng(7).uniform(0.2, 1.0, size=(4, 4))
        smap = image.sliding_scan(GrayImage(px), WindowConfig(window_size=4, stride=4),
                                  metric=image.METRIC_DENSITY)
        assert smap.grid[0, 0] == 0.0
        assert smap.grid[1, 0] > 0.0
        assert smap.grid[0, 1] == 0.0

    def test_auto_order_handles_degenerate_windows(self):
        px = np.full((10, 10), 0.5)
        px[:5, :5] = np.random.default_rng(8).uniform(size=(5, 5))
        cfg = WindowConfig(window_size=5, stride=5, order="auto", delta=0.01)
        smap = image.sliding_scan(GrayImage(px), cfg)
        assert np.all(np.isfinite(smap.grid))

    def test_workers_match_serial(self):
        img = GrayImage(np.random.default_rng(9).uniform(size=(24, 24)))
        cfg = WindowConfig(window_size=5, stride=3)
        serial = image.sliding_scan(img, cfg, workers=1)
        parallel = image.sliding_scan(img, cfg, workers=4)
        assert np.array_equal(serial.grid, parallel.grid)

    def test_oversized_window_rejected(self):
        img = GrayImage(np.full((6, 6), 0.5))
        with pytest.raises(ConfigError):
            image.sliding_scan(img, WindowConfig(window_size=8))

    def test_order_vs_window_checked(self):
        img = GrayImage(np.full((6, 6), 0.5))
        with pytest.raises(OrderError):
            image.sliding_scan(img, WindowConfig(window_size=3, order=3))

    def test_unknown_metric_rejected(self):
        img = GrayImage(np.full((6, 6), 0.5))
        with pytest.raises(ConfigError):
            image.sliding_scan(img, WindowConfig(window_size=3), metric="entropy")


class TestThresholdMap:
    def _map(self):
        grid = np.array([[1.0, 2.0], [3.0, 4.0]])
        return image.SmoothnessMap(grid=grid, config=WindowConfig(window_size=2),
                                   metric=image.METRIC_SMOOTHNESS, decompositions=4)

    def test_theta_below_min_all_ones(self):
        assert np.all(image.threshold_map(self._map(), 0.5) == 1)

    def test_theta_above_max_all_zeros(self):
        assert np.all(image.threshold_map(self._map(), 4.5) == 0)

    def test_below_polarity(self):
        mask = image.threshold_map(self._map(), 2.0, polarity="below")
        assert np.array_equal(mask, [[1, 1], [0, 0]])

    def test_boundary_inclusive(self):
        mask = image.threshold_map(self._map(), 2.0, polarity="above")
        assert np.array_equal(mask, [[0, 1], [1, 1]])

    def test_bad_polarity(self):
        with pytest.raises(ConfigError):
            image.threshold_map(self._map(), 1.0, polarity="sideways")

    def test_two_region_separation(self):
        rng = np.random.default_rng(10)
        px = np.empty((20, 40))
        px[:, :20] = 0.5 + 1e-3 * (rng.uniform(size=(20, 20)) - 0.5)  # flat half
        px[:, 20:] = rng.uniform(size=(20, 20))                        # noise half
        smap = image.sliding_scan(GrayImage(px), WindowConfig(window_size=5, stride=5))
        flat_mean = smap.grid[:, :4].mean()
        noise_mean = smap.grid[:, 4:].mean()
        theta = 0.5 * (flat_mean + noise_mean)
        mask = image.threshold_map(smap, theta)
        truth = np.zeros_like(mask)
        truth[:, :4] = 1
        assert (mask == truth).mean() >= 0.95
