import numpy as np
import pytest

from geoeval.cleaning import (CleanConfig, apply_sky_mask, bilateral_filter,
                              clean_pipeline, clip_range,
                              remove_flying_points, remove_small_components)
from geoeval.depthmap import DepthFrame
from geoeval.errors import DataError


def frame(depth, mask=None):
    return DepthFrame(np.asarray(depth, dtype=np.float64), mask)


class TestClipRange:
    def test_in_range_unchanged(self, rng):
        f = frame(rng.uniform(1.0, 2.0, (6, 6)))
        out = clip_range(f, 0.05, 5.0)
        assert np.array_equal(out.mask, f.mask)
        assert np.array_equal(out.depth, f.depth)
        assert out.stage_counts == {"range": 0}

    def test_out_of_range_invalidated(self):
        # 6 m against the [0.05, 5] egocentric indoor range
        d = np.full((3, 3), 1.0)
        d[1, 1] = 6.0
        out = clip_range(frame(d), 0.05, 5.0)
        assert not out.mask[1, 1]
        assert out.depth[1, 1] == 6.0  # value untouched
        assert out.stage_counts == {"range": 1}

    def test_per_pixel_oracle(self, rng):
        d = rng.uniform(0.0, 8.0, (16, 16)) + 0.01
        f = frame(d)
        out = clip_range(f, 0.5, 4.0)
        expected = f.mask & (d >= 0.5) & (d <= 4.0)
        assert np.array_equal(out.mask, expected)

    def test_idempotent(self, rng):
        f = frame(rng.uniform(0.0, 8.0, (8, 8)) + 0.01)
        once = clip_range(f, 0.5, 4.0)
        twice = clip_range(DepthFrame(once.depth, once.mask), 0.5, 4.0)
        assert np.array_equal(once.mask, twice.mask)


class TestRemoveFlyingPoints:
    def test_constant_depth_untouched(self):
        f = frame(np.full((8, 8), 2.0))
        out = remove_flying_points(f, 0.1, 1)
        assert out.stage_counts == {"flying": 0}

    def test_step_edge_band(self):
        # 1 m -> 3 m step between columns 3 and 4; theta 0.1, erosion 1.
        # Forward difference flags column 3; the erosion band spreads it to
        # columns 2..4 on every row (both sides of the step).
        d = np.ones((4, 8))
        d[:, 4:] = 3.0
        out = remove_flying_points(frame(d), 0.1, 1)
        expected = np.ones((4, 8), dtype=bool)
        expected[:, 2:5] = False
        assert np.array_equal(out.mask, expected)

    def test_smooth_ramp_below_threshold(self):
        # 1% relative slope stays well below theta = 0.1
        cols = 1.0 * (1.01 ** np.arange(16))
        d = np.tile(cols, (4, 1))
        out = remove_flying_points(frame(d), 0.1, 1)
        assert out.stage_counts == {"flying": 0}

    def test_gradient_skips_invalid_neighbors(self):
        # the jump is next to an invalid pixel, so no valid-valid pair sees it
        d = np.ones((3, 4))
        d[:, 2] = 50.0
        mask = np.ones((3, 4), dtype=bool)
        mask[:, 2] = False
        out = remove_flying_points(frame(d, mask), 0.1, 0)
        assert out.stage_counts == {"flying": 0}


class TestBilateralFilter:
    def test_constant_everything_is_identity(self):
        f = frame(np.full((6, 6), 2.0))
        rgb = np.full((6, 6, 3), 0.5)
        out = bilateral_filter(f, rgb, 5, 2.0, 0.1)
        assert np.allclose(out.depth, 2.0)
        assert np.array_equal(out.mask, f.mask)

    def test_isolated_pixel_unchanged(self):
        d = np.full((5, 5), 1.7)
        mask = np.zeros((5, 5), dtype=bool)
        mask[2, 2] = True
        out = bilateral_filter(frame(d, mask), np.zeros((5, 5, 3)), 5, 2.0, 0.1)
        assert out.depth[2, 2] == pytest.approx(1.7, abs=1e-15)

    def test_double_loop_oracle(self, rng):
        h = w = 16
        window, ss, sc = 5, 2.0, 0.1
        d = rng.uniform(0.5, 3.0, (h, w))
        mask = rng.random((h, w)) > 0.25
        rgb = rng.random((h, w, 3))
        out = bilateral_filter(frame(d, mask), rgb, window, ss, sc)
        r = window // 2
        for y in range(h):
            for x in range(w):
                if not mask[y, x]:
                    assert out.depth[y, x] == d[y, x]
                    continue
                num = den = 0.0
                for dy in range(-r, r + 1):
                    for dx in range(-r, r + 1):
                        ny, nx = y + dy, x + dx
                        if not (0 <= ny < h and 0 <= nx < w and mask[ny, nx]):
                            continue
                        ws = np.exp(-(dy * dy + dx * dx) / (2 * ss * ss))
                        diff = rgb[ny, nx] - rgb[y, x]
                        wc = np.exp(-float(diff @ diff) / (2 * sc * sc))
                        num += ws * wc * d[ny, nx]
                        den += ws * wc
                assert abs(out.depth[y, x] - num / den) < 1e-10

    def test_no_hole_filling(self, rng):
        d = rng.uniform(1, 2, (8, 8))
        mask = rng.random((8, 8)) > 0.5
        out = bilateral_filter(frame(d, mask), rng.random((8, 8, 3)), 5, 2.0, 0.1)
        assert np.array_equal(out.mask, mask)
        assert np.array_equal(out.depth[~mask], d[~mask])

    def test_convex_combination_bounds(self, rng):
        d = rng.uniform(0.5, 4.0, (10, 10))
        mask = rng.random((10, 10)) > 0.3
        out = bilateral_filter(frame(d, mask), rng.random((10, 10, 3)), 5, 2.0, 0.1)
        valid_vals = d[mask]
        assert out.depth[mask].min() >= valid_vals.min() - 1e-12
        assert out.depth[mask].max() <= valid_vals.max() + 1e-12

    def test_dimension_mismatch_errors(self):
        f = frame(np.ones((4, 4)))
        with pytest.raises(DataError, match="do not match"):
            bilateral_filter(f, np.zeros((5, 5, 3)), 5, 2.0, 0.1)


class TestRemoveSmallComponents:
    def test_large_component_kept(self):
        f = frame(np.ones((10, 10)))
        out = remove_small_components(f, 50, 4)
        assert out.mask.all()

    def test_single_speckle_removed(self):
        mask = np.zeros((10, 10), dtype=bool)
        mask[5, 5] = True
        out = remove_small_components(frame(np.ones((10, 10)), mask), 100, 4)
        assert not out.mask.any()
        assert out.stage_counts == {"components": 1}

    def test_flood_fill_oracle(self, rng):
        mask = rng.random((20, 20)) > 0.55
        f = frame(np.ones((20, 20)), mask)
        min_area = 5
        out = remove_small_components(f, min_area, 4)
        # BFS flood fill oracle, 4-connectivity
        seen = np.zeros_like(mask)
        expected = np.zeros_like(mask)
        for sy in range(20):
            for sx in range(20):
                if not mask[sy, sx] or seen[sy, sx]:
                    continue
                comp = [(sy, sx)]
                seen[sy, sx] = True
                queue = [(sy, sx)]
                while queue:
                    y, x = queue.pop()
                    for ny, nx in ((y-1, x), (y+1, x), (y, x-1), (y, x+1)):
                        if 0 <= ny < 20 and 0 <= nx < 20 and mask[ny, nx] \
                                and not seen[ny, nx]:
                            seen[ny, nx] = True
                            comp.append((ny, nx))
                            queue.append((ny, nx))
                if len(comp) >= min_area:
                    for y, x in comp:
                        expected[y, x] = True
        assert np.array_equal(out.mask, expected)

    def test_eight_connectivity_bridges_diagonals(self):
        mask = np.zeros((4, 4), dtype=bool)
        mask[0, 0] = mask[1, 1] = mask[2, 2] = True
        f = frame(np.ones((4, 4)), mask)
        assert not remove_small_components(f, 3, 4).mask.any()
        assert remove_small_components(f, 3, 8).mask.sum() == 3

    def test_idempotent(self, rng):
        mask = rng.random((15, 15)) > 0.5
        f = frame(np.ones((15, 15)), mask)
        once = remove_small_components(f, 4, 4)
        twice = remove_small_components(DepthFrame(once.depth, once.mask), 4, 4)
        assert np.array_equal(once.mask, twice.mask)


class TestApplySkyMask:
    def test_empty_sky_unchanged(self, rng):
        f = frame(rng.uniform(1, 2, (6, 6)))
        out = apply_sky_mask(f, np.zeros((6, 6), dtype=np.uint8))
        assert np.array_equal(out.mask, f.mask)

    def test_full_sky_all_invalid(self, rng):
        f = frame(rng.uniform(1, 2, (6, 6)))
        out = apply_sky_mask(f, np.full((6, 6), 255, dtype=np.uint8))
        assert not out.mask.any()

    def test_intersection_oracle(self, rng):
        mask = rng.random((12, 12)) > 0.3
        sky = (rng.random((12, 12)) > 0.5).astype(np.uint8) * 7
        f = frame(np.ones((12, 12)), mask)
        out = apply_sky_mask(f, sky)
        assert np.array_equal(out.mask, mask & (sky == 0))

    def test_dimension_mismatch_errors(self):
        with pytest.raises(DataError, match="do not match"):
            apply_sky_mask(frame(np.ones((4, 4))), np.zeros((3, 3)))


class TestPipeline:
    def build_fixture(self):
        """Frame with an out-of-range band, a flying edge, and speckles."""
        h, w = 20, 30
        d = np.full((h, w), 1.0)
        d[:, 25:] = 9.0          # out-of-range band (d_max = 5)
        d[:, 10:25] = 3.0        # 1 m -> 3 m step at column 9/10
        mask = np.ones((h, w), dtype=bool)
        # speckles: isolated pixels far from everything else
        mask[:, 5] = False
        mask[:, 7] = False
        mask[5, 6] = True        # the column in between is isolated
        mask[:0, 6] = False
        speckle = np.zeros((h, w), dtype=bool)
        speckle[5, 6] = True
        mask[:, 6] = speckle[:, 6]
        return DepthFrame(d, mask), np.full((h, w, 3), 0.5)

    def test_clean_frame_passthrough(self, rng):
        f = frame(np.full((12, 12), 2.0))
        rgb = np.full((12, 12, 3), 0.4)
        cfg = CleanConfig(min_area=4)
        out = clean_pipeline(f, rgb, cfg)
        assert np.array_equal(out.mask, f.mask)
        assert np.allclose(out.depth[out.mask], 2.0)

    def test_each_artifact_attributed_to_its_stage(self):
        f, rgb = self.build_fixture()
        cfg = CleanConfig(d_min=0.05, d_max=5.0, theta_rel=0.1,
                          erosion_radius=1, window=3, min_area=10,
                          connectivity=4)
        out = clean_pipeline(f, rgb, cfg)
        counts = out.stage_counts
        assert counts["range"] == 20 * 5        # the 9 m band
        assert counts["flying"] > 0             # the step edge band
        assert counts["components"] >= 1        # the speckle
        assert counts["sky"] == 0               # no sky mask supplied
        assert not out.mask[5, 6]
        assert not out.mask[0, 27]
        assert not out.mask[0, 9] and not out.mask[0, 10]

    def test_sky_stage_runs_when_supplied(self, rng):
        f = frame(np.full((8, 8), 2.0))
        rgb = np.full((8, 8, 3), 0.5)
        sky = np.zeros((8, 8), dtype=np.uint8)
        sky[0, :] = 1
        out = clean_pipeline(f, rgb, CleanConfig(min_area=4), sky=sky)
        assert out.stage_counts["sky"] == 8
        assert not out.mask[0].any()

    def test_monotone_shrink_and_no_fill(self, rng):
        d = rng.uniform(0.5, 6.0, (16, 16))
        mask = rng.random((16, 16)) > 0.2
        f = DepthFrame(d, mask)
        rgb = rng.random((16, 16, 3))
        out = clean_pipeline(f, rgb, CleanConfig(min_area=3))
        assert not (out.mask & ~mask).any()          # valid set only shrinks
        assert np.array_equal(out.depth[~mask], d[~mask])  # no fill
