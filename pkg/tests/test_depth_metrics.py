"""Depth metrics: masks, median scaling, the seven metrics, aggregation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from endobench.depth_metrics import (EvalProtocol, MetricRecord,
                                     aggregate_frames, frame_metrics,
                                     median_scale, resample_pred, valid_mask)
from endobench.errors import EvaluationError, ShapeError

NO_SCALE = EvalProtocol(scaling="none", clamp=False)


def _random_maps(rng, h=16, w=20, lo=1.0, hi=100.0):
    gt = rng.uniform(lo, hi, (h, w))
    pred = rng.uniform(lo, hi, (h, w))
    return pred, gt


class TestValidMask:
    def test_all_in_range(self):
        gt = np.full((4, 4), 10.0)
        assert valid_mask(gt, EvalProtocol()).all()

    def test_all_zero(self):
        assert not valid_mask(np.zeros((4, 4)), EvalProtocol()).any()

    def test_single_cell_above_max(self):
        gt = np.full((3, 3), 10.0)
        gt[1, 2] = 151.0
        mask = valid_mask(gt, EvalProtocol())
        assert not mask[1, 2] and mask.sum() == 8

    def test_nan_and_below_min_excluded(self):
        gt = np.array([[np.nan, 0.05], [0.1, 150.0]])
        mask = valid_mask(gt, EvalProtocol())
        assert mask.tolist() == [[False, False], [True, True]]


class TestMedianScale:
    def test_identity_when_equal(self):
        gt = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = median_scale(gt.copy(), gt, np.ones_like(gt, bool))
        np.testing.assert_allclose(out, gt)

    def test_half_scale_recovers_gt(self):
        gt = np.array([[2.0, 4.0], [6.0, 8.0]])
        out = median_scale(0.5 * gt, gt, np.ones_like(gt, bool))
        np.testing.assert_allclose(out, gt)

    def test_post_scaling_medians_match_sort_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            pred, gt = _random_maps(rng, 4, 4)
            out = median_scale(pred, gt, np.ones_like(gt, bool))

            def sort_median(a):
                flat = sorted(a.ravel().tolist())
                n = len(flat)
                return (flat[n // 2 - 1] + flat[n // 2]) / 2 if n % 2 == 0 \
                    else flat[n // 2]

            assert sort_median(out) == pytest.approx(sort_median(gt), rel=1e-12)

    def test_empty_mask_rejected(self):
        gt = np.ones((2, 2))
        with pytest.raises(EvaluationError, match="valid pixel"):
            median_scale(gt, gt, np.zeros_like(gt, bool))

    def test_zero_median_prediction_rejected(self):
        gt = np.ones((2, 2))
        with pytest.raises(EvaluationError, match="degenerate"):
            median_scale(np.zeros((2, 2)), gt, np.ones_like(gt, bool))


class TestFrameMetrics:
    def test_perfect_prediction(self):
        gt = np.linspace(1, 100, 64).reshape(8, 8)
        rec = frame_metrics(gt.copy(), gt, NO_SCALE)
        assert rec.as_tuple() == (0, 0, 0, 0, 1, 1, 1)

    def test_ratio_1p3_anchor(self):
        # 1.3 > 1.25 but 1.3 < 1.5625: a1 = 0, a2 = a3 = 1; AbsRel = 0.3
        gt = np.linspace(1, 50, 30).reshape(5, 6)
        rec = frame_metrics(1.3 * gt, gt, NO_SCALE)
        assert rec.abs_rel == pytest.approx(0.3, rel=1e-12)
        assert (rec.a1, rec.a2, rec.a3) == (0.0, 1.0, 1.0)

    def test_constant_offset_anchor(self):
        gt = np.full((4, 4), 10.0)
        rec = frame_metrics(gt + 2.0, gt, NO_SCALE)
        assert rec.rmse == pytest.approx(2.0, rel=1e-12)
        assert rec.abs_rel == pytest.approx(0.2, rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            frame_metrics(np.ones((3, 3)), np.ones((3, 4)), NO_SCALE)

    def test_empty_mask_raises(self):
        with pytest.raises(EvaluationError, match="no valid"):
            frame_metrics(np.ones((3, 3)), np.zeros((3, 3)), EvalProtocol())

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_nested_thresholds(self, seed):
        rng = np.random.default_rng(seed)
        pred, gt = _random_maps(rng)
        rec = frame_metrics(pred, gt, NO_SCALE)
        assert rec.a1 <= rec.a2 <= rec.a3

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_zero_characterization(self, seed):
        rng = np.random.default_rng(seed)
        pred, gt = _random_maps(rng)
        rec = frame_metrics(pred, gt, NO_SCALE)
        zeros = (rec.abs_rel, rec.sq_rel, rec.rmse, rec.log_rmse) == (0, 0, 0, 0)
        ones = (rec.a1, rec.a2, rec.a3) == (1, 1, 1)
        equal = np.array_equal(pred, gt)
        assert (zeros and ones) == equal

    def test_joint_scale_behavior(self):
        # wide bounds so scaling cannot move gt cells out of the valid mask
        protocol = EvalProtocol(min_depth=1e-6, max_depth=1e9,
                                scaling="none", clamp=False)
        rng = np.random.default_rng(3)
        for _ in range(10):
            pred, gt = _random_maps(rng)
            c = rng.uniform(0.5, 3.0)
            base = frame_metrics(pred, gt, protocol)
            scaled = frame_metrics(c * pred, c * gt, protocol)
            assert scaled.abs_rel == pytest.approx(base.abs_rel, rel=1e-9)
            assert scaled.log_rmse == pytest.approx(base.log_rmse, rel=1e-9, abs=1e-12)
            assert scaled.rmse == pytest.approx(c * base.rmse, rel=1e-9)
            assert scaled.sq_rel == pytest.approx(c * base.sq_rel, rel=1e-9)
            assert (scaled.a1, scaled.a2, scaled.a3) == (base.a1, base.a2, base.a3)

    def test_median_scaling_gauge_invariance(self):
        protocol = EvalProtocol(scaling="per-frame-median", clamp=False)
        rng = np.random.default_rng(4)
        for _ in range(10):
            pred, gt = _random_maps(rng)
            base = frame_metrics(pred, gt, protocol)
            for c in (0.01, 0.37, 42.0):
                rec = frame_metrics(c * pred, gt, protocol)
                np.testing.assert_allclose(rec.as_tuple(), base.as_tuple(),
                                           rtol=1e-9, atol=1e-12)

    def test_mask_monotonicity_invalid_pixel_ignored(self):
        rng = np.random.default_rng(5)
        pred, gt = _random_maps(rng, 6, 6)
        base = frame_metrics(pred, gt, NO_SCALE)
        gt2 = gt.copy()
        gt2[2, 3] = 0.0  # invalidate one cell
        pred2 = pred.copy()
        pred2[2, 3] = 9999.0  # and make pred arbitrary there
        masked = frame_metrics(
            np.delete(pred.ravel(), 2 * 6 + 3).reshape(1, -1),
            np.delete(gt.ravel(), 2 * 6 + 3).reshape(1, -1), NO_SCALE)
        rec = frame_metrics(pred2, gt2, NO_SCALE)
        np.testing.assert_allclose(rec.as_tuple(), masked.as_tuple(), rtol=1e-12)
        assert not np.allclose(rec.as_tuple(), base.as_tuple())


class TestResample:
    def test_same_size_identity(self):
        grid = np.random.default_rng(0).uniform(1, 5, (4, 6)).astype(np.float32)
        np.testing.assert_array_equal(resample_pred(grid, 6, 4), grid)

    def test_constant_upscale(self):
        grid = np.full((3, 3), 7.5, dtype=np.float32)
        out = resample_pred(grid, 6, 6)
        np.testing.assert_allclose(out, 7.5, rtol=1e-6)

    def test_two_sample_axis_center_anchor(self):
        # hand weights: upscaling [1, 3] to 4 samples gives [1, 1.5, 2.5, 3]
        # and the two central samples average to exactly 2.0
        grid = np.array([[1.0, 3.0]], dtype=np.float32)
        out = resample_pred(grid, 4, 1)[0]
        assert (out[1] + out[2]) / 2 == pytest.approx(2.0, rel=1e-6)
        np.testing.assert_allclose(out, [1.0, 1.5, 2.5, 3.0], rtol=1e-6)

    def test_invalid_cells_excluded_from_weights(self):
        grid = np.array([[10.0, 0.0], [10.0, 10.0]], dtype=np.float32)
        out = resample_pred(grid, 4, 4)
        # wherever there is valid support, interpolation sees only the 10s
        assert np.all(out[out > 0] == pytest.approx(10.0, rel=1e-6))

    def test_all_invalid_region_stays_invalid(self):
        grid = np.zeros((4, 4), dtype=np.float32)
        out = resample_pred(grid, 8, 8)
        assert (out == 0).all()

    def test_zero_target_rejected(self):
        with pytest.raises(ShapeError):
            resample_pred(np.ones((2, 2)), 0, 4)


class TestAggregate:
    def test_single_record(self):
        rec = MetricRecord(0.1, 0.2, 1.0, 0.05, 0.9, 0.95, 1.0)
        assert aggregate_frames([rec]) == rec

    def test_two_record_mean(self):
        a = MetricRecord(0.1, 0.2, 1.0, 0.05, 0.9, 0.95, 1.0)
        b = MetricRecord(0.3, 0.4, 3.0, 0.15, 0.7, 0.85, 0.9)
        mean = aggregate_frames([a, b])
        np.testing.assert_allclose(
            mean.as_tuple(), [0.2, 0.3, 2.0, 0.1, 0.8, 0.9, 0.95], rtol=1e-15)

    def test_551_records_match_extended_precision_oracle(self):
        rng = np.random.default_rng(551)
        records = [MetricRecord(*rng.uniform(0.001, 10.0, 4),
                                *sorted(rng.uniform(0, 1, 3)))
                   for _ in range(551)]
        mean = aggregate_frames(records)
        for i in range(7):
            oracle = math.fsum(r.as_tuple()[i] for r in records) / 551
            assert mean.as_tuple()[i] == pytest.approx(oracle, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EvaluationError):
            aggregate_frames([])
