import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from wifimd import align
from wifimd.caf import CafConfig, DopplerSpectrogram
from wifimd.errors import InvalidArgument, NoMotionDetected

from oracles import injected_spectrogram

AXIS = CafConfig().freq_axis_hz


def _spec(values):
    return DopplerSpectrogram(np.asarray(values, float), AXIS, 0.04)


def _injected(T, s, e, f0, rng, floor_db=-35.0):
    return injected_spectrogram(rng, AXIS, T, s, e, f0, floor_db)


class TestWeights:
    def test_values(self):
        w = align.doppler_weights(51)
        assert w[25] == 1 and w[24] == 1 and w[26] == 1
        assert w[0] == w[50] == 625
        assert np.all(w > 0)


class TestWeightedMoments:
    def test_mean_hand_case(self):
        assert align.weighted_mean([0, 0, 1], [1, 4, 9]) == 3.0

    def test_std_hand_case(self):
        # deviations |X - 3| = 3, 3, 2 weighted by 1, 4, 9 -> (9 + 144 + 324) / 14
        assert abs(align.weighted_std([0, 0, 1], [1, 4, 9]) - math.sqrt(477 / 14)) < 1e-12

    def test_zero_column(self):
        assert align.weighted_mean(np.zeros(5), np.arange(1, 6)) == 0
        assert align.weighted_std(np.zeros(5), np.arange(1, 6)) == 0

    def test_mean_divides_by_bin_count(self):
        assert align.weighted_mean([1, 1], [3, 5]) == 4.0

    def test_std_doubles(self, rng):
        x, w = rng.random(51), align.doppler_weights(51)
        assert align.weighted_std(2 * x, w) == pytest.approx(2 * align.weighted_std(x, w), rel=1e-12)

    def test_matrix_columns(self, rng):
        X, w = rng.random((51, 7)), align.doppler_weights(51)
        cols = [align.weighted_std(X[:, j], w) for j in range(7)]
        assert np.allclose(align.weighted_std(X, w), cols)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgument):
            align.weighted_std([1, 2, 3], [1, 1])

    def test_off_dc_peak_outweighs_dc_peak(self):
        w = align.doppler_weights(51)
        at_dc, off_dc = np.zeros(51), np.zeros(51)
        at_dc[25] = off_dc[35] = 1.0
        assert align.weighted_std(off_dc, w) > align.weighted_std(at_dc, w)

    @settings(max_examples=50, deadline=None)
    @given(x=arrays(float, 51, elements=st.floats(0, 1e3)), c=st.floats(0.01, 100))
    def test_positive_homogeneity(self, x, c):
        w = align.doppler_weights(51)
        assert align.weighted_std(c * x, w) == pytest.approx(c * align.weighted_std(x, w),
                                                              rel=1e-9, abs=1e-9)


class TestDetection:
    def test_rule_hand_case(self):
        trace = [.1, .1, 5, 6, 7, 6, 5, .1, .1, .1]
        assert align.bounds_from_trace(trace, 1.0) == (2, 6)

    def test_no_end_runs_to_last_bin(self):
        assert align.bounds_from_trace([5] * 8, 1.0) == (0, 7)

    def test_two_bin_blip_ignored(self):
        trace = [.1, 5, 5, .1, .1, 5, 5, 5, .1, .1, .1]
        assert align.bounds_from_trace(trace, 1.0) == (5, 7)

    def test_all_noise(self, rng):
        with pytest.raises(NoMotionDetected):
            align.detect_bounds(_spec(0.1 * rng.random((51, 20))), threshold=1e3)

    def test_needs_six_frames(self, rng):
        with pytest.raises(InvalidArgument):
            align.detect_bounds(_spec(rng.random((51, 5))))

    def test_nonpositive_threshold(self, rng):
        with pytest.raises(InvalidArgument):
            align.detect_bounds(_spec(rng.random((51, 10))), threshold=0)

    def test_injected_bounds_at_three_noise_spreads(self, rng):
        trace = align.std_trace(_spec(_injected(400, 0, -1, 0.0, rng)))
        threshold = trace.mean() + 3 * trace.std()
        v = _injected(60, 20, 35, 10.0, rng)
        b = align.detect_bounds(_spec(v), threshold=threshold)
        assert abs(b.start_bin - 20) <= 2 and abs(b.end_bin - 35) <= 2

    def test_default_threshold_finds_injected_bounds(self, rng):
        b = align.detect_bounds(_spec(_injected(60, 20, 35, 10.0, rng)))
        assert abs(b.start_bin - 20) <= 2 and abs(b.end_bin - 35) <= 2

    def test_default_threshold_needs_quiet_majority(self, rng):
        # with motion in most columns the median sits on the motion itself
        v = _injected(40, 2, 35, 10.0, rng)
        quiet = align.std_trace(_spec(_injected(40, 0, -1, 0.0, rng))).max()
        b = align.detect_bounds(_spec(v), threshold=2 * quiet)
        assert (b.start_bin, b.end_bin) == (2, 35)
        assert align.default_threshold(b.std_trace) > np.median(b.std_trace[2:36]) * 0.9

    def test_dc_ridge_does_not_trigger(self, rng):
        v = _injected(40, 15, 24, -6.0, rng)
        v[25, :] += 5.0
        b = align.detect_bounds(_spec(v))
        assert abs(b.start_bin - 15) <= 2 and abs(b.end_bin - 24) <= 2

    def test_invariant_to_padding_noise_columns(self, rng):
        v = _injected(30, 10, 20, 12.0, rng)
        pre, post = _injected(7, 0, -1, 0.0, rng), _injected(9, 0, -1, 0.0, rng)
        thr = 0.5 * (align.std_trace(_spec(v)).max() + align.std_trace(_spec(pre)).max())
        b0 = align.detect_bounds(_spec(v), threshold=thr)
        b1 = align.detect_bounds(_spec(np.hstack([pre, v, post])), threshold=thr)
        assert (b1.start_bin - 7, b1.end_bin - 7) == (b0.start_bin, b0.end_bin)


class TestCrop:
    def test_full_range(self, rng):
        v = rng.random((51, 10))
        assert np.array_equal(align.crop(_spec(v), align.DetectionBounds(0, 9, None)), v)

    def test_sub_range(self, rng):
        v = rng.random((51, 10))
        out = align.crop(_spec(v), align.DetectionBounds(2, 6, None))
        assert out.shape == (51, 5)
        assert np.array_equal(out, v[:, 2:7])

    def test_keeps_centred_maximum(self, rng):
        v = rng.random((51, 10))
        v[30, 4] = 10
        assert align.crop(_spec(v), align.DetectionBounds(2, 6, None)).max() == 10

    def test_out_of_range(self, rng):
        with pytest.raises(InvalidArgument):
            align.crop(_spec(rng.random((51, 10))), align.DetectionBounds(2, 10, None))


class TestBicubic:
    def test_kernel_interpolates(self):
        assert align.cubic_kernel(0.0) == 1.0
        assert np.allclose(align.cubic_kernel([1.0, 2.0, -1.0, 2.5]), 0.0)

    def test_identity(self, rng):
        m = rng.random((51, 50))
        assert np.max(np.abs(align.bicubic_resize(m, 50) - m)) < 1e-9

    def test_constant(self):
        out = align.bicubic_resize(np.full((51, 17), 3.25), 50)
        assert out.shape == (51, 50)
        assert np.allclose(out, 3.25, atol=1e-12)

    def test_linear_ramp_interior(self):
        W = 20
        m = np.tile(np.arange(W, dtype=float), (51, 1))
        out = align.bicubic_resize(m, 50)
        x = (np.arange(50) + 0.5) * W / 50 - 0.5
        interior = (x >= 1) & (x <= W - 2)
        assert np.allclose(out[:, interior], x[interior], atol=1e-6)

    def test_rows_untouched(self, rng):
        col = rng.random(51)
        out = align.bicubic_resize(np.tile(col[:, None], (1, 9)), 50)
        assert np.allclose(out, col[:, None])

    @pytest.mark.parametrize("W", [12, 25, 37, 80, 140])
    def test_mass_preserved_for_smooth_input(self, W):
        t = np.linspace(0, 1, W)
        m = np.outer(np.hanning(51) + 0.1, np.sin(np.pi * t) + 0.2)
        out = align.bicubic_resize(m, 50)
        assert out.sum() * (W / 50) == pytest.approx(m.sum(), rel=0.02)

    def test_too_narrow(self):
        with pytest.raises(InvalidArgument):
            align.bicubic_resize(np.ones((51, 1)))


class TestNormalizeVectorize:
    def test_normalize_examples(self):
        assert np.array_equal(align.normalize01([[2, 4], [6, 10]]), [[0, .25], [.5, 1]])
        assert np.array_equal(align.normalize01(np.full((3, 3), 7.0)), np.zeros((3, 3)))

    def test_column_major(self):
        m = np.arange(align.SIG_SIZE, dtype=float).reshape(51, 50)
        d = align.vectorize(m)
        assert d.size == 2550
        assert d[0] == m[0, 0] and d[1] == m[1, 0] and d[51] == m[0, 1]
        assert np.array_equal(align.unvectorize(d), m)

    def test_wrong_shape(self):
        with pytest.raises(InvalidArgument):
            align.vectorize(np.zeros((50, 51)))


class TestAlignSignature:
    @pytest.mark.parametrize("T,s,e", [(30, 8, 20), (80, 10, 40), (45, 5, 9)])
    def test_output_contract(self, rng, T, s, e):
        sig = align.align_signature(_spec(_injected(T, s, e, -8.0, rng)), label="M2")
        assert sig.matrix.shape == (51, 50)
        assert sig.matrix.min() == 0.0 and sig.matrix.max() == 1.0
        assert sig.vector.shape == (2550,)
        assert sig.label.name == "M2"

    def test_wrong_bin_count(self, rng):
        spec = DopplerSpectrogram(rng.random((31, 20)), np.arange(31) - 15.0, 0.04)
        with pytest.raises(InvalidArgument):
            align.align_signature(spec)
