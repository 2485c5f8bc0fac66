"""Tests for the rectangular-mask oscillation/transient separation."""

import math

import numpy as np
import pytest

import gammasep as g
from gammasep.despike import (
    NoDetectionError,
    RectMask,
    analysis_advance,
    build_mask,
    detect_oscillation_center,
    mask_geometry,
    mask_scales,
    separate,
    threshold_coeffs,
)
from gammasep.signal_core import TimeWindow, oscillation_duration_ms
from gammasep.swt import swt_decompose
from frozen import RESEPARATION_ENERGY_FRACTION
from oracles import pearson, placed_burst

FS = 512.0


def placed(template, start, n=5000):
    out = np.zeros(n)
    out[start : start + template.size] = template
    return out


def standard_burst(freq):
    return g.gen_gamma_burst(
        freq, oscillation_duration_ms(freq), 50.0, FS
    )


class TestMaskGeometry:
    def test_fixed_table(self):
        assert mask_geometry(45.0) == (200.0, 3)
        assert mask_geometry(55.0) == (180.0, 2)
        assert mask_geometry(85.0) == (150.0, 2)

    def test_fallback_is_nine_cycles_two_scales(self):
        duration, n_scales = mask_geometry(60.0)
        assert duration == pytest.approx(150.0)
        assert n_scales == 2

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            mask_geometry(-45.0)


class TestMaskScales:
    def test_scale_sets_at_512(self):
        assert mask_scales(45.0, FS) == frozenset({1, 2, 3})
        assert mask_scales(55.0, FS) == frozenset({2, 3})
        assert mask_scales(85.0, FS) == frozenset({1, 2})

    def test_clips_below_at_level_one(self):
        # 45 Hz at a low rate would want levels below 1; the set must not
        scales = mask_scales(45.0, 128.0)
        assert min(scales) >= 1


class TestRectMask:
    def test_freezes_scales(self):
        mask = RectMask(TimeWindow(0, 10), {2, 3}, 55.0)
        assert mask.scales == frozenset({2, 3})

    def test_rejects_empty_scales(self):
        with pytest.raises(ValueError):
            RectMask(TimeWindow(0, 10), set(), 55.0)

    def test_rejects_scales_below_one(self):
        with pytest.raises(ValueError):
            RectMask(TimeWindow(0, 10), {0, 1}, 55.0)


class TestBuildMask:
    def test_centered_window(self):
        mask = build_mask(2500, 45.0, FS, 5000)
        assert mask.window.start_sample == 2500 - 102 // 2
        assert mask.window.length_samples == 102
        assert mask.scales == frozenset({1, 2, 3})

    def test_clamps_at_the_left_edge(self):
        mask = build_mask(3, 45.0, FS, 5000)
        assert mask.window.start_sample == 0

    def test_clamps_at_the_right_edge(self):
        mask = build_mask(4999, 45.0, FS, 5000)
        assert mask.window.end_sample == 5000

    def test_window_never_exceeds_the_signal(self):
        mask = build_mask(30, 45.0, FS, 60)
        assert mask.window.length_samples == 60


class TestAnalysisAdvance:
    def test_level_one_half_filter(self):
        assert analysis_advance(8, 1) == 3

    def test_grows_with_depth(self):
        assert analysis_advance(8, 2) == 10
        assert analysis_advance(8, 3) == 24

    def test_single_tap_never_advances(self):
        for level in (1, 2, 5):
            assert analysis_advance(1, level) == 0


class TestDetection:
    @pytest.mark.parametrize("freq,tol", [(45.0, 10), (55.0, 10), (85.0, 10)])
    def test_pure_burst_center_within_ten_samples(self, freq, tol):
        burst = standard_burst(freq)
        start = 2500 - burst.size // 2
        result = separate(placed(burst, start), freq, FS)
        true_center = start + burst.size // 2
        assert abs(result.detection_center_sample - true_center) <= tol

    def test_all_zero_input_raises(self, db4):
        coeffs = swt_decompose(np.zeros(512), db4, 5)
        with pytest.raises(NoDetectionError):
            detect_oscillation_center(coeffs, 45.0, FS)

    def test_separate_propagates_no_detection(self):
        with pytest.raises(NoDetectionError):
            separate(np.zeros(512), 45.0, FS)

    def test_tie_breaks_to_the_earliest_burst(self):
        burst = standard_burst(45.0)
        x = placed(burst, 1000) + placed(burst, 3000)
        result = separate(x, 45.0, FS)
        first_center = 1000 + burst.size // 2
        assert abs(result.detection_center_sample - first_center) <= 10

    def test_too_shallow_decomposition_rejected(self, db4):
        coeffs = swt_decompose(np.ones(512), db4, 2)
        with pytest.raises(ValueError, match="levels"):
            detect_oscillation_center(coeffs, 45.0, FS)  # needs level 3


class TestThresholdCoeffs:
    def test_parts_sum_back_to_the_input_coefficients(self, db4, rng):
        coeffs = swt_decompose(rng.standard_normal(256), db4, 5)
        mask = RectMask(TimeWindow(100, 50), {1, 2}, 85.0)
        osc, trans = threshold_coeffs(coeffs, mask)
        for level in range(5):
            np.testing.assert_array_equal(
                osc.details[level] + trans.details[level], coeffs.details[level]
            )
            np.testing.assert_array_equal(
                osc.approximations[level] + trans.approximations[level],
                coeffs.approximations[level],
            )

    def test_full_mask_is_the_identity(self, db4, rng):
        x = rng.standard_normal(256)
        coeffs = swt_decompose(x, db4, 5)
        mask = RectMask(TimeWindow(0, 256), {1, 2, 3, 4, 5}, 85.0)
        osc, trans = threshold_coeffs(coeffs, mask)
        for level in range(5):
            np.testing.assert_array_equal(osc.details[level], coeffs.details[level])
            assert np.all(trans.details[level] == 0.0)
        back = g.iswt_reconstruct(osc, db4)
        assert np.max(np.abs(back - x)) < 1e-9

    def test_excluded_scales_carry_nothing(self, db4, rng):
        coeffs = swt_decompose(rng.standard_normal(256), db4, 5)
        mask = RectMask(TimeWindow(64, 64), {2, 3}, 55.0)
        osc, _ = threshold_coeffs(coeffs, mask)
        assert np.all(osc.details[0] == 0.0)
        assert np.all(osc.details[3] == 0.0)
        assert np.all(osc.details[4] == 0.0)

    def test_kept_coefficients_grow_with_the_window(self, db4, rng):
        coeffs = swt_decompose(rng.standard_normal(256), db4, 5)
        small = RectMask(TimeWindow(100, 40), {1, 2}, 85.0)
        large = RectMask(TimeWindow(80, 120), {1, 2, 3}, 85.0)
        osc_small, _ = threshold_coeffs(coeffs, small)
        osc_large, _ = threshold_coeffs(coeffs, large)
        for level in range(5):
            assert np.all(
                np.abs(osc_small.details[level]) <= np.abs(osc_large.details[level])
            )

    def test_mask_outside_signal_rejected(self, db4, rng):
        coeffs = swt_decompose(rng.standard_normal(128), db4, 3)
        mask = RectMask(TimeWindow(100, 40), {1, 2}, 85.0)
        with pytest.raises(ValueError):
            threshold_coeffs(coeffs, mask)

    def test_mask_deeper_than_coeffs_rejected(self, db4, rng):
        coeffs = swt_decompose(rng.standard_normal(128), db4, 2)
        mask = RectMask(TimeWindow(0, 64), {2, 3}, 55.0)
        with pytest.raises(ValueError):
            threshold_coeffs(coeffs, mask)


class TestSeparate:
    def test_additive_split_on_noisy_data(self, realization0):
        signal, truth = realization0
        for ch, ct in enumerate(truth.channels):
            result = separate(signal.data[ch], ct.burst_freq_hz, FS)
            recombined = result.oscillatory + result.transient
            assert np.max(np.abs(recombined - signal.data[ch])) < 1e-9

    def test_clean_separated_channel_recovers_the_burst(self):
        config = g.SimConfig(snr_db=math.inf, n_realizations=2)
        signal, truth = g.build_realization(config, 0)
        ct = truth.channels[0]  # separated regime, 45 Hz
        result = separate(signal.data[0], ct.burst_freq_hz, FS)
        assert pearson(result.oscillatory, placed_burst(ct, config)) >= 0.95
        # the distant spike must not leak into the oscillatory branch
        tw = ct.transient_window
        spike_energy = np.sum(signal.data[0][tw.start_sample : tw.end_sample] ** 2)
        leaked = np.sum(result.oscillatory[tw.start_sample : tw.end_sample] ** 2)
        assert leaked <= 0.05 * spike_energy

    @pytest.mark.parametrize("freq", [45.0, 85.0])
    def test_pure_tapered_pulse_stays_oscillatory(self, freq):
        burst = standard_burst(freq)
        x = placed(burst, 2500 - burst.size // 2)
        result = separate(x, freq, FS)
        assert np.sum(result.transient**2) <= 0.05 * np.sum(x**2)

    def test_shift_equivariance_away_from_edges(self):
        burst = standard_burst(45.0)
        x = placed(burst, 2449)
        base = separate(x, 45.0, FS)
        shifted = separate(np.roll(x, 37), 45.0, FS)
        assert np.array_equal(shifted.oscillatory, np.roll(base.oscillatory, 37))
        assert np.array_equal(shifted.transient, np.roll(base.transient, 37))
        assert (
            shifted.detection_center_sample
            == base.detection_center_sample + 37
        )

    def test_reseparation_changes_little_energy(self):
        burst = standard_burst(45.0)
        x = placed(burst, 2449)
        once = separate(x, 45.0, FS)
        twice = separate(once.oscillatory, 45.0, FS)
        change = np.sum((twice.oscillatory - once.oscillatory) ** 2)
        assert change / np.sum(once.oscillatory**2) <= (
            RESEPARATION_ENERGY_FRACTION
        )

    def test_mask_used_matches_the_report(self, realization0):
        signal, truth = realization0
        result = separate(signal.data[0], 45.0, FS)
        rebuilt = build_mask(
            result.detection_center_sample, 45.0, FS, signal.n_samples
        )
        assert result.mask_used == rebuilt


def test_harder_overlap_regimes_separate_worse():
    """Recovery degrades from separated to fully overlapped at equal SNR."""
    for freq in (45.0, 55.0, 85.0):
        config = g.SimConfig(
            burst_freqs_hz=(freq, freq),
            overlap_regimes=("separated", "fully_overlapped"),
            n_realizations=50,
        )
        corrs = {0: [], 1: []}
        for idx in range(config.n_realizations):
            signal, truth = g.build_realization(config, idx)
            for ch in (0, 1):
                result = separate(signal.data[ch], freq, FS)
                corrs[ch].append(
                    pearson(result.oscillatory, placed_burst(truth.channels[ch], config))
                )
        assert np.median(corrs[0]) > np.median(corrs[1]), (
            f"{freq} Hz: separated median {np.median(corrs[0]):.3f} vs "
            f"fully overlapped {np.median(corrs[1]):.3f}"
        )
