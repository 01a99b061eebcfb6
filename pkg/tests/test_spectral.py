"""Welch estimation, band metrics, and intermodulation proxy spectra."""

import numpy as np
import pytest
import scipy.signal
from hypothesis import given, settings
from hypothesis import strategies as st

from tinsim import (
    Spectrum,
    TimeTrace,
    band_rms,
    normalize_to_max,
    rin_spectrum,
    snr_db,
    tin2_proxies,
    tin3_proxies,
    welch_psd,
)


def _white(n, fs, sigma=1.0, seed=0):
    rng = np.random.default_rng(seed)
    return TimeTrace(sigma * rng.standard_normal(n), fs, "V")


# ---------------------------------------------------------------------- welch


def test_white_noise_level_and_flatness():
    fs = 2e6
    trace = _white(1 << 18, fs, sigma=1.0, seed=11)
    spec = welch_psd(trace, 2048)
    level = 2.0 / fs  # single-sided density of unit-variance white noise
    inner = spec.values[1:-1]
    assert inner.mean() == pytest.approx(level, rel=0.02)
    for chunk in np.array_split(inner, 8):
        assert chunk.mean() == pytest.approx(level, rel=0.05)


def test_bin_centered_tone_recovers_power():
    fs, seg, n = 1e6, 4096, 1 << 16
    amp = 0.3
    k0 = 400
    t = np.arange(n) / fs
    f0 = k0 * fs / seg
    trace = TimeTrace(amp * np.cos(2.0 * np.pi * f0 * t), fs, "V")
    spec = welch_psd(trace, seg)
    power = spec.df * spec.values[k0 - 2 : k0 + 3].sum()
    assert power == pytest.approx(amp**2 / 2.0, rel=1e-9)
    # periodic hann confines a bin-centred tone to exactly three bins
    assert spec.values[k0 - 1] == pytest.approx(spec.values[k0] / 4.0, rel=1e-9)
    assert spec.values[k0 + 2] == pytest.approx(0.0, abs=spec.values[k0] * 1e-12)


def test_parseval():
    fs = 1e5
    trace = _white(1 << 15, fs, sigma=2.5, seed=7)
    var = trace.values.var()
    exact = welch_psd(trace, 1024, overlap=0.0, window="rectangular")
    assert exact.df * exact.values.sum() == pytest.approx(var, rel=1e-12)
    hann = welch_psd(trace, 1024, overlap=0.5, window="hann")
    assert hann.df * hann.values.sum() == pytest.approx(var, rel=0.01)


@pytest.mark.parametrize(
    "window,scipy_window", [("hann", "hann"), ("rectangular", "boxcar")]
)
def test_matches_scipy_welch(window, scipy_window):
    fs, seg = 4e6, 512
    values = _white(1 << 14, fs, seed=3).values
    values = values - values.mean()
    spec = welch_psd(TimeTrace(values, fs, ""), seg, overlap=0.5, window=window)
    f_ref, p_ref = scipy.signal.welch(
        values, fs, window=scipy_window, nperseg=seg, noverlap=seg // 2,
        detrend=False, scaling="density",
    )
    assert np.allclose(spec.frequencies, f_ref, rtol=1e-12, atol=0.0)
    assert np.allclose(spec.values, p_ref, rtol=1e-10, atol=0.0)


def test_welch_validation():
    trace = _white(4096, 1e6)
    with pytest.raises(ValueError, match="power of two"):
        welch_psd(trace, 1000)
    with pytest.raises(ValueError, match="exceeds"):
        welch_psd(trace, 8192)
    with pytest.raises(ValueError, match="overlap"):
        welch_psd(trace, 1024, overlap=1.0)
    with pytest.raises(ValueError, match="window"):
        welch_psd(trace, 1024, window="flattop")


def test_spectrum_grid_validation():
    with pytest.raises(ValueError, match="start at 0"):
        Spectrum(np.array([1.0, 2.0, 3.0]), np.zeros(3))
    with pytest.raises(ValueError, match="uniform"):
        Spectrum(np.array([0.0, 1.0, 3.0]), np.zeros(3))
    with pytest.raises(ValueError, match="equal length"):
        Spectrum(np.array([0.0, 1.0]), np.zeros(3))
    with pytest.raises(ValueError, match="two bins"):
        Spectrum(np.array([0.0]), np.zeros(1))


# ------------------------------------------------------------------------ rin


def test_rin_of_steady_beam_is_zero():
    trace = TimeTrace(np.full(4096, 3.7), 1e6, "W")
    spec = rin_spectrum(trace, 1024)
    assert spec.unit == "1"
    assert np.all(spec.values == 0.0)
    with pytest.raises(ValueError, match="zero-mean"):
        rin_spectrum(TimeTrace(np.zeros(4096), 1e6, "W"), 1024)


def test_rin_integral_equals_relative_variance():
    fs = 2e6
    rng = np.random.default_rng(13)
    values = 5.0 * (1.0 + 0.01 * rng.standard_normal(1 << 17))
    spec = rin_spectrum(TimeTrace(values, fs, "W"), 2048)
    assert spec.df * spec.values.sum() == pytest.approx(1e-4, rel=0.05)


# ----------------------------------------------------------------- band tools


def test_band_rms_flat_and_tone():
    f = np.arange(0.0, 1000.0, 10.0)
    flat = Spectrum(f, np.full(f.size, 0.04))
    assert band_rms(flat, 100.0, 500.0) == pytest.approx(np.sqrt(0.04 * 400.0))

    fs, seg, n = 1e6, 4096, 1 << 16
    t = np.arange(n) / fs
    f0 = 500 * fs / seg
    trace = TimeTrace(0.8 * np.cos(2.0 * np.pi * f0 * t), fs, "V")
    spec = welch_psd(trace, seg)
    assert band_rms(spec, f0 - 5 * spec.df, f0 + 5 * spec.df) == pytest.approx(
        0.8 / np.sqrt(2.0), rel=0.02
    )

    with pytest.raises(ValueError, match="f_hi > f_lo"):
        band_rms(flat, 500.0, 100.0)
    with pytest.raises(ValueError, match="fewer than two"):
        band_rms(flat, 101.0, 104.0)


def test_snr_db():
    f = np.arange(0.0, 1024.0)
    values = np.ones(f.size)
    values[(f >= 100) & (f <= 120)] = 10.0
    spec = Spectrum(f, values)
    # equal densities: bandwidth scaling cancels exactly
    assert snr_db(Spectrum(f, np.ones(f.size)), (100, 120), (300, 500)) == 0.0
    measured = snr_db(spec, (101, 119), (300, 500))
    assert measured == pytest.approx(10.0, abs=0.01)
    with pytest.raises(ValueError, match="disjoint"):
        snr_db(spec, (100, 300), (200, 500))
    with pytest.raises(ValueError, match="no power"):
        snr_db(Spectrum(f, np.zeros(f.size)), (100, 120), (300, 500))


# -------------------------------------------------------------------- proxies


def _spikes(n, df, at, height=1.0):
    values = np.zeros(n)
    for k in np.atleast_1d(at):
        values[int(k)] = height
    return Spectrum(np.arange(n) * df, values)


def test_tin2_single_tone():
    df = 2.0
    spec = _spikes(64, df, 10, height=3.0)
    s_plus, s_minus = tin2_proxies(spec)
    assert s_plus.unit == "()^2" or s_plus.unit.endswith("^2")
    expected = np.zeros(64)
    expected[20] = df * 9.0
    assert np.array_equal(s_plus.values, expected)
    expected_minus = np.zeros(64)
    expected_minus[0] = df * 9.0
    assert np.array_equal(s_minus.values, expected_minus)


def test_tin2_two_tones():
    df = 1.0
    spec = _spikes(128, df, (10, 35))
    s_plus, s_minus = tin2_proxies(spec)
    assert set(np.nonzero(s_plus.values)[0]) == {20, 45, 70}
    assert s_plus.values[45] == pytest.approx(2.0 * df)
    assert set(np.nonzero(s_minus.values)[0]) == {0, 25}
    # one ordered pair lands at the difference frequency; both at zero
    assert s_minus.values[25] == pytest.approx(1.0 * df)
    assert s_minus.values[0] == pytest.approx(2.0 * df)


def test_tin3_frozen_small_case():
    spec = Spectrum(np.arange(4.0), np.array([0.0, 2.0, 3.0, 5.0]))
    s_plus, s_minus = tin2_proxies(spec)
    assert np.array_equal(s_plus.values, [0.0, 0.0, 4.0, 12.0])
    assert np.array_equal(s_minus.values, [38.0, 21.0, 10.0, 0.0])
    s_pp, s_pm, s_mm = tin3_proxies(spec)
    assert np.array_equal(s_pp.values, [0.0, 0.0, 0.0, 8.0])
    assert np.array_equal(s_pm.values, [72.0, 189.0, 261.0, 273.0])
    assert np.array_equal(s_mm.values, [72.0, 20.0, 0.0, 0.0])


def test_tin3_sum_tone_dominates():
    # spikes at 103, 296, 652 kHz: six orderings pile up at the triple sum
    df = 1e3
    spec = _spikes(1200, df, (103, 296, 652))
    s_pp, _, _ = tin3_proxies(spec)
    assert int(np.argmax(s_pp.values)) == 1051
    assert s_pp.values[1051] == pytest.approx(6.0 * df**2)


def test_proxy_input_validation():
    f = np.arange(8.0)
    with pytest.raises(ValueError, match="non-negative"):
        tin2_proxies(Spectrum(f, np.array([0, 1, -1, 0, 0, 0, 0, 0.0])))
    zero = Spectrum(f, np.zeros(8))
    for out in (*tin2_proxies(zero), *tin3_proxies(zero)):
        assert np.all(out.values == 0.0)


@given(
    n=st.integers(4, 12),
    df=st.floats(0.25, 4.0),
    seed=st.integers(0, 2**31),
)
@settings(max_examples=40, deadline=None)
def test_tin3_matches_direct_sums(n, df, seed):
    rng = np.random.default_rng(seed)
    s = rng.uniform(0.0, 5.0, n)
    spec = Spectrum(np.arange(n) * df, s)
    s_pp, s_pm, s_mm = tin3_proxies(spec)
    s = s.copy()
    s[0] = 0.0
    pp = np.zeros(n)
    pm = np.zeros(n)
    mm = np.zeros(n)
    for k in range(n):
        for j1 in range(n):
            for j2 in range(n):
                if 0 <= k - j1 - j2 < n:
                    pp[k] += s[j1] * s[j2] * s[k - j1 - j2]
                if 0 <= k + j1 - j2 < n:
                    pm[k] += s[j1] * s[j2] * s[k + j1 - j2]
                if k + j1 + j2 < n:
                    mm[k] += s[j1] * s[j2] * s[k + j1 + j2]
    for fast, direct in ((s_pp, pp), (s_pm, pm), (s_mm, mm)):
        assert np.allclose(fast.values, df**2 * direct, rtol=1e-10, atol=1e-12)


def test_normalize_to_max():
    f = np.arange(0.0, 100.0)
    values = np.exp(-0.5 * ((f - 40.0) / 3.0) ** 2)
    spec = Spectrum(f, 7.0 * values, unit="m", window="hann", segments=4)
    out = normalize_to_max(spec, 20.0, 60.0)
    assert out.values.max() == 1.0
    assert int(np.argmax(out.values)) == 40
    assert out.unit == "m" and out.segments == 4
    with pytest.raises(ValueError, match="no power"):
        normalize_to_max(Spectrum(f, np.zeros(f.size)), 20.0, 60.0)
