"""Spectral estimation and intermodulation proxy spectra.

welch_psd is a plain Welch estimator (window power corrected, single-sided,
deterministic segment averaging).  The tin2/tin3 proxies are the
self-convolutions of a measured PSD that predict where second- and
third-order mixing products of a broadband signal land:

    S+(O)  = int_0^O  dw S(w) S(O - w)
    S-(O)  = int_0^inf dw S(w) S(w + O)
    S++(O) = int_0^O dw1 int_0^(O-w1) dw2 S(w1) S(w2) S(O - w1 - w2)
    S+-(O) = int_0^inf dw1 int_0^(O+w1) dw2 S(w1) S(w2) S(O + w1 - w2)
    S--(O) = int_0^inf dw1 int_0^inf dw2 S(w1) S(w2) S(O + w1 + w2)

evaluated as discrete Riemann sums on the input grid (DC bin excluded,
integrals truncated at the grid edge).  They are computed here through
convolution/correlation identities that are exactly the direct sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trace import TimeTrace

_WINDOWS = ("hann", "rectangular")


@dataclass(frozen=True)
class Spectrum:
    """Single-sided spectral density on a uniform frequency grid.

    values[k] is the density at frequencies[k] (Hz); for a base unit tag u
    the values carry u^2/Hz.  window/overlap/segments record how the
    estimate was formed (informational; "none" for model or derived
    spectra).
    """

    frequencies: np.ndarray
    values: np.ndarray
    unit: str = ""
    window: str = "none"
    overlap: float = 0.0
    segments: int = 1

    def __post_init__(self):
        f = np.ascontiguousarray(self.frequencies, dtype=np.float64)
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if f.ndim != 1 or v.ndim != 1 or f.size != v.size:
            raise ValueError("frequencies and values must be 1-D of equal length")
        if f.size < 2:
            raise ValueError("spectrum needs at least two bins")
        if f[0] != 0.0:
            raise ValueError("frequency grid must start at 0")
        df = f[1] - f[0]
        if df <= 0.0 or not np.allclose(np.diff(f), df, rtol=1e-9, atol=0.0):
            raise ValueError("frequency grid must be uniform and increasing")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)

    @property
    def df(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    @property
    def n(self) -> int:
        return self.frequencies.size


def _window(name: str, length: int) -> np.ndarray:
    if name == "hann":
        # periodic hann; DFT support of a bin-centred tone is exactly 3 bins
        k = np.arange(length)
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * k / length)
    if name == "rectangular":
        return np.ones(length)
    raise ValueError(f"unknown window {name!r}; use one of {_WINDOWS}")


def welch_psd(
    trace: TimeTrace,
    segment_length: int,
    overlap: float = 0.5,
    window: str = "hann",
) -> Spectrum:
    """Welch power spectral density of a time trace.

    The trace mean is removed once, globally, before segmenting.  Segments
    of segment_length (a power of two, <= trace length) hop by
    segment_length*(1-overlap); each is windowed, transformed, and the
    window-power-corrected periodograms are averaged in index order.
    Single-sided scaling doubles every bin except DC and Nyquist, so
    df * sum(psd) equals the trace variance (Parseval).
    """
    n = trace.n
    if segment_length < 2 or segment_length & (segment_length - 1):
        raise ValueError("segment_length must be a power of two >= 2")
    if segment_length > n:
        raise ValueError("segment_length exceeds trace length")
    if not 0.0 <= overlap < 1.0:
        raise ValueError("overlap must be in [0, 1)")
    w = _window(window, segment_length)
    hop = max(1, int(round(segment_length * (1.0 - overlap))))
    x = trace.values - trace.values.mean()
    n_seg = 1 + (n - segment_length) // hop
    acc = np.zeros(segment_length // 2 + 1)
    for s in range(n_seg):
        seg = x[s * hop : s * hop + segment_length]
        acc += np.abs(np.fft.rfft(w * seg)) ** 2
    scale = 1.0 / (trace.sample_rate * np.sum(w * w))
    psd = acc * (scale / n_seg)
    psd[1:-1] *= 2.0  # single-sided; DC and Nyquist appear once
    freqs = np.fft.rfftfreq(segment_length, d=1.0 / trace.sample_rate)
    return Spectrum(freqs, psd, trace.unit, window, overlap, n_seg)


def rin_spectrum(
    trace: TimeTrace,
    segment_length: int,
    overlap: float = 0.5,
    window: str = "hann",
) -> Spectrum:
    """Relative intensity noise PSD: Welch of I(t)/mean(I) - 1 (unit 1/Hz)."""
    mean = trace.values.mean()
    if mean == 0.0:
        raise ValueError("RIN is undefined for a zero-mean trace")
    relative = TimeTrace(trace.values / mean - 1.0, trace.sample_rate, "1")
    return welch_psd(relative, segment_length, overlap, window)


def _band_slice(spectrum: Spectrum, f_lo: float, f_hi: float) -> slice:
    if not f_hi > f_lo:
        raise ValueError("band requires f_hi > f_lo")
    idx = np.nonzero(
        (spectrum.frequencies >= f_lo) & (spectrum.frequencies <= f_hi)
    )[0]
    if idx.size < 2:
        raise ValueError("band contains fewer than two grid points")
    return slice(int(idx[0]), int(idx[-1]) + 1)


def band_rms(spectrum: Spectrum, f_lo: float, f_hi: float) -> float:
    """sqrt of the trapezoidal PSD integral over [f_lo, f_hi]."""
    sl = _band_slice(spectrum, f_lo, f_hi)
    power = np.trapezoid(spectrum.values[sl], spectrum.frequencies[sl])
    return float(np.sqrt(power))


def snr_db(
    spectrum: Spectrum,
    signal_band: tuple[float, float],
    noise_band: tuple[float, float],
) -> float:
    """Signal-band power over noise power scaled to the signal bandwidth, in dB.

    SNR = P_signal / (noise density * signal bandwidth) with the noise
    density taken as the mean PSD over the (disjoint) noise band.
    """
    if min(signal_band[1], noise_band[1]) > max(signal_band[0], noise_band[0]):
        raise ValueError("signal and noise bands must be disjoint")
    s_sl = _band_slice(spectrum, *signal_band)
    n_sl = _band_slice(spectrum, *noise_band)
    p_signal = np.trapezoid(spectrum.values[s_sl], spectrum.frequencies[s_sl])
    p_noise = np.trapezoid(spectrum.values[n_sl], spectrum.frequencies[n_sl])
    if p_noise <= 0.0:
        raise ValueError("noise band has no power")
    b_signal = signal_band[1] - signal_band[0]
    b_noise = noise_band[1] - noise_band[0]
    return float(10.0 * np.log10(p_signal / (p_noise / b_noise * b_signal)))


def _positive_part(spectrum: Spectrum) -> np.ndarray:
    if np.any(spectrum.values < 0.0):
        raise ValueError("proxy integrals require a non-negative PSD")
    s = spectrum.values.copy()
    s[0] = 0.0  # DC carries the (removed) mean, not fluctuation power
    return s


def tin2_proxies(spectrum: Spectrum) -> tuple[Spectrum, Spectrum]:
    """Second-order mixing proxies (S+, S-) of a PSD, on the input grid.

    S+[k] = df * sum_j S[j] S[k-j]   (sum-frequency products)
    S-[k] = df * sum_j S[j] S[j+k]   (difference-frequency products)
    with the DC bin excluded from every sum.  Units (u^2)^2/Hz.
    """
    s = _positive_part(spectrum)
    df = spectrum.df
    n = s.size
    conv = np.convolve(s, s)
    s_plus = df * conv[:n]
    s_minus = df * np.convolve(s, s[::-1])[n - 1 :]
    unit = f"({spectrum.unit})^2" if spectrum.unit else "^2"
    f = spectrum.frequencies
    return (
        Spectrum(f, s_plus, unit),
        Spectrum(f, s_minus, unit),
    )


def tin3_proxies(spectrum: Spectrum) -> tuple[Spectrum, Spectrum, Spectrum]:
    """Third-order mixing proxies (S++, S+-, S--) of a PSD.

    S++[k] = df^2 * sum_{j1,j2} S[j1] S[j2] S[k-j1-j2]
    S+-[k] = df^2 * sum_{j1,j2} S[j1] S[j2] S[k+j1-j2]
    S--[k] = df^2 * sum_{j1,j2} S[j1] S[j2] S[k+j1+j2]

    DC excluded, indices restricted to the grid.  Implemented through
    iterated np.convolve (direct summation, so results match the explicit
    double sums to rounding).  Units (u^3)^2/Hz.
    """
    s = _positive_part(spectrum)
    df2 = spectrum.df**2
    n = s.size
    c2 = np.convolve(s, s)  # c2[m] = sum_j s[j] s[m-j], length 2n-1
    s_pp = df2 * np.convolve(c2, s)[:n]
    # S+-[k] = sum_j s[j] c2[k+j]: correlate c2 against s
    s_pm = df2 * np.convolve(c2, s[::-1])[n - 1 : n - 1 + n]
    # S--[k] = sum_m c2[m] s[m+k]: correlate s against c2
    s_mm = df2 * np.convolve(s, c2[::-1])[2 * n - 2 : 2 * n - 2 + n]
    unit = f"({spectrum.unit})^3" if spectrum.unit else "^3"
    f = spectrum.frequencies
    return (
        Spectrum(f, s_pp, unit),
        Spectrum(f, s_pm, unit),
        Spectrum(f, s_mm, unit),
    )


def normalize_to_max(spectrum: Spectrum, f_lo: float, f_hi: float) -> Spectrum:
    """Spectrum divided by its maximum inside [f_lo, f_hi] (overlay scaling)."""
    sl = _band_slice(spectrum, f_lo, f_hi)
    peak = spectrum.values[sl].max()
    if peak <= 0.0:
        raise ValueError("normalization span contains no power")
    return Spectrum(
        spectrum.frequencies,
        spectrum.values / peak,
        spectrum.unit,
        spectrum.window,
        spectrum.overlap,
        spectrum.segments,
    )
