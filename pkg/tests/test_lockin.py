"""Dual-phase demodulation and third-order quadrature correlation."""

import math

import numpy as np
import pytest

from tinsim import (
    QuadratureTrace,
    TimeTrace,
    demodulate,
    pearson,
    predict_third_order,
    third_order_correlation,
    tls_fit,
)

TWO_PI = 2.0 * math.pi


def _tone(amp, f, phi, fs=1e6, duration=0.04):
    t = np.arange(int(duration * fs)) / fs
    return TimeTrace(amp * np.cos(TWO_PI * f * t + phi), fs, "V")


def _quad(x, y, carrier=1.0, bandwidth=1.0, fs=8.0):
    return QuadratureTrace(np.asarray(x, float), np.asarray(y, float),
                           fs, carrier, bandwidth)


def test_quadrature_sign_convention():
    # A cos(wt + phi) -> X = A cos(phi), Y = -A sin(phi)
    for amp, phi, want in [
        (1.0, 0.0, (1.0, 0.0)),
        (1.0, -math.pi / 2.0, (0.0, 1.0)),  # sin(wt) -> (0, 1)
        (0.7, math.pi / 3.0, (0.35, -0.7 * math.sqrt(3.0) / 2.0)),
    ]:
        q = demodulate(_tone(amp, 5e4, phi), 5e4, 1e3)
        x, y = q.settled()
        assert np.allclose(x, want[0], atol=1e-3)
        assert np.allclose(y, want[1], atol=1e-3)


def test_demodulate_rejects_off_carrier_tone():
    q = demodulate(_tone(1.0, 8e4, 0.0), 5e4, 1e3)
    x, y = q.settled()
    assert np.all(np.hypot(x, y) < 1e-3)


def test_demodulate_tracks_am_envelope():
    fs, f_c, f_mod, bw = 1e6, 1e5, 200.0, 2e3
    t = np.arange(int(0.05 * fs)) / fs
    envelope = 1.0 + 0.5 * np.cos(TWO_PI * f_mod * t)
    trace = TimeTrace(envelope * np.cos(TWO_PI * f_c * t), fs, "V")
    q = demodulate(trace, f_c, bw)
    x, y = q.settled()
    lead = math.ceil(5.0 / bw * q.sample_rate)
    t_settled = (lead + np.arange(x.size)) / q.sample_rate
    want = 1.0 + 0.5 * np.cos(TWO_PI * f_mod * t_settled)
    assert np.allclose(x, want, atol=0.02)
    assert np.all(np.abs(y) < 0.02)


def test_demodulate_validation():
    trace = _tone(1.0, 5e4, 0.0)
    with pytest.raises(ValueError, match="bandwidth < carrier"):
        demodulate(trace, 5e4, 6e4)
    with pytest.raises(ValueError, match="sample_rate"):
        demodulate(trace, 6e5, 1e3)
    short = TimeTrace(np.zeros(64), 1e6, "")
    with pytest.raises(ValueError, match="settling"):
        demodulate(short, 5e4, 1e3).settled()


def test_predict_third_order_reductions():
    rng = np.random.default_rng(8)
    n = 32
    xs = rng.standard_normal((3, n))
    ys = rng.standard_normal((3, n))
    cos_only = predict_third_order(
        *(_quad(xs[i], np.zeros(n), carrier=float(i + 1)) for i in range(3))
    )
    assert np.allclose(cos_only.x, xs[0] * xs[1] * xs[2])
    assert np.all(cos_only.y == 0.0)
    assert cos_only.carrier == 6.0
    sin_only = predict_third_order(
        *(_quad(np.zeros(n), ys[i], carrier=float(i + 1)) for i in range(3))
    )
    assert np.all(sin_only.x == 0.0)
    assert np.allclose(sin_only.y, -ys[0] * ys[1] * ys[2])


def test_predict_third_order_sums_phases():
    # constant tones a_i, phi_i must combine to (a1 a2 a3) at phi1+phi2+phi3
    amps = (0.5, 1.2, 0.8)
    phis = (0.3, -1.1, 2.0)
    quads = [
        _quad(np.full(16, a * math.cos(p)), np.full(16, -a * math.sin(p)))
        for a, p in zip(amps, phis)
    ]
    pred = predict_third_order(*quads)
    a_prod = amps[0] * amps[1] * amps[2]
    phi_sum = sum(phis)
    assert np.allclose(pred.x, a_prod * math.cos(phi_sum), rtol=1e-12)
    assert np.allclose(pred.y, -a_prod * math.sin(phi_sum), rtol=1e-12)


def test_predict_third_order_validation():
    a = _quad(np.zeros(8), np.zeros(8))
    with pytest.raises(ValueError, match="time grid"):
        predict_third_order(a, _quad(np.zeros(9), np.zeros(9)), a)
    with pytest.raises(ValueError, match="bandwidth"):
        predict_third_order(a, _quad(np.zeros(8), np.zeros(8), bandwidth=2.0), a)


def test_pearson():
    rng = np.random.default_rng(1)
    a = rng.standard_normal(500)
    assert pearson(a, 2.0 * a + 1.0) == pytest.approx(1.0)
    assert pearson(a, -3.0 * a) == pytest.approx(-1.0)
    assert abs(pearson(a, rng.standard_normal(500))) < 0.15
    with pytest.raises(ValueError, match="constant"):
        pearson(a, np.zeros(500))
    with pytest.raises(ValueError, match="equal-length"):
        pearson(a, a[:-1])


def test_tls_fit_exact_and_noisy():
    rng = np.random.default_rng(17)
    p = rng.standard_normal(4000)
    beta, sigma = tls_fit(p, 2.0 * p)
    assert beta == pytest.approx(2.0, rel=1e-9)
    assert sigma == pytest.approx(0.0, abs=1e-6)

    # equal noise on both axes: the symmetric case TLS is built for
    noisy_p = p + 0.1 * rng.standard_normal(p.size)
    noisy_m = -p + 0.1 * rng.standard_normal(p.size)
    beta, sigma = tls_fit(noisy_p, noisy_m)
    assert 0.0 < sigma < 0.02
    assert beta == pytest.approx(-1.0, abs=3.0 * sigma)


def test_tls_fit_degenerate_inputs():
    with pytest.raises(ValueError, match="degenerate"):
        tls_fit(np.zeros(10), np.zeros(10))
    varying = np.linspace(-1.0, 1.0, 10)
    with pytest.raises(ValueError, match="vertical"):
        tls_fit(np.zeros(10), varying)
    with pytest.raises(ValueError, match="equal-length"):
        tls_fit(varying, varying[:-1])


def test_third_order_correlation_on_cubic_record():
    # I = d + lam d^3 with three slowly drifting tones: the f1+f2+f3
    # product carries quadratures 1.5*lam times the predicted triple
    # products.  The drift (well inside the demod bandwidth) is what
    # gives the regression its scatter.
    fs = 8.192e6
    lam = -0.5
    amps = (0.03, 0.025, 0.02)
    phis = (0.3, -1.1, 2.0)
    drift = (37.0, 53.0, 71.0)
    freqs = (103e3, 296e3, 652e3)
    t = np.arange(int(0.15 * fs)) / fs
    d = sum(
        a * (1.0 + 0.3 * np.cos(TWO_PI * fd * t))
        * np.cos(TWO_PI * f * t + p + 0.4 * np.sin(TWO_PI * 0.7 * fd * t))
        for a, f, p, fd in zip(amps, freqs, phis, drift)
    )
    trace = TimeTrace(d + lam * d**3, fs, "nu")
    report = third_order_correlation(trace, (*freqs, 1051e3), 2e3)
    assert report.beta_x == pytest.approx(1.5 * lam, rel=0.02)
    assert report.beta_y == pytest.approx(1.5 * lam, rel=0.02)
    assert report.pearson_x < -0.99 and report.pearson_y < -0.99
    assert report.n_samples > 1000


def test_third_order_correlation_validation():
    trace = TimeTrace(np.zeros(1 << 14), 1e6, "")
    with pytest.raises(ValueError, match="f1 \\+ f2 \\+ f3"):
        third_order_correlation(trace, (1e4, 2e4, 3e4, 7e4), 1e3)
