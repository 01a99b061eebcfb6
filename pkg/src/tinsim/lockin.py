"""Multi-frequency lock-in demodulation and third-order mixing correlation.

Demodulation convention: a component X cos(2 pi f t) + Y sin(2 pi f t) in
the input yields quadratures (X, Y); equivalently a tone A cos(2 pi f t +
phi) gives X = A cos(phi), Y = -A sin(phi).  For tones at f1, f2, f3 the
third-order mixing product at f4 = f1 + f2 + f3 has quadratures
proportional to

    X4 ~ X1 X2 X3 - X1 Y2 Y3 - X2 Y1 Y3 - X3 Y1 Y2
    Y4 ~ X1 X2 Y3 + X1 X3 Y2 + X2 X3 Y1 - Y1 Y2 Y3

with one common factor beta set by the curvature of the transduction; the
total-least-squares slope of measured against predicted quadratures
estimates beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .trace import TimeTrace


@dataclass(frozen=True)
class QuadratureTrace:
    """Demodulated quadratures at one carrier.

    x, y sampled at sample_rate (after decimation); carrier and bandwidth
    in Hz.  The first 5/bandwidth seconds (filter settling) and the
    trailing 2/bandwidth seconds (edge transient) are still present; use
    settled() to strip them before statistics.
    """

    x: np.ndarray
    y: np.ndarray
    sample_rate: float
    carrier: float
    bandwidth: float
    unit: str = ""

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be 1-D arrays of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size

    def settled(self) -> tuple[np.ndarray, np.ndarray]:
        """Quadratures with filter settling and edge transients removed."""
        lead = math.ceil(5.0 / self.bandwidth * self.sample_rate)
        tail = math.ceil(2.0 / self.bandwidth * self.sample_rate)
        if lead + tail >= self.n:
            raise ValueError("trace shorter than the filter settling time")
        return self.x[lead : self.n - tail], self.y[lead : self.n - tail]


def _lowpass_kernel(sample_rate: float, bandwidth: float) -> np.ndarray:
    """Windowed-sinc FIR lowpass: cutoff = bandwidth, hann window,
    length ceil(4 * fs / bandwidth) forced odd, unit DC gain."""
    length = math.ceil(4.0 * sample_rate / bandwidth)
    if length % 2 == 0:
        length += 1
    m = np.arange(length) - (length - 1) / 2
    h = (2.0 * bandwidth / sample_rate) * np.sinc(2.0 * bandwidth / sample_rate * m)
    h *= np.hanning(length)
    return h / h.sum()


def demodulate(trace: TimeTrace, carrier: float, bandwidth: float) -> QuadratureTrace:
    """Dual-phase lock-in at `carrier` (Hz) with lowpass `bandwidth` (Hz).

    Mixes with 2 cos / 2 sin, applies one identical FIR lowpass to both
    products, then decimates to 8x the bandwidth.
    """
    nyquist = trace.sample_rate / 2.0
    if not 0.0 < bandwidth < carrier < nyquist:
        raise ValueError("need 0 < bandwidth < carrier < sample_rate/2")
    t = trace.times()
    phase = 2.0 * np.pi * carrier * t
    kernel = _lowpass_kernel(trace.sample_rate, bandwidth)
    x = fftconvolve(2.0 * trace.values * np.cos(phase), kernel, mode="same")
    y = fftconvolve(2.0 * trace.values * np.sin(phase), kernel, mode="same")
    decim = max(1, int(trace.sample_rate // (8.0 * bandwidth)))
    return QuadratureTrace(
        x[::decim], y[::decim], trace.sample_rate / decim, carrier, bandwidth, trace.unit
    )


def predict_third_order(
    q1: QuadratureTrace, q2: QuadratureTrace, q3: QuadratureTrace
) -> QuadratureTrace:
    """Predicted sum-frequency quadratures (up to the common mixing factor)."""
    for q in (q2, q3):
        if q.n != q1.n or q.sample_rate != q1.sample_rate:
            raise ValueError("quadrature traces must share one time grid")
        if q.bandwidth != q1.bandwidth:
            raise ValueError("quadrature traces must share one bandwidth")
    x1, y1, x2, y2, x3, y3 = q1.x, q1.y, q2.x, q2.y, q3.x, q3.y
    pred_x = x1 * x2 * x3 - x1 * y2 * y3 - x2 * y1 * y3 - x3 * y1 * y2
    pred_y = x1 * x2 * y3 + x1 * x3 * y2 + x2 * x3 * y1 - y1 * y2 * y3
    return QuadratureTrace(
        pred_x,
        pred_y,
        q1.sample_rate,
        q1.carrier + q2.carrier + q3.carrier,
        q1.bandwidth,
        f"({q1.unit})^3" if q1.unit else "",
    )


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation coefficient; rejects constant inputs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size != b.size or a.size < 3:
        raise ValueError("need two equal-length arrays of at least 3 samples")
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    if denom == 0.0:
        raise ValueError("correlation undefined for a constant input")
    return float(da @ db / denom)


def tls_fit(pred: np.ndarray, meas: np.ndarray) -> tuple[float, float]:
    """Total-least-squares slope of meas against pred, through the origin
    after mean removal.

    The slope is the direction that annihilates the minor eigenvector of
    the 2x2 second-moment matrix (orthogonal distances minimized; both
    axes treated as noisy).  Returns (beta, sigma) with the asymptotic
    sigma_beta = (1 + beta^2) sqrt(l1 l2 / n) / (l1 - l2) from eigenvector
    perturbation of the moment matrix.
    """
    p = np.asarray(pred, dtype=np.float64)
    q = np.asarray(meas, dtype=np.float64)
    if p.size != q.size or p.size < 3:
        raise ValueError("need two equal-length arrays of at least 3 samples")
    p = p - p.mean()
    q = q - q.mean()
    n = p.size
    moment = np.array([[p @ p, p @ q], [p @ q, q @ q]]) / n
    eigvals, eigvecs = np.linalg.eigh(moment)  # ascending
    l_minor, l_major = float(eigvals[0]), float(eigvals[1])
    if l_major == l_minor:
        raise ValueError("degenerate scatter: slope undefined")
    normal = eigvecs[:, 0]
    if normal[1] == 0.0:
        raise ValueError("vertical scatter: slope undefined")
    beta = -normal[0] / normal[1]
    sigma = (1.0 + beta * beta) * math.sqrt(max(l_minor, 0.0) * l_major / n) / (
        l_major - l_minor
    )
    return float(beta), float(sigma)


@dataclass(frozen=True)
class CorrelationReport:
    """TLS slopes and correlations between measured and predicted
    sum-frequency quadratures."""

    beta_x: float
    sigma_x: float
    beta_y: float
    sigma_y: float
    pearson_x: float
    pearson_y: float
    n_samples: int


def third_order_correlation(
    trace: TimeTrace, freqs: tuple[float, float, float, float], bandwidth: float
) -> CorrelationReport:
    """Demodulate at (f1, f2, f3, f4) and correlate the f4 quadratures
    against the third-order prediction from f1..f3.

    freqs must satisfy f4 = f1 + f2 + f3 (within one part in 1e-9).
    """
    f1, f2, f3, f4 = freqs
    if abs((f1 + f2 + f3) - f4) > 1e-9 * f4:
        raise ValueError("f4 must equal f1 + f2 + f3")
    quads = [demodulate(trace, f, bandwidth) for f in (f1, f2, f3, f4)]
    predicted = predict_third_order(*quads[:3])
    pred_x, pred_y = predicted.settled()
    meas_x, meas_y = quads[3].settled()
    beta_x, sigma_x = tls_fit(pred_x, meas_x)
    beta_y, sigma_y = tls_fit(pred_y, meas_y)
    return CorrelationReport(
        beta_x=beta_x,
        sigma_x=sigma_x,
        beta_y=beta_y,
        sigma_y=sigma_y,
        pearson_x=pearson(pred_x, meas_x),
        pearson_y=pearson(pred_y, meas_y),
        n_samples=pred_x.size,
    )
