"""Cavity transduction of detuning fluctuations and its inversion.

The cavity turns a relative detuning trace nu(t) = 2*Delta(t)/kappa into a
transmitted photocurrent through the Lorentzian response |L(nu)|^2 =
1/(1+nu^2).  Readout operations estimate nu(t) back from the photocurrent:
either linearized around the operating point (first-order expansion, the
conventional route) or by exact inversion of the Lorentzian (immune to the
intermodulation products the expansion creates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import hbar, k_B
from .streams import shot_stream
from .trace import TimeTrace

# Detuning that nulls the second-order term of the response expansion
# (d^2|L|^2/dnu^2 = 0 at nu = -1/sqrt(3); third-order term vanishes at +-1).
MAGIC_DETUNING = -1.0 / math.sqrt(3.0)

# Calibration ratios at or below this floor have no finite preimage and are
# clipped before inversion (only reachable under pathological noise).
_RATIO_FLOOR = 1e-12


@dataclass(frozen=True)
class DetectorParams:
    """Transmission detection chain.

    i_max is the mean photocurrent at resonance (nu = 0), i_bg the
    background level far off resonance; both in the same (arbitrary)
    units.  photon_flux is the detected flux at resonance in photons/s and
    sets the shot-noise level: the relative-intensity PSD of the added
    white noise at nu = 0 is 2/photon_flux (single-sided, 1/Hz).
    """

    i_max: float
    i_bg: float = 0.0
    photon_flux: float = 0.0
    shot_noise: bool = False

    def __post_init__(self):
        if not self.i_max > self.i_bg:
            raise ValueError("i_max must exceed i_bg")
        if self.shot_noise and not self.photon_flux > 0.0:
            raise ValueError("shot noise requires photon_flux > 0")


@dataclass(frozen=True)
class ReadoutResult:
    """Estimated detuning trace plus inversion diagnostics."""

    detuning_estimate: TimeTrace
    clamp_count: int
    method: str

    @property
    def clamp_fraction(self) -> float:
        return self.clamp_count / self.detuning_estimate.n


@dataclass(frozen=True)
class FiguresOfMerit:
    cooperativity: float
    single_photon_cooperativity: float
    n_th: float
    s_qba: float
    s_th: float
    n_sideband_limit: float


def lorentzian_response(nu):
    """Cavity intensity response |L(nu)|^2 = 1/(1 + nu^2)."""
    nu = np.asarray(nu, dtype=np.float64)
    out = 1.0 / (1.0 + nu * nu)
    return out if out.ndim else float(out)


def response_slope(nu):
    """d|L|^2/dnu = -2 nu / (1 + nu^2)^2."""
    nu = np.asarray(nu, dtype=np.float64)
    out = -2.0 * nu / (1.0 + nu * nu) ** 2
    return out if out.ndim else float(out)


def phase_response(nu, phi0: float = 0.0):
    """Transmitted phase phi0 + arctan(nu)."""
    nu = np.asarray(nu, dtype=np.float64)
    out = phi0 + np.arctan(nu)
    return out if out.ndim else float(out)


def zero_point_motion(m_eff: float, omega_m: float) -> float:
    """Zero-point displacement sqrt(hbar / (2 m_eff omega_m)); omega_m in rad/s."""
    if not (m_eff > 0.0 and omega_m > 0.0):
        raise ValueError("m_eff and omega_m must be positive")
    return math.sqrt(hbar / (2.0 * m_eff * omega_m))


def transduce(detuning: TimeTrace, detector: DetectorParams, seed: int = 0) -> TimeTrace:
    """Transmitted photocurrent for a detuning trace.

    I(t) = i_bg + (i_max - i_bg) |L(nu(t))|^2, plus (optional) additive
    white Gaussian shot noise.  The noise level is set once at the nu = 0
    operating point (sigma = i_max sqrt(fs/photon_flux), i.e. relative
    intensity PSD 2/photon_flux) and held constant along the trace.
    """
    span = detector.i_max - detector.i_bg
    current = detector.i_bg + span * lorentzian_response(detuning.values)
    if detector.shot_noise:
        sigma = detector.i_max * math.sqrt(detuning.sample_rate / detector.photon_flux)
        current = current + sigma * shot_stream(seed).standard_normal(detuning.n)
    return TimeTrace(current, detuning.sample_rate, "V")


def _calibration_ratio(photocurrent: TimeTrace, i_max: float, i_bg: float) -> np.ndarray:
    if not i_max > i_bg:
        raise ValueError("i_max must exceed i_bg")
    return (photocurrent.values - i_bg) / (i_max - i_bg)


def linear_readout(
    photocurrent: TimeTrace, nu0: float, i_max: float, i_bg: float = 0.0
) -> ReadoutResult:
    """First-order detuning estimate around the operating point nu0.

    delta_nu = (n_c/n_c0 - |L(nu0)|^2) / (d|L|^2/dnu at nu0); the returned
    trace is nu0 + delta_nu.  Singular at nu0 = 0 where the slope vanishes.
    """
    slope = response_slope(nu0)
    if slope == 0.0:
        raise ValueError("linear readout is singular at nu0 = 0 (zero slope)")
    ratio = _calibration_ratio(photocurrent, i_max, i_bg)
    estimate = nu0 + (ratio - lorentzian_response(nu0)) / slope
    return ReadoutResult(
        TimeTrace(estimate, photocurrent.sample_rate, "nu"), 0, "linear"
    )


def _invert_ratio(ratio: np.ndarray) -> tuple[np.ndarray, int]:
    clamp_count = int(np.count_nonzero(ratio > 1.0))
    clipped = np.clip(ratio, _RATIO_FLOOR, 1.0)
    return np.sqrt(1.0 / clipped - 1.0), clamp_count


def nonlinear_readout(
    photocurrent: TimeTrace, nu0: float, i_max: float, i_bg: float = 0.0
) -> ReadoutResult:
    """Exact Lorentzian inversion nu = sign(nu0) sqrt(n_c0/n_c - 1).

    Valid while the detuning stays on one side of resonance (sign fixed by
    the operating point).  Calibration ratios above 1 have no preimage:
    they clamp to nu = 0 and are counted in clamp_count.
    """
    if nu0 == 0.0:
        raise ValueError("nonlinear readout needs a one-sided operating point (nu0 != 0)")
    ratio = _calibration_ratio(photocurrent, i_max, i_bg)
    magnitude, clamp_count = _invert_ratio(ratio)
    estimate = math.copysign(1.0, nu0) * magnitude
    return ReadoutResult(
        TimeTrace(estimate, photocurrent.sample_rate, "nu"), clamp_count, "nonlinear"
    )


def general_dyne_readout(
    photocurrent: TimeTrace,
    phase_sign: TimeTrace,
    i_max: float,
    i_bg: float = 0.0,
) -> ReadoutResult:
    """Lorentzian inversion with a per-sample sign from a phase measurement.

    phase_sign supplies sign(nu(t)) sample by sample (+1/-1), lifting the
    one-sidedness restriction of nonlinear_readout.
    """
    signs = phase_sign.values
    if signs.size != photocurrent.n:
        raise ValueError("phase_sign length must match the photocurrent")
    if not np.all(np.abs(signs) == 1.0):
        raise ValueError("phase_sign samples must be +1 or -1")
    ratio = _calibration_ratio(photocurrent, i_max, i_bg)
    magnitude, clamp_count = _invert_ratio(ratio)
    return ReadoutResult(
        TimeTrace(signs * magnitude, photocurrent.sample_rate, "nu"),
        clamp_count,
        "general-dyne",
    )


def detuning_to_displacement(
    detuning: TimeTrace, g0: float, kappa: float, m_eff: float, omega_m: float
) -> TimeTrace:
    """Calibrated displacement y(t) = -kappa x_zp nu(t) / (2 g0); rad/s inputs."""
    if not (g0 > 0.0 and kappa > 0.0):
        raise ValueError("g0 and kappa must be positive")
    x_zp = zero_point_motion(m_eff, omega_m)
    scale = -kappa * x_zp / (2.0 * g0)
    return TimeTrace(scale * detuning.values, detuning.sample_rate, "m")


def figures_of_merit(
    *,
    omega_m: float,
    gamma_m: float,
    g0: float,
    m_eff: float,
    kappa: float,
    n_c_bar: float,
    temperature: float,
) -> FiguresOfMerit:
    """Measurement figures of merit for one mode; all rates in rad/s.

    C = 4 g0^2 n_c_bar / (kappa gamma_m);  C0 = C / n_c_bar;
    n_th = k_B T / (hbar omega_m)  (high-temperature occupancy);
    s_qba = 8 hbar^2 g0^2 n_c_bar / (x_zp^2 kappa)   (resonant backaction);
    s_th = 2 hbar^2 gamma_m n_th / x_zp^2            (resonant thermal force);
    n_sideband_limit = kappa / (4 omega_m)           (bad-cavity imprecision
    floor in quanta).  These satisfy s_qba/s_th = C/n_th identically.
    """
    if min(omega_m, gamma_m, g0, m_eff, kappa) <= 0.0:
        raise ValueError("omega_m, gamma_m, g0, m_eff, kappa must be positive")
    if n_c_bar < 0.0 or temperature < 0.0:
        raise ValueError("n_c_bar and temperature must be non-negative")
    x_zp2 = hbar / (2.0 * m_eff * omega_m)
    c0 = 4.0 * g0 * g0 / (kappa * gamma_m)
    n_th = k_B * temperature / (hbar * omega_m)
    return FiguresOfMerit(
        cooperativity=c0 * n_c_bar,
        single_photon_cooperativity=c0,
        n_th=n_th,
        s_qba=8.0 * hbar**2 * g0 * g0 * n_c_bar / (x_zp2 * kappa),
        s_th=2.0 * hbar**2 * gamma_m * n_th / x_zp2,
        n_sideband_limit=kappa / (4.0 * omega_m),
    )
