"""Characterization fits: optical spring, ringdown, modulated scans, g0,
and the direct-detection noise model.

All nonlinear fits run on the shared damped Gauss-Newton solver
(optimize.least_squares); uncertainties are the residual-scaled Jacobian
sigmas.  Rates are rad/s at this interface unless a name says Hz.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import hbar, k_B
from .dynamics import spring_frequency
from .optimize import least_squares
from .spectral import Spectrum
from .trace import TimeTrace
from .transduction import zero_point_motion

_RAYLEIGH_CV = math.sqrt(4.0 / math.pi - 1.0)  # std/mean of a Rayleigh variable


@dataclass(frozen=True)
class FitResult:
    """Named parameters, their sigmas, and solver diagnostics."""

    params: dict[str, float]
    sigmas: dict[str, float]
    residual_norm: float
    converged: bool
    n_iter: int


def _result(names, lm) -> FitResult:
    return FitResult(
        params={k: float(v) for k, v in zip(names, lm.params)},
        sigmas={k: float(v) for k, v in zip(names, lm.sigmas)},
        residual_norm=lm.residual_norm,
        converged=lm.converged,
        n_iter=lm.n_iter,
    )


# ---------------------------------------------------------------- optical spring


@dataclass(frozen=True)
class SpringPoint:
    """One operating point of a detuning sweep at constant intracavity
    photon number: input power relative to the first point, measured
    effective frequency (rad/s), and its uncertainty (rad/s)."""

    power_ratio: float
    omega_eff: float
    sigma: float

    def __post_init__(self):
        if self.power_ratio <= 0.0 or self.sigma <= 0.0:
            raise ValueError("power_ratio and sigma must be positive")


def spring_detunings(nu_1: float, power_ratios: np.ndarray) -> np.ndarray:
    """Detunings along a constant-photon-number sweep:
    nu_i = sign(nu_1) sqrt((1 + nu_1^2) P_i/P_1 - 1).

    The extrapolation identity (1 + nu_i^2)/(1 + nu_1^2) = P_i/P_1 holds by
    construction.  Arguments below zero are clipped to nu_i = 0 (they mean
    the candidate nu_1 is inconsistent with the ratios).
    """
    arg = (1.0 + nu_1 * nu_1) * np.asarray(power_ratios, dtype=np.float64) - 1.0
    return math.copysign(1.0, nu_1) * np.sqrt(np.maximum(arg, 0.0))


def fit_optical_spring(
    series: list[SpringPoint],
    gamma_m: float,
    omega_m_guess: float,
    fix_omega_m: bool = False,
) -> FitResult:
    """Fit (C, nu_1[, omega_m]) to effective frequencies along a detuning
    sweep at constant intracavity photon number.

    Model: omega_eff,i = omega_m + gamma_m C nu_i/(1 + nu_i^2) with nu_i
    tied to the power ratios through spring_detunings.  Multi-starts over
    nu_1 candidates on both sides of resonance; best residual wins.
    Raises if the best-fit nu_1 leaves any extrapolation argument
    negative.
    """
    if len(series) < 3:
        raise ValueError("need at least three sweep points")
    if gamma_m <= 0.0 or omega_m_guess <= 0.0:
        raise ValueError("gamma_m and omega_m_guess must be positive")
    ratios = np.array([p.power_ratio for p in series])
    omega = np.array([p.omega_eff for p in series])
    sig = np.array([p.sigma for p in series])

    def residual(p):
        c, nu_1 = p[0], p[1]
        om = p[2] if not fix_omega_m else omega_m_guess
        nu = spring_detunings(nu_1, ratios)
        return (om + gamma_m * c * nu / (1.0 + nu * nu) - omega) / sig

    best = None
    for nu_start in (-0.3, -0.8, -1.5, 0.3, 0.8, 1.5):
        nu = spring_detunings(nu_start, ratios)
        basis = gamma_m * nu / (1.0 + nu * nu)
        w = 1.0 / sig**2
        denom = float(w @ (basis * basis))
        c0 = float(w @ (basis * (omega - omega_m_guess))) / denom if denom > 0 else 1.0
        p0 = [c0, nu_start] if fix_omega_m else [c0, nu_start, omega_m_guess]
        scale = [max(abs(c0), 1.0), 1.0] + ([] if fix_omega_m else [omega_m_guess])
        lm = least_squares(residual, p0, x_scale=scale)
        if best is None or lm.residual_norm < best.residual_norm:
            best = lm
    nu_1 = best.params[1]
    if np.any((1.0 + nu_1 * nu_1) * ratios - 1.0 < 0.0):
        raise ValueError("power ratios inconsistent with fitted nu_1 (negative extrapolation argument)")
    names = ["cooperativity", "nu_1"] + ([] if fix_omega_m else ["omega_m"])
    out = _result(names, best)
    if out.params["cooperativity"] < 0.0:
        # (C, nu_1) -> (-C, -nu_1) leaves the model invariant; report C >= 0
        out.params["cooperativity"] = -out.params["cooperativity"]
        out.params["nu_1"] = -out.params["nu_1"]
    if fix_omega_m:
        out.params["omega_m"] = omega_m_guess
        out.sigmas["omega_m"] = 0.0
    return out


# -------------------------------------------------------------------- ringdown


def fit_ringdown(energy: TimeTrace, omega_m: float | None = None) -> FitResult:
    """Fit gamma_m, beta_nl, E0, offset to an energy ringdown.

    Model: E(t) = gamma E0 / ((gamma + beta E0) e^(gamma t) - beta E0) +
    offset.  When omega_m (rad/s) is given, the result also carries
    quality = omega_m/gamma_m with its propagated sigma.
    """
    t = energy.times()
    e = energy.values
    n = e.size
    if n < 8:
        raise ValueError("ringdown trace too short")
    head = e[: max(2, n // 4)].mean()
    tail = e[-max(2, n // 4) :].mean()
    if not head > tail:
        raise ValueError("trace does not decay")
    offset0 = tail
    e00 = max(e[0] - offset0, (head - tail) * 1e-3)
    # crossing of (E - offset) below E0/e gives a first gamma scale
    below = np.nonzero(e - offset0 < e00 / math.e)[0]
    t_e = t[below[0]] if below.size else t[-1]
    gamma0 = 1.0 / max(t_e, t[1])

    def residual(p):
        gamma, beta, e0, off = p
        b = beta * e0
        growth = np.exp(np.minimum(gamma * t, 700.0))
        return gamma * e0 / ((gamma + b) * growth - b) + off - e

    scale = [gamma0, gamma0 / e00, e00, max(abs(offset0), 1e-3 * e00)]
    lm = least_squares(residual, [gamma0, 0.0, e00, offset0], x_scale=scale)
    out = _result(["gamma_m", "beta_nl", "e0", "offset"], lm)
    if omega_m is not None:
        gamma = out.params["gamma_m"]
        out.params["quality"] = omega_m / gamma
        out.sigmas["quality"] = omega_m * out.sigmas["gamma_m"] / gamma**2
    return out


# -------------------------------------------------------------- modulated scan


def _scan_model(t, p, scan_rate, n_modes):
    kappa, nu_offset, i_max, i_bg = p[0], p[1], p[2], p[3]
    nu = nu_offset + (4.0 * math.pi * scan_rate / kappa) * t
    for j in range(n_modes):
        alpha, omega, phi = p[4 + 3 * j : 7 + 3 * j]
        nu = nu + alpha * np.cos(omega * t + phi)
    return i_bg + (i_max - i_bg) / (1.0 + nu * nu)


def fit_scan(transmission: TimeTrace, scan_rate: float, n_modes: int) -> FitResult:
    """Fit a laser-scan transmission trace crossed by thermal modulations.

    Model: T(t) = i_bg + (i_max - i_bg) / (1 + [nu(t) + sum_j alpha_j
    cos(omega_j t + phi_j)]^2) with nu(t) a linear ramp at
    4 pi scan_rate / kappa per second (scan_rate in Hz of optical
    frequency per second).  Modulation frequencies are seeded from the
    residual spectrum of a plain-Lorentzian fit; phases multi-start on 8
    values per mode (all combinations), lowest residual wins.  Each
    fitted alpha_j is the modulation depth in detuning units.
    """
    if scan_rate <= 0.0:
        raise ValueError("scan_rate must be positive")
    if not 0 <= n_modes <= 3:
        raise ValueError("n_modes must be between 0 and 3")
    t = transmission.times()
    i = transmission.values
    n = i.size
    if n < 64:
        raise ValueError("scan trace too short")

    peak_idx = int(np.argmax(i))
    if peak_idx < n // 50 or peak_idx > n - n // 50 - 1:
        raise ValueError("resonance transit not inside the scan")
    i_bg0 = float(np.percentile(i, 5.0))
    i_max0 = float(i[peak_idx])
    half = 0.5 * (i_max0 + i_bg0)
    above = np.nonzero(i > half)[0]
    width_s = t[above[-1]] - t[above[0]]
    if width_s <= 0.0:
        raise ValueError("could not measure a transit width")
    kappa0 = 2.0 * math.pi * scan_rate * width_s
    nu_offset0 = -(4.0 * math.pi * scan_rate / kappa0) * t[peak_idx]

    base_scale = [kappa0, max(abs(nu_offset0), 1.0), i_max0, max(abs(i_bg0), 0.01 * i_max0)]
    base = least_squares(
        lambda p: _scan_model(t, p, scan_rate, 0) - i,
        [kappa0, nu_offset0, i_max0, i_bg0],
        x_scale=base_scale,
    )
    names = ["kappa", "nu_offset", "i_max", "i_bg"]
    if n_modes == 0:
        return _result(names, base)

    # modulation frequencies from the residual spectrum of the base fit
    resid = _scan_model(t, base.params, scan_rate, 0) - i
    w = np.hanning(n)
    mag = np.abs(np.fft.rfft(resid * w))
    freqs = np.fft.rfftfreq(n, d=1.0 / transmission.sample_rate)
    mag[: max(3, int(2.0 / transmission.duration / (freqs[1])))] = 0.0
    omega_inits = []
    for _ in range(n_modes):
        j = int(np.argmax(mag))
        if mag[j] == 0.0:
            raise ValueError("fewer modulation peaks than n_modes in the residual")
        omega_inits.append(2.0 * math.pi * freqs[j])
        lo, hi = max(0, j - 3), min(mag.size, j + 4)
        mag[lo:hi] = 0.0
    transit = base.params[0] / (2.0 * math.pi * scan_rate)
    for om in omega_inits:
        if 2.0 * math.pi / om > transit:
            warnings.warn(
                "modulation period exceeds the transit time through the linewidth; "
                "alpha and phi are weakly constrained",
                stacklevel=2,
            )
    span = i_max0 - i_bg0
    alpha0 = float(np.clip(np.max(np.abs(resid)) / (0.6495 * span), 0.02, 2.0))

    phase_grid = [2.0 * math.pi * k / 8.0 for k in range(8)]
    best = None
    mode_names = []
    for j in range(n_modes):
        mode_names += [f"alpha_{j+1}", f"omega_{j+1}", f"phi_{j+1}"]
    phase_sets = [[]]
    for _ in range(n_modes):
        phase_sets = [ps + [ph] for ps in phase_sets for ph in phase_grid]
    for phases in phase_sets:
        p0 = list(base.params)
        scale = list(base_scale)
        for j in range(n_modes):
            p0 += [alpha0, omega_inits[j], phases[j]]
            scale += [max(alpha0, 0.1), omega_inits[j], math.pi]
        lm = least_squares(
            lambda p: _scan_model(t, p, scan_rate, n_modes) - i, p0, x_scale=scale
        )
        if best is None or lm.residual_norm < best.residual_norm:
            best = lm
    out_names = names + mode_names
    result = _result(out_names, best)
    # canonical form: positive frequency and depth, phase folded to match
    for j in range(n_modes):
        a_key, o_key, p_key = f"alpha_{j+1}", f"omega_{j+1}", f"phi_{j+1}"
        if result.params[o_key] < 0.0:
            result.params[o_key] = -result.params[o_key]
            result.params[p_key] = -result.params[p_key]
        if result.params[a_key] < 0.0:
            result.params[a_key] = -result.params[a_key]
            result.params[p_key] += math.pi
        result.params[p_key] = math.remainder(result.params[p_key], 2.0 * math.pi)
    return result


# -------------------------------------------------------------------------- g0


def estimate_g0(alpha_samples, kappa: float, n_th: float) -> tuple[float, float]:
    """Vacuum coupling rate from per-scan modulation depths.

    For thermal motion the depth alpha is Rayleigh distributed with mean
    <alpha> = 2 g0 sqrt(pi n_th) / kappa, so g0 = kappa <alpha> /
    (2 sqrt(pi n_th)); the returned sigma propagates the Rayleigh standard
    error of the mean (std/mean = sqrt(4/pi - 1)).
    """
    a = np.asarray(alpha_samples, dtype=np.float64)
    if a.size < 2:
        raise ValueError("need at least two modulation-depth samples")
    if np.any(a <= 0.0):
        raise ValueError("modulation depths must be positive")
    if kappa <= 0.0 or n_th <= 0.0:
        raise ValueError("kappa and n_th must be positive")
    mean = float(a.mean())
    g0 = kappa * mean / (2.0 * math.sqrt(math.pi * n_th))
    sigma = g0 * _RAYLEIGH_CV / math.sqrt(a.size)
    return g0, sigma


# ------------------------------------------------------------------- noise model


@dataclass(frozen=True)
class ModelPsdParams:
    """Inputs of the direct-detection noise model (all rates rad/s, SI).

    s_delta: double-sided PSD of classical detuning (laser frequency)
    noise in (rad/s)^2/Hz; thermal_force_psd: double-sided Langevin force
    PSD in N^2/Hz (2 m gamma_m k_B T for a thermal bath); kappa_t: output
    coupling rate; eta_det: detection efficiency.
    """

    omega_m: float
    gamma_m: float
    m_eff: float
    g0: float
    kappa: float
    kappa_t: float
    detuning: float
    n_c: float
    s_delta: float = 0.0
    thermal_force_psd: float = 0.0
    eta_det: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.kappa_t <= self.kappa:
            raise ValueError("need 0 < kappa_t <= kappa")
        if not 0.0 < self.eta_det <= 1.0:
            raise ValueError("need 0 < eta_det <= 1")
        if self.n_c < 0.0 or self.s_delta < 0.0 or self.thermal_force_psd < 0.0:
            raise ValueError("n_c, s_delta, thermal_force_psd must be non-negative")


def thermal_force_psd(m_eff: float, gamma_m: float, temperature: float) -> float:
    """Double-sided thermal Langevin force PSD 2 m_eff gamma_m k_B T (N^2/Hz)."""
    return 2.0 * m_eff * gamma_m * k_B * temperature


def _amplitude_quadrature_psd(p: ModelPsdParams, omega: np.ndarray) -> np.ndarray:
    """Double-sided PSD of the detected amplitude quadrature at +omega."""
    chi_c = 1.0 / (p.kappa / 2.0 - 1j * p.detuning - 1j * omega)
    chi_c_m = np.conj(1.0 / (p.kappa / 2.0 - 1j * p.detuning + 1j * omega))
    chi_x = 1j * (chi_c - chi_c_m) / math.sqrt(2.0)
    chi_m = 1.0 / (p.m_eff * (p.omega_m**2 - omega**2 - 1j * omega * p.gamma_m))
    g = p.g0 / zero_point_motion(p.m_eff, p.omega_m)
    loop = 1.0 - hbar * g * g * p.n_c * math.sqrt(2.0) * chi_x * chi_m
    inv2 = 1.0 / np.abs(loop) ** 2
    bracket = (
        np.abs(chi_x) ** 2 * p.n_c * p.s_delta
        + g * g * p.n_c * np.abs(chi_x * chi_m) ** 2 * p.thermal_force_psd
        + (p.kappa - p.kappa_t) / 2.0 * np.abs(chi_c_m) ** 2
    )
    # shot-noise interference term; (1/2)|1 - kappa_t chi/loop|^2 keeps the
    # decoupled lossless cavity exactly at the vacuum level for every omega
    reflection = (
        np.abs(1.0 / math.sqrt(2.0) - (p.kappa_t / math.sqrt(2.0)) * chi_c_m / loop)
        ** 2
    )
    return p.kappa_t * inv2 * bracket + reflection


def model_psd(params: ModelPsdParams, omega: np.ndarray) -> Spectrum:
    """Direct-detection noise spectrum in shot-noise units.

    omega is a uniform grid of analysis frequencies (rad/s) starting at 0.
    The detected double-sided quadrature PSD is evaluated at +-omega,
    symmetrized, and referenced to shot noise:
    S_SNU = 1 - eta_det + 2 eta_det S_sym.  Tends to 1 SNU far outside the
    cavity response.
    """
    omega = np.asarray(omega, dtype=np.float64)
    sym = 0.5 * (
        _amplitude_quadrature_psd(params, omega)
        + _amplitude_quadrature_psd(params, -omega)
    )
    snu = (1.0 - params.eta_det) + 2.0 * params.eta_det * sym
    return Spectrum(omega / (2.0 * math.pi), snu, "SNU")


# ------------------------------------------------------------------ peak finding


def fit_lorentzian_peak(spectrum: Spectrum, band: tuple[float, float]) -> FitResult:
    """Fit A hw^2/((f-f0)^2 + hw^2) + floor around the tallest peak in band.

    With two peaks in the band the taller one is fitted.  Raises when no
    bin exceeds the band median by 6 dB.
    """
    f_lo, f_hi = band
    mask = (spectrum.frequencies >= f_lo) & (spectrum.frequencies <= f_hi)
    if np.count_nonzero(mask) < 5:
        raise ValueError("band contains fewer than five bins")
    f = spectrum.frequencies[mask]
    v = spectrum.values[mask]
    floor = float(np.median(v))
    j = int(np.argmax(v))
    if v[j] < floor * 10.0**0.6:
        raise ValueError("no peak above the band median + 6 dB")
    df = spectrum.df
    half = floor + 0.5 * (v[j] - floor)
    left = j
    while left > 0 and v[left] > half:
        left -= 1
    right = j
    while right < v.size - 1 and v[right] > half:
        right += 1
    hw0 = max(0.5 * (f[right] - f[left]), df)
    window = (f >= f[j] - 8.0 * hw0) & (f <= f[j] + 8.0 * hw0)
    fw, vw = f[window], v[window]

    def residual(p):
        f0, hw, amp, c = p
        return amp * hw * hw / ((fw - f0) ** 2 + hw * hw) + c - vw

    p0 = [float(f[j]), hw0, float(v[j] - floor), floor]
    scale = [max(abs(f[j]), df), hw0, max(v[j] - floor, 1e-300), max(floor, (v[j] - floor) * 1e-6)]
    lm = least_squares(residual, p0, x_scale=scale)
    return _result(["f_peak", "hwhm", "amplitude", "floor"], lm)


def peak_frequency(spectrum: Spectrum, band: tuple[float, float]) -> tuple[float, float]:
    """Peak frequency in band and its uncertainty (Hz), by Lorentzian fit."""
    res = fit_lorentzian_peak(spectrum, band)
    return res.params["f_peak"], res.sigmas["f_peak"]
