"""Stochastic multimode mechanics coupled dispersively to one cavity.

Each mechanical mode is evolved as a complex rotating amplitude a_k(t) with
x_k = Re(a_k): per step the exact Ornstein-Uhlenbeck update

    a <- a * exp((i*omega_m - gamma_m/2) dt) + xi,   xi ~ CN(0, ...)

with the complex Gaussian increment sized so the stationary displacement
variance is k_B T / (m_eff omega_m^2) at any step size.  State-dependent
substeps -- the adiabatic intracavity force (radiation pressure) and
amplitude-dependent (Duffing) energy damping dE/dt = -(gamma_m + beta_nl E) E
-- are split to first order in dt; the step size is validated against
0.05 / max(gamma_m C, gamma_m + beta_nl E_th).  The Duffing frequency pull is
not modelled, only the damping term.

The instantaneous detuning is nu(t) = nu0 - sum_k (2 G_k / kappa) x_k(t)
(+ classical detuning noise), with G_k = g0_k / x_zp_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import evolve_modes
from .constants import hbar, k_B
from .streams import detuning_noise_stream, mode_stream
from .trace import TimeTrace
from .transduction import lorentzian_response, zero_point_motion


@dataclass(frozen=True)
class ModeParams:
    """One mechanical mode; rates in rad/s, SI otherwise.

    beta_nl is the amplitude-dependent damping coefficient in the energy
    decay law dE/dt = -(gamma_m + beta_nl E) E, units 1/(J s).
    """

    omega_m: float
    gamma_m: float
    m_eff: float
    g0: float
    beta_nl: float = 0.0
    label: str = ""

    def __post_init__(self):
        if min(self.omega_m, self.gamma_m, self.m_eff, self.g0) <= 0.0:
            raise ValueError("omega_m, gamma_m, m_eff, g0 must be positive")
        if self.beta_nl < 0.0:
            raise ValueError("beta_nl must be non-negative")

    @property
    def quality(self) -> float:
        return self.omega_m / self.gamma_m

    @property
    def x_zp(self) -> float:
        return zero_point_motion(self.m_eff, self.omega_m)


@dataclass(frozen=True)
class CavityParams:
    """Cavity linewidth kappa (rad/s), operating detuning nu0 = 2*Delta/kappa,
    resonant intracavity photon number n_c0, and detection phase offset."""

    kappa: float
    nu0: float
    n_c0: float = 0.0
    phi0: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if self.n_c0 < 0.0:
            raise ValueError("n_c0 must be non-negative")

    @property
    def n_c_bar(self) -> float:
        """Mean intracavity photon number at the operating detuning."""
        return self.n_c0 * lorentzian_response(self.nu0)


@dataclass(frozen=True)
class BathParams:
    """Thermal environment, random seed, and classical detuning noise.

    classical_detuning_noise_psd is the single-sided PSD (1/Hz) of white
    Gaussian noise added to nu(t); it also drives the intracavity force
    when radiation pressure is enabled.
    """

    temperature: float
    seed: int = 0
    classical_detuning_noise_psd: float = 0.0

    def __post_init__(self):
        if self.temperature < 0.0:
            raise ValueError("temperature must be non-negative")
        if self.classical_detuning_noise_psd < 0.0:
            raise ValueError("classical_detuning_noise_psd must be non-negative")


@dataclass(frozen=True)
class SimOutput:
    """Simulated detuning trace and the per-mode displacements behind it.

    detuning(t) = nu0 - sum_k (2 G_k/kappa) x_k(t) + detuning_noise(t)
    holds exactly (recomputable from the fields); detuning_noise is all
    zeros when no classical noise is configured.
    """

    detuning: TimeTrace
    per_mode_displacement: list[TimeTrace]
    detuning_noise: TimeTrace
    radiation_pressure_enabled: bool


def thermal_occupation(omega_m: float, temperature: float) -> float:
    """High-temperature phonon occupancy n_th = k_B T / (hbar omega_m)."""
    if omega_m <= 0.0:
        raise ValueError("omega_m must be positive")
    if temperature < 0.0:
        raise ValueError("temperature must be non-negative")
    return k_B * temperature / (hbar * omega_m)


def spring_frequency(
    omega_m: float, gamma_m: float, cooperativity: float, nu: float
) -> float:
    """Effective frequency under the adiabatic intracavity force:
    omega_m + gamma_m * C * nu / (1 + nu^2)."""
    return omega_m + gamma_m * cooperativity * nu / (1.0 + nu * nu)


def ringdown_trace(
    gamma_m: float,
    beta_nl: float,
    e0: float,
    duration: float,
    sample_rate: float,
    offset: float = 0.0,
) -> TimeTrace:
    """Closed-form energy decay under dE/dt = -(gamma_m + beta_nl E) E.

    E(t) = gamma_m E0 / ((gamma_m + beta_nl E0) e^(gamma_m t) - beta_nl E0)
    plus a constant offset; reduces to E0 e^(-gamma_m t) at beta_nl = 0.
    """
    if gamma_m <= 0.0 or e0 < 0.0 or beta_nl < 0.0:
        raise ValueError("gamma_m > 0, e0 >= 0, beta_nl >= 0 required")
    if duration <= 0.0 or sample_rate <= 0.0:
        raise ValueError("duration and sample_rate must be positive")
    t = np.arange(round(duration * sample_rate)) / sample_rate
    b = beta_nl * e0
    energy = gamma_m * e0 / ((gamma_m + b) * np.exp(gamma_m * t) - b)
    return TimeTrace(energy + offset, sample_rate, "J")


def _validate_step(
    modes: list[ModeParams],
    cavity: CavityParams,
    bath: BathParams,
    dt: float,
    radiation_pressure: bool,
) -> None:
    limit = 0.0
    e_th = k_B * bath.temperature
    for m in modes:
        rate = m.gamma_m + m.beta_nl * e_th
        if radiation_pressure:
            # gamma_m * C = 4 g0^2 n_c_bar / kappa
            rate = max(rate, 4.0 * m.g0**2 * cavity.n_c_bar / cavity.kappa)
        limit = max(limit, rate)
    if limit * dt > 0.05:
        raise ValueError(
            f"step too coarse for the configured rates: dt = {dt:.3g} s exceeds "
            f"0.05 / max(gamma_m C, gamma_m + beta_nl E_th) = {0.05 / limit:.3g} s"
        )


def simulate_modes(
    modes: list[ModeParams],
    cavity: CavityParams,
    bath: BathParams,
    duration: float,
    sample_rate: float,
    radiation_pressure: bool = False,
) -> SimOutput:
    """Simulate thermal multimode motion and the detuning trace it imprints.

    Parameters
    ----------
    modes : list of ModeParams
        Mechanical modes; each draws from its own noise stream (keyed by
        list index), so adding a mode leaves the others' noise unchanged.
    cavity, bath : CavityParams, BathParams
        Operating point, photon number, temperature, seed, classical noise.
    duration, sample_rate : float
        Trace length (s) and rate (Hz); sample_rate must exceed
        omega_m / pi for every mode.
    radiation_pressure : bool
        Apply the adiabatic intracavity force (fluctuating part of
        F = -hbar G n_c0 |L(nu)|^2; the static component is absorbed into
        the operating point).  Shifts the oscillation frequency by
        gamma_m C nu0 / (1 + nu0^2).
    """
    if not modes:
        raise ValueError("at least one mode is required")
    if duration <= 0.0 or sample_rate <= 0.0:
        raise ValueError("duration and sample_rate must be positive")
    n = int(round(duration * sample_rate))
    if n < 2:
        raise ValueError("trace must contain at least two samples")
    for m in modes:
        if sample_rate <= m.omega_m / math.pi:
            raise ValueError(
                f"sample_rate {sample_rate:.3g} Hz is below Nyquist for "
                f"omega_m/2pi = {m.omega_m / (2 * math.pi):.3g} Hz"
            )
    dt = 1.0 / sample_rate
    _validate_step(modes, cavity, bath, dt, radiation_pressure)

    n_modes = len(modes)
    a0 = np.zeros(n_modes, dtype=np.complex128)
    decay = np.zeros(n_modes, dtype=np.complex128)
    noise = np.zeros((n_modes, n), dtype=np.complex128)
    coef = np.zeros(n_modes)
    force_gain = np.zeros(n_modes)
    beta_step = np.zeros(n_modes)
    for k, m in enumerate(modes):
        sigma2 = k_B * bath.temperature / (m.m_eff * m.omega_m**2)
        decay[k] = np.exp((1j * m.omega_m - 0.5 * m.gamma_m) * dt)
        rng = mode_stream(bath.seed, k)
        draws = rng.standard_normal(2 * (n + 1))
        a0[k] = math.sqrt(sigma2) * complex(draws[0], draws[1])
        s = math.sqrt(sigma2 * -math.expm1(-m.gamma_m * dt))
        noise[k] = s * (draws[2 : 2 + 2 * n : 2] + 1j * draws[3 : 3 + 2 * n : 2])
        g_x = m.g0 / m.x_zp
        coef[k] = 2.0 * g_x / cavity.kappa
        force_gain[k] = hbar * g_x * cavity.n_c0 * dt / (m.m_eff * m.omega_m)
        beta_step[k] = 0.25 * m.beta_nl * m.m_eff * m.omega_m**2 * dt

    if bath.classical_detuning_noise_psd > 0.0:
        sigma_cl = math.sqrt(bath.classical_detuning_noise_psd * sample_rate / 2.0)
        nu_noise = sigma_cl * detuning_noise_stream(bath.seed).standard_normal(n)
    else:
        nu_noise = np.zeros(0)

    x = np.zeros((n_modes, n))
    evolve_modes(
        a0, decay, noise, coef, force_gain, beta_step,
        float(cavity.nu0), nu_noise, bool(radiation_pressure), x,
    )

    noise_values = nu_noise if nu_noise.size == n else np.zeros(n)
    detuning_values = cavity.nu0 - coef @ x + noise_values
    return SimOutput(
        detuning=TimeTrace(detuning_values, sample_rate, "nu"),
        per_mode_displacement=[
            TimeTrace(x[k], sample_rate, "m") for k in range(n_modes)
        ],
        detuning_noise=TimeTrace(noise_values, sample_rate, "nu"),
        radiation_pressure_enabled=bool(radiation_pressure),
    )
