"""Cavity detuning measurement of mechanical motion: simulation of the
chained Lorentzian transduction, spectral and lock-in analysis of the
resulting intermodulation noise, and the calibration fits around them.
"""

from .dynamics import (
    BathParams,
    CavityParams,
    ModeParams,
    SimOutput,
    ringdown_trace,
    simulate_modes,
    spring_frequency,
    thermal_occupation,
)
from .fileio import (
    FileFormatError,
    read_spectrum,
    read_trace,
    write_spectrum,
    write_trace,
)
from .fits import (
    FitResult,
    ModelPsdParams,
    SpringPoint,
    estimate_g0,
    fit_lorentzian_peak,
    fit_optical_spring,
    fit_ringdown,
    fit_scan,
    model_psd,
    peak_frequency,
    spring_detunings,
    thermal_force_psd,
)
from .lockin import (
    CorrelationReport,
    QuadratureTrace,
    demodulate,
    pearson,
    predict_third_order,
    third_order_correlation,
    tls_fit,
)
from .spectral import (
    Spectrum,
    band_rms,
    normalize_to_max,
    rin_spectrum,
    snr_db,
    tin2_proxies,
    tin3_proxies,
    welch_psd,
)
from .trace import TimeTrace
from .transduction import (
    MAGIC_DETUNING,
    DetectorParams,
    FiguresOfMerit,
    ReadoutResult,
    detuning_to_displacement,
    figures_of_merit,
    general_dyne_readout,
    linear_readout,
    lorentzian_response,
    nonlinear_readout,
    phase_response,
    response_slope,
    transduce,
    zero_point_motion,
)

__version__ = "0.1.0"

__all__ = [
    "BathParams",
    "CavityParams",
    "CorrelationReport",
    "DetectorParams",
    "FiguresOfMerit",
    "FileFormatError",
    "FitResult",
    "MAGIC_DETUNING",
    "ModeParams",
    "ModelPsdParams",
    "QuadratureTrace",
    "ReadoutResult",
    "SimOutput",
    "Spectrum",
    "SpringPoint",
    "TimeTrace",
    "band_rms",
    "demodulate",
    "detuning_to_displacement",
    "estimate_g0",
    "figures_of_merit",
    "fit_lorentzian_peak",
    "fit_optical_spring",
    "fit_ringdown",
    "fit_scan",
    "general_dyne_readout",
    "linear_readout",
    "lorentzian_response",
    "model_psd",
    "nonlinear_readout",
    "normalize_to_max",
    "peak_frequency",
    "pearson",
    "phase_response",
    "predict_third_order",
    "read_spectrum",
    "read_trace",
    "response_slope",
    "rin_spectrum",
    "ringdown_trace",
    "simulate_modes",
    "snr_db",
    "spring_detunings",
    "spring_frequency",
    "thermal_force_psd",
    "thermal_occupation",
    "third_order_correlation",
    "tin2_proxies",
    "tin3_proxies",
    "tls_fit",
    "transduce",
    "welch_psd",
    "write_spectrum",
    "write_trace",
    "zero_point_motion",
]
