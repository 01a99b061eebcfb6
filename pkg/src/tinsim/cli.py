"""Command line front end.

Every command reads/writes the formats in fileio and prints key=value
lines on stdout.  Each written file gets a <name>.meta sidecar recording
the tool version, the command, its arguments, and the resolved run
configuration, so a rerun of the same invocation is bitwise identical.

Exit codes: 0 success, 2 bad usage or configuration, 3 numerical failure
(a fit did not converge), 4 file I/O or format errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .dynamics import simulate_modes, thermal_occupation
from .fileio import (
    FileFormatError,
    read_spectrum,
    read_trace,
    write_spectrum,
    write_trace,
)
from .fits import (
    ModelPsdParams,
    estimate_g0,
    fit_optical_spring,
    fit_ringdown,
    fit_scan,
    model_psd,
    SpringPoint,
    thermal_force_psd,
)
from .lockin import demodulate, third_order_correlation
from .spectral import (
    band_rms,
    normalize_to_max,
    rin_spectrum,
    snr_db,
    tin2_proxies,
    tin3_proxies,
    welch_psd,
)
from .transduction import (
    detuning_to_displacement,
    figures_of_merit,
    general_dyne_readout,
    linear_readout,
    nonlinear_readout,
    transduce,
)

TWO_PI = 2.0 * math.pi


class NumericError(Exception):
    """A computation ran but did not produce a usable result."""


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _emit(key: str, value) -> None:
    print(f"{key}={value}")


def _band(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected LO,HI in Hz")
    lo, hi = (float(p) for p in parts)
    return lo, hi


def _float_list(text: str) -> list[float]:
    values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return values


def _write_meta(path: str, command: str, args: argparse.Namespace,
                config: RunConfig | None = None) -> None:
    lines = [f"tool=tinsim {__version__}", f"command={command}"]
    skip = {"func", "command"}
    for key in sorted(vars(args)):
        if key in skip:
            continue
        value = getattr(args, key)
        if value is None:
            continue
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        lines.append(f"arg.{key.replace('_', '-')}={value}")
    if config is not None:
        for key, value in config.resolved:
            lines.append(f"config.{key}={value}")
    with open(f"{path}.meta", "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def _sibling(path: str, tag: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}.{tag}{ext}" if ext else f"{path}.{tag}"


def _require_converged(result) -> None:
    if not result.converged:
        raise NumericError(
            f"fit did not converge after {result.n_iter} iterations "
            f"(residual norm {result.residual_norm:.3g})"
        )


# ------------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if not cfg.modes:
        raise ConfigError("simulate needs at least one [mode:<label>] section")
    duration = args.duration if args.duration is not None else cfg.simulate.duration
    fs = args.sample_rate if args.sample_rate is not None else cfg.simulate.sample_rate
    if duration is None or fs is None:
        raise ConfigError(
            "duration and sample rate must come from [simulate] or the flags"
        )
    bath = cfg.bath
    if args.seed is not None:
        bath = dataclasses.replace(bath, seed=args.seed)
    rp = cfg.simulate.radiation_pressure or args.radiation_pressure
    out = simulate_modes(list(cfg.modes), cfg.cavity, bath, duration, fs, rp)
    write_trace(args.out, out.detuning)
    _write_meta(args.out, "simulate", args, cfg)
    for k, (mode, trace) in enumerate(zip(cfg.modes, out.per_mode_displacement)):
        path = _sibling(args.out, mode.label or f"mode{k}")
        write_trace(path, trace)
        _write_meta(path, "simulate", args, cfg)
    if args.photocurrent is not None:
        if cfg.detector is None:
            raise ConfigError("--photocurrent needs a [detector] section")
        current = transduce(out.detuning, cfg.detector, seed=bath.seed)
        write_trace(args.photocurrent, current)
        _write_meta(args.photocurrent, "simulate", args, cfg)
    _emit("n_samples", out.detuning.n)
    _emit("duration_s", _fmt(out.detuning.duration))
    _emit("sample_rate_hz", _fmt(fs))
    _emit("radiation_pressure", str(rp).lower())
    _emit("detuning_mean", _fmt(float(out.detuning.values.mean())))
    _emit("detuning_rms", _fmt(float(out.detuning.values.std())))
    return 0


def cmd_reconstruct(args) -> int:
    current = read_trace(args.input)
    if args.mode == "general-dyne":
        if args.sign_trace is None:
            raise ConfigError("general-dyne needs --sign-trace")
        signs = read_trace(args.sign_trace)
        result = general_dyne_readout(current, signs, args.i_max, args.i_bg)
    elif args.mode == "linear":
        result = linear_readout(current, args.nu0, args.i_max, args.i_bg)
    else:
        result = nonlinear_readout(current, args.nu0, args.i_max, args.i_bg)
    write_trace(args.out, result.detuning_estimate)
    _write_meta(args.out, "reconstruct", args)
    _emit("method", result.method)
    _emit("n_samples", result.detuning_estimate.n)
    _emit("clamp_count", result.clamp_count)
    _emit("clamp_fraction", _fmt(result.clamp_fraction))
    return 0


def _estimator_args(args):
    return dict(
        segment_length=args.segment,
        overlap=args.overlap,
        window=args.window,
    )


def cmd_psd(args) -> int:
    trace = read_trace(args.input)
    spectrum = welch_psd(trace, **_estimator_args(args))
    write_spectrum(args.out, spectrum)
    _write_meta(args.out, "psd", args)
    _emit("n_bins", spectrum.n)
    _emit("df_hz", _fmt(spectrum.df))
    _emit("segments", spectrum.segments)
    return 0


def cmd_rin(args) -> int:
    trace = read_trace(args.input)
    spectrum = rin_spectrum(trace, **_estimator_args(args))
    write_spectrum(args.out, spectrum)
    _write_meta(args.out, "rin", args)
    _emit("n_bins", spectrum.n)
    _emit("df_hz", _fmt(spectrum.df))
    _emit("segments", spectrum.segments)
    return 0


def cmd_tin(args) -> int:
    spectrum = read_spectrum(args.input)
    if args.order == 2:
        tagged = zip(("splus", "sminus"), tin2_proxies(spectrum))
    else:
        tagged = zip(("spp", "spm", "smm"), tin3_proxies(spectrum))
    for tag, proxy in tagged:
        if args.normalize_max is not None:
            proxy = normalize_to_max(proxy, *args.normalize_max)
        path = f"{args.out_prefix}.{tag}.spec"
        write_spectrum(path, proxy)
        _write_meta(path, "tin", args)
        _emit(f"wrote_{tag}", path)
    return 0


def cmd_band_rms(args) -> int:
    spectrum = read_spectrum(args.input)
    _emit("band_rms", _fmt(band_rms(spectrum, *args.band)))
    _emit("unit", spectrum.unit)
    return 0


def cmd_snr(args) -> int:
    spectrum = read_spectrum(args.input)
    value = snr_db(spectrum, args.signal, args.noise)
    _emit("snr_db", f"{value:.1f}")
    if args.compare is not None:
        reference = read_spectrum(args.compare)
        ref = snr_db(reference, args.signal, args.noise)
        _emit("snr_db_ref", f"{ref:.1f}")
        _emit("improvement_db", f"{value - ref:.1f}")
    return 0


def cmd_demod(args) -> int:
    trace = read_trace(args.input)
    quad = demodulate(trace, args.carrier, args.bandwidth)
    x, y = (quad.x, quad.y) if not args.settled else quad.settled()
    t = np.arange(x.size) / quad.sample_rate
    with open(args.out, "w", encoding="ascii") as f:
        f.write("time_s,x,y\n")
        for row in zip(t, x, y):
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")
    _write_meta(args.out, "demod", args)
    _emit("n_samples", x.size)
    _emit("sample_rate_hz", _fmt(quad.sample_rate))
    return 0


def cmd_correlate(args) -> int:
    trace = read_trace(args.input)
    if len(args.freqs) != 4:
        raise ConfigError("--freqs needs exactly four comma-separated values")
    report = third_order_correlation(trace, tuple(args.freqs), args.bandwidth)
    _emit("beta_x", _fmt(report.beta_x))
    _emit("sigma_x", _fmt(report.sigma_x))
    _emit("beta_y", _fmt(report.beta_y))
    _emit("sigma_y", _fmt(report.sigma_y))
    _emit("pearson_x", _fmt(report.pearson_x))
    _emit("pearson_y", _fmt(report.pearson_y))
    _emit("n_samples", report.n_samples)
    return 0


def _read_spring_series(path: str) -> list[SpringPoint]:
    points = []
    with open(path, "r", encoding="ascii") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise FileFormatError(
                    f"{path}:{line_no}: expected power_ratio,f_eff_hz,sigma_hz"
                )
            ratio, f_eff, sigma = (float(p) for p in parts)
            points.append(SpringPoint(ratio, TWO_PI * f_eff, TWO_PI * sigma))
    return points


def cmd_fit_spring(args) -> int:
    series = _read_spring_series(args.input)
    result = fit_optical_spring(
        series,
        gamma_m=TWO_PI * args.gamma_hz,
        omega_m_guess=TWO_PI * args.omega_guess_hz,
        fix_omega_m=args.fix_omega_m,
    )
    _require_converged(result)
    _emit("cooperativity", _fmt(result.params["cooperativity"]))
    _emit("cooperativity_sigma", _fmt(result.sigmas["cooperativity"]))
    _emit("nu_1", _fmt(result.params["nu_1"]))
    _emit("nu_1_sigma", _fmt(result.sigmas["nu_1"]))
    _emit("omega_m_hz", _fmt(result.params["omega_m"] / TWO_PI))
    _emit("omega_m_sigma_hz", _fmt(result.sigmas["omega_m"] / TWO_PI))
    _emit("n_iter", result.n_iter)
    return 0


def cmd_fit_ringdown(args) -> int:
    energy = read_trace(args.input)
    omega_m = None if args.omega_m_hz is None else TWO_PI * args.omega_m_hz
    result = fit_ringdown(energy, omega_m)
    _require_converged(result)
    _emit("gamma_hz", _fmt(result.params["gamma_m"] / TWO_PI))
    _emit("gamma_sigma_hz", _fmt(result.sigmas["gamma_m"] / TWO_PI))
    _emit("beta_nl", _fmt(result.params["beta_nl"]))
    _emit("beta_nl_sigma", _fmt(result.sigmas["beta_nl"]))
    _emit("e0", _fmt(result.params["e0"]))
    _emit("offset", _fmt(result.params["offset"]))
    if "quality" in result.params:
        _emit("quality", _fmt(result.params["quality"]))
        _emit("quality_sigma", _fmt(result.sigmas["quality"]))
    _emit("n_iter", result.n_iter)
    return 0


def cmd_fit_scan(args) -> int:
    trace = read_trace(args.input)
    result = fit_scan(trace, args.scan_rate, args.n_modes)
    _require_converged(result)
    _emit("kappa_hz", _fmt(result.params["kappa"] / TWO_PI))
    _emit("kappa_sigma_hz", _fmt(result.sigmas["kappa"] / TWO_PI))
    _emit("nu_offset", _fmt(result.params["nu_offset"]))
    _emit("i_max", _fmt(result.params["i_max"]))
    _emit("i_bg", _fmt(result.params["i_bg"]))
    for j in range(1, args.n_modes + 1):
        _emit(f"alpha_{j}", _fmt(result.params[f"alpha_{j}"]))
        _emit(f"alpha_{j}_sigma", _fmt(result.sigmas[f"alpha_{j}"]))
        _emit(f"f_{j}_hz", _fmt(result.params[f"omega_{j}"] / TWO_PI))
        _emit(f"phi_{j}", _fmt(result.params[f"phi_{j}"]))
    _emit("n_iter", result.n_iter)
    return 0


def cmd_g0(args) -> int:
    samples = []
    with open(args.alphas, "r", encoding="ascii") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                samples.append(float(line.split(",")[0]))
    g0, sigma = estimate_g0(samples, TWO_PI * args.kappa_hz, args.n_th)
    _emit("g0_hz", _fmt(g0 / TWO_PI))
    _emit("g0_sigma_hz", _fmt(sigma / TWO_PI))
    _emit("n_samples", len(samples))
    return 0


def cmd_fom(args) -> int:
    cfg = load_config(args.config)
    if not cfg.modes:
        raise ConfigError("fom needs at least one [mode:<label>] section")
    for k, mode in enumerate(cfg.modes):
        fom = figures_of_merit(
            omega_m=mode.omega_m,
            gamma_m=mode.gamma_m,
            g0=mode.g0,
            m_eff=mode.m_eff,
            kappa=cfg.cavity.kappa,
            n_c_bar=cfg.cavity.n_c_bar,
            temperature=cfg.bath.temperature,
        )
        label = mode.label or f"mode{k}"
        _emit(f"{label}.cooperativity", _fmt(fom.cooperativity))
        _emit(
            f"{label}.single_photon_cooperativity",
            _fmt(fom.single_photon_cooperativity),
        )
        _emit(f"{label}.n_th", _fmt(fom.n_th))
        _emit(f"{label}.s_qba", _fmt(fom.s_qba))
        _emit(f"{label}.s_th", _fmt(fom.s_th))
        _emit(f"{label}.n_sideband_limit", _fmt(fom.n_sideband_limit))
    return 0


def _model_params(cfg: RunConfig, label: str | None) -> ModelPsdParams:
    if not cfg.modes:
        raise ConfigError("model-psd needs a [mode:<label>] section")
    mode = cfg.modes[0]
    if label is not None:
        matches = [m for m in cfg.modes if m.label == label]
        if not matches:
            raise ConfigError(f"no [mode:{label}] section in the config")
        mode = matches[0]
    kappa = cfg.cavity.kappa
    try:
        return ModelPsdParams(
            omega_m=mode.omega_m,
            gamma_m=mode.gamma_m,
            m_eff=mode.m_eff,
            g0=mode.g0,
            kappa=kappa,
            kappa_t=cfg.model.kappa_t if cfg.model.kappa_t is not None else kappa,
            detuning=cfg.cavity.nu0 * kappa / 2.0,
            n_c=cfg.cavity.n_c_bar,
            s_delta=cfg.model.s_delta,
            thermal_force_psd=thermal_force_psd(
                mode.m_eff, mode.gamma_m, cfg.bath.temperature
            ),
            eta_det=cfg.model.eta_det,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_model_psd(args) -> int:
    cfg = load_config(args.config)
    params = _model_params(cfg, args.mode_label)
    f_max = args.f_max if args.f_max is not None else 2.0 * params.omega_m / TWO_PI
    omega = np.linspace(0.0, TWO_PI * f_max, args.points)
    spectrum = model_psd(params, omega)
    write_spectrum(args.out, spectrum)
    _write_meta(args.out, "model-psd", args, cfg)
    _emit("n_bins", spectrum.n)
    _emit("df_hz", _fmt(spectrum.df))
    j = int(np.argmin(spectrum.values[1:])) + 1
    _emit("minimum_hz", _fmt(spectrum.frequencies[j]))
    _emit("minimum_snu", _fmt(spectrum.values[j]))
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if cfg.sweep is None:
        raise ConfigError("sweep needs a [sweep] section")
    if cfg.detector is None or cfg.detector.photon_flux <= 0.0:
        raise ConfigError("sweep needs a [detector] section with photon_flux_hz")
    if not cfg.modes:
        raise ConfigError("sweep needs at least one [mode:<label>] section")
    nu0 = cfg.cavity.nu0
    if nu0 == 0.0:
        raise ConfigError("sweep needs a non-zero operating detuning nu0")
    sense = cfg.modes[0]
    sw = cfg.sweep
    lor = 1.0 / (1.0 + nu0 * nu0)
    rows = []
    for c in args.cooperativities:
        if c <= 0.0:
            raise ConfigError("cooperativities must be positive")
        # photon number that realizes this cooperativity at the operating point
        n_c0 = c * cfg.cavity.kappa * sense.gamma_m / (4.0 * sense.g0**2 * lor)
        cavity = dataclasses.replace(cfg.cavity, n_c0=n_c0)
        # detected flux scales with the circulating power
        detector = dataclasses.replace(
            cfg.detector, photon_flux=cfg.detector.photon_flux * n_c0
        )
        sim = simulate_modes(
            list(cfg.modes), cavity, cfg.bath, sw.duration, sw.sample_rate, True
        )
        current = transduce(sim.detuning, detector, seed=cfg.bath.seed)
        readout = nonlinear_readout(current, nu0, detector.i_max, detector.i_bg)
        displacement = detuning_to_displacement(
            readout.detuning_estimate,
            sense.g0,
            cfg.cavity.kappa,
            sense.m_eff,
            sense.omega_m,
        )
        spectrum = welch_psd(displacement, sw.segment_length)
        rms = band_rms(spectrum, sw.band_lo, sw.band_hi)
        rows.append((c, n_c0, rms))
        _emit(f"rms_at_{_fmt(c)}", _fmt(rms))
    with open(args.out, "w", encoding="ascii") as f:
        f.write("cooperativity,n_c0,displacement_rms_m\n")
        for c, n_c0, rms in rows:
            f.write(f"{c:.17g},{n_c0:.17g},{rms:.17g}\n")
    _write_meta(args.out, "sweep", args, cfg)
    _emit("n_points", len(rows))
    return 0


# ------------------------------------------------------------------ the parser


def _add_estimator_flags(sub) -> None:
    sub.add_argument("--segment", type=int, required=True,
                     help="segment length (power of two)")
    sub.add_argument("--overlap", type=float, default=0.5)
    sub.add_argument("--window", choices=("hann", "rectangular"), default="hann")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tinsim",
        description="Simulate, transduce, and analyze cavity-detuning "
        "measurements of mechanical motion.",
    )
    parser.add_argument("--version", action="version", version=f"tinsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the mode dynamics")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="detuning trace output")
    p.add_argument("--duration", type=float, help="override [simulate] duration_s")
    p.add_argument("--sample-rate", type=float, dest="sample_rate",
                   help="override [simulate] sample rate (Hz)")
    p.add_argument("--seed", type=int, help="override [bath] seed")
    p.add_argument("--radiation-pressure", action="store_true",
                   dest="radiation_pressure")
    p.add_argument("--photocurrent", help="also write the detected current here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="estimate detuning from a photocurrent")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("linear", "nonlinear", "general-dyne"),
                   required=True)
    p.add_argument("--nu0", type=float, default=0.0,
                   help="operating detuning (linear/nonlinear)")
    p.add_argument("--i-max", type=float, dest="i_max", required=True)
    p.add_argument("--i-bg", type=float, dest="i_bg", default=0.0)
    p.add_argument("--sign-trace", dest="sign_trace",
                   help="per-sample detuning sign for general-dyne")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("psd", help="Welch power spectral density")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_estimator_flags(p)
    p.set_defaults(func=cmd_psd)

    p = sub.add_parser("rin", help="relative intensity noise spectrum")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_estimator_flags(p)
    p.set_defaults(func=cmd_rin)

    p = sub.add_parser("tin", help="intermodulation proxy spectra of a PSD")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--order", type=int, choices=(2, 3), required=True)
    p.add_argument("--out-prefix", dest="out_prefix", required=True)
    p.add_argument("--normalize-max", dest="normalize_max", type=_band,
                   help="scale each proxy to its maximum inside LO,HI (Hz)")
    p.set_defaults(func=cmd_tin)

    p = sub.add_parser("band-rms", help="RMS over a frequency band")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--band", type=_band, required=True, help="LO,HI in Hz")
    p.set_defaults(func=cmd_band_rms)

    p = sub.add_parser("snr", help="signal-to-noise ratio between two bands")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--signal", type=_band, required=True)
    p.add_argument("--noise", type=_band, required=True)
    p.add_argument("--compare", help="second spectrum; also print the difference")
    p.set_defaults(func=cmd_snr)

    p = sub.add_parser("demod", help="dual-phase lock-in demodulation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="CSV of time_s,x,y")
    p.add_argument("--carrier", type=float, required=True)
    p.add_argument("--bandwidth", type=float, required=True)
    p.add_argument("--settled", action="store_true",
                   help="drop filter settling and edge transients")
    p.set_defaults(func=cmd_demod)

    p = sub.add_parser("correlate",
                       help="third-order quadrature prediction vs measurement")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--freqs", type=_float_list, required=True,
                   help="f1,f2,f3,f4 with f4 = f1+f2+f3 (Hz)")
    p.add_argument("--bandwidth", type=float, required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("fit-spring", help="cooperativity from a detuning sweep")
    p.add_argument("--in", dest="input", required=True,
                   help="CSV of power_ratio,f_eff_hz,sigma_hz")
    p.add_argument("--gamma-hz", type=float, dest="gamma_hz", required=True)
    p.add_argument("--omega-guess-hz", type=float, dest="omega_guess_hz",
                   required=True)
    p.add_argument("--fix-omega-m", action="store_true", dest="fix_omega_m")
    p.set_defaults(func=cmd_fit_spring)

    p = sub.add_parser("fit-ringdown", help="nonlinear energy decay fit")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--omega-m-hz", type=float, dest="omega_m_hz",
                   help="mode frequency, to also report the quality factor")
    p.set_defaults(func=cmd_fit_ringdown)

    p = sub.add_parser("fit-scan", help="linewidth fit of a swept-laser transit")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--scan-rate", type=float, dest="scan_rate", required=True,
                   help="optical frequency sweep rate (Hz/s)")
    p.add_argument("--n-modes", type=int, dest="n_modes", default=0,
                   help="number of thermal modulation tones to fit (0..3)")
    p.set_defaults(func=cmd_fit_scan)

    p = sub.add_parser("g0", help="vacuum coupling rate from modulation depths")
    p.add_argument("--alphas", required=True,
                   help="file with one modulation depth per line")
    p.add_argument("--kappa-hz", type=float, dest="kappa_hz", required=True)
    p.add_argument("--n-th", type=float, dest="n_th", required=True)
    p.set_defaults(func=cmd_g0)

    p = sub.add_parser("fom", help="measurement figures of merit per mode")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_fom)

    p = sub.add_parser("model-psd", help="detection noise model in shot-noise units")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--f-max", type=float, dest="f_max",
                   help="grid upper edge (Hz); default 2x the mode frequency")
    p.add_argument("--points", type=int, default=2048)
    p.add_argument("--mode-label", dest="mode_label",
                   help="which [mode:<label>] to model (default: first)")
    p.set_defaults(func=cmd_model_psd)

    p = sub.add_parser("sweep", help="in-band noise versus cooperativity")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="CSV output")
    p.add_argument("--cooperativities", type=_float_list, required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"tinsim: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"tinsim: {exc}", file=sys.stderr)
        return 3
    except FileFormatError as exc:
        print(f"tinsim: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"tinsim: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
