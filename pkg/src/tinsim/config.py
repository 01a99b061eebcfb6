"""INI run configuration.

A run file collects the physics and acquisition parameters that the
command line would otherwise need a dozen flags for:

    [cavity]            kappa_mhz|kappa_khz|kappa_hz, nu0, n_c0, phi0_rad
    [bath]              temperature_k, seed, detuning_noise_psd_per_hz
    [detector]          i_max, i_bg, photon_flux_hz, shot_noise
    [mode:<label>]      frequency_mhz|khz|hz, quality|gamma_hz, g0_hz,
                        m_eff_kg, beta_nl
    [simulate]          duration_s|duration_ms,
                        sample_rate_mhz|khz|hz, radiation_pressure
    [model]             kappa_t_mhz|khz|hz, eta_det, s_delta_per_hz
    [sweep]             band_lo_*, band_hi_*, duration_s|duration_ms,
                        sample_rate_*, segment_length

Frequencies are ordinary (cycles/s) values; the loader converts linewidths,
mode frequencies, and coupling rates to angular units at this boundary and
nothing downstream sees a Hz/rad ambiguity again.  Unknown sections or keys
are errors, as is giving the same quantity twice through different suffixes.
If a config path does not exist and TINSIM_CONFIG_DIR is set, the path is
retried inside that directory.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field

from .dynamics import BathParams, CavityParams, ModeParams
from .transduction import DetectorParams

TWO_PI = 2.0 * math.pi

_SCALES = {"hz": 1.0, "khz": 1e3, "mhz": 1e6}


class ConfigError(Exception):
    """Raised for unreadable, unknown, missing, or contradictory settings."""


@dataclass(frozen=True)
class SimulateOptions:
    duration: float | None = None
    sample_rate: float | None = None
    radiation_pressure: bool = False


@dataclass(frozen=True)
class ModelOptions:
    kappa_t: float | None = None  # defaults to cavity kappa downstream
    eta_det: float = 1.0
    s_delta: float = 0.0


@dataclass(frozen=True)
class SweepOptions:
    band_lo: float
    band_hi: float
    duration: float
    sample_rate: float
    segment_length: int


@dataclass(frozen=True)
class RunConfig:
    cavity: CavityParams
    bath: BathParams
    modes: tuple[ModeParams, ...]
    detector: DetectorParams | None = None
    simulate: SimulateOptions = field(default_factory=SimulateOptions)
    model: ModelOptions = field(default_factory=ModelOptions)
    sweep: SweepOptions | None = None
    resolved: tuple[tuple[str, str], ...] = ()
    """(key, value) echo of every setting after unit resolution, for sidecars."""


class _Section:
    """One parsed section with strict key accounting."""

    def __init__(self, name: str, raw: dict[str, str], resolved: list):
        self.name = name
        self.raw = dict(raw)
        self.seen: set[str] = set()
        self._resolved = resolved

    def _record(self, key: str, value) -> None:
        self._resolved.append((f"{self.name}.{key}", f"{value}"))

    def get_float(self, key: str, default: float | None = None) -> float | None:
        if key not in self.raw:
            return default
        self.seen.add(key)
        try:
            value = float(self.raw[key])
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: not a number") from exc
        self._record(key, f"{value:.17g}")
        return value

    def get_int(self, key: str, default: int | None = None) -> int | None:
        if key not in self.raw:
            return default
        self.seen.add(key)
        try:
            value = int(self.raw[key])
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: not an integer") from exc
        self._record(key, value)
        return value

    def get_bool(self, key: str, default: bool) -> bool:
        if key not in self.raw:
            return default
        self.seen.add(key)
        token = self.raw[key].strip().lower()
        truthy = {"1": True, "true": True, "yes": True, "on": True,
                  "0": False, "false": False, "no": False, "off": False}
        if token not in truthy:
            raise ConfigError(f"[{self.name}] {key}: not a boolean")
        value = truthy[token]
        self._record(key, str(value).lower())
        return value

    def get_scaled(
        self, base: str, default: float | None = None, required: bool = False
    ) -> float | None:
        """Value given once under base_hz / base_khz / base_mhz, in Hz."""
        present = [s for s in _SCALES if f"{base}_{s}" in self.raw]
        if not present:
            if required:
                raise ConfigError(
                    f"[{self.name}] missing {base}_hz (or _khz/_mhz)"
                )
            return default
        if len(present) > 1:
            keys = ", ".join(f"{base}_{s}" for s in present)
            raise ConfigError(f"[{self.name}] {keys} given together")
        suffix = present[0]
        return self.get_float(f"{base}_{suffix}") * _SCALES[suffix]

    def finish(self) -> None:
        unknown = set(self.raw) - self.seen
        if unknown:
            raise ConfigError(
                f"[{self.name}] unknown key(s): {', '.join(sorted(unknown))}"
            )


def _resolve_path(path: str) -> str:
    if os.path.exists(path):
        return path
    search = os.environ.get("TINSIM_CONFIG_DIR")
    if search and not os.path.isabs(path):
        candidate = os.path.join(search, path)
        if os.path.exists(candidate):
            return candidate
    raise ConfigError(f"config file not found: {path}")


def load_config(path: str) -> RunConfig:
    """Parse and validate a run file into constructed parameter objects."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    resolved_path = _resolve_path(path)
    try:
        with open(resolved_path, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"{resolved_path}: {exc}") from exc

    resolved: list[tuple[str, str]] = []
    sections = {
        name: _Section(name, dict(parser[name]), resolved)
        for name in parser.sections()
    }

    known = {"cavity", "bath", "detector", "simulate", "model", "sweep"}
    for name in sections:
        if name not in known and not name.startswith("mode:"):
            raise ConfigError(f"unknown section [{name}]")

    if "cavity" not in sections:
        raise ConfigError("missing required section [cavity]")
    if "bath" not in sections:
        raise ConfigError("missing required section [bath]")

    sec = sections["cavity"]
    try:
        cavity = CavityParams(
            kappa=TWO_PI * sec.get_scaled("kappa", required=True),
            nu0=sec.get_float("nu0", 0.0),
            n_c0=sec.get_float("n_c0", 0.0),
            phi0=sec.get_float("phi0_rad", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[cavity] {exc}") from exc
    sec.finish()

    sec = sections["bath"]
    temperature = sec.get_float("temperature_k")
    if temperature is None:
        raise ConfigError("[bath] missing temperature_k")
    try:
        bath = BathParams(
            temperature=temperature,
            seed=sec.get_int("seed", 0),
            classical_detuning_noise_psd=sec.get_float("detuning_noise_psd_per_hz", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[bath] {exc}") from exc
    sec.finish()

    modes = []
    for name in parser.sections():
        if not name.startswith("mode:"):
            continue
        label = name[len("mode:") :]
        if not label:
            raise ConfigError("mode section needs a label: [mode:<label>]")
        sec = sections[name]
        frequency = sec.get_scaled("frequency", required=True)
        quality = sec.get_float("quality")
        gamma_hz = sec.get_float("gamma_hz")
        if (quality is None) == (gamma_hz is None):
            raise ConfigError(f"[{name}] give exactly one of quality, gamma_hz")
        omega_m = TWO_PI * frequency
        gamma_m = omega_m / quality if quality is not None else TWO_PI * gamma_hz
        g0_hz = sec.get_float("g0_hz")
        if g0_hz is None:
            raise ConfigError(f"[{name}] missing g0_hz")
        m_eff = sec.get_float("m_eff_kg")
        if m_eff is None:
            raise ConfigError(f"[{name}] missing m_eff_kg")
        try:
            modes.append(
                ModeParams(
                    omega_m=omega_m,
                    gamma_m=gamma_m,
                    m_eff=m_eff,
                    g0=TWO_PI * g0_hz,
                    beta_nl=sec.get_float("beta_nl", 0.0),
                    label=label,
                )
            )
        except ValueError as exc:
            raise ConfigError(f"[{name}] {exc}") from exc
        sec.finish()

    detector = None
    if "detector" in sections:
        sec = sections["detector"]
        i_max = sec.get_float("i_max")
        if i_max is None:
            raise ConfigError("[detector] missing i_max")
        try:
            detector = DetectorParams(
                i_max=i_max,
                i_bg=sec.get_float("i_bg", 0.0),
                photon_flux=sec.get_float("photon_flux_hz", 0.0),
                shot_noise=sec.get_bool("shot_noise", False),
            )
        except ValueError as exc:
            raise ConfigError(f"[detector] {exc}") from exc
        sec.finish()

    simulate = SimulateOptions()
    if "simulate" in sections:
        sec = sections["simulate"]
        simulate = SimulateOptions(
            duration=_duration(sec),
            sample_rate=sec.get_scaled("sample_rate"),
            radiation_pressure=sec.get_bool("radiation_pressure", False),
        )
        sec.finish()

    model = ModelOptions()
    if "model" in sections:
        sec = sections["model"]
        kappa_t_hz = sec.get_scaled("kappa_t")
        model = ModelOptions(
            kappa_t=None if kappa_t_hz is None else TWO_PI * kappa_t_hz,
            eta_det=sec.get_float("eta_det", 1.0),
            s_delta=sec.get_float("s_delta_per_hz", 0.0),
        )
        sec.finish()

    sweep = None
    if "sweep" in sections:
        sec = sections["sweep"]
        band_lo = sec.get_scaled("band_lo", required=True)
        band_hi = sec.get_scaled("band_hi", required=True)
        duration = _duration(sec)
        sample_rate = sec.get_scaled("sample_rate", required=True)
        segment_length = sec.get_int("segment_length")
        if duration is None or segment_length is None:
            raise ConfigError("[sweep] needs duration_s and segment_length")
        if not band_hi > band_lo:
            raise ConfigError("[sweep] band_hi must exceed band_lo")
        sweep = SweepOptions(band_lo, band_hi, duration, sample_rate, segment_length)
        sec.finish()

    try:
        return RunConfig(
            cavity=cavity,
            bath=bath,
            modes=tuple(modes),
            detector=detector,
            simulate=simulate,
            model=model,
            sweep=sweep,
            resolved=tuple(resolved),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _duration(sec: _Section) -> float | None:
    dur_s = sec.get_float("duration_s")
    dur_ms = sec.get_float("duration_ms")
    if dur_s is not None and dur_ms is not None:
        raise ConfigError(f"[{sec.name}] duration_s and duration_ms given together")
    if dur_ms is not None:
        return dur_ms * 1e-3
    return dur_s
