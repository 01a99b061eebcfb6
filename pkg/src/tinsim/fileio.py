"""On-disk formats for traces and spectra.

Trace files are binary: magic "OMTRACE1", little-endian u32 version,
u64 sample count, f64 sample rate (Hz), a 16-byte space-padded unit tag,
then the samples as little-endian f64.  Spectrum files are text: one
header line

    # unit=<tag> df_hz=<v> window=<w> overlap=<v> segments=<n>

followed by "frequency_hz,psd" rows; floats are printed with 17
significant digits, so write -> read -> write reproduces files exactly.
"""

from __future__ import annotations

import struct

import numpy as np

from .spectral import Spectrum
from .trace import TimeTrace

TRACE_MAGIC = b"OMTRACE1"
TRACE_VERSION = 1
_UNIT_BYTES = 16


class FileFormatError(Exception):
    """Raised for malformed trace or spectrum files."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_trace(path, trace: TimeTrace) -> None:
    unit = trace.unit.encode("ascii")
    if len(unit) > _UNIT_BYTES:
        raise ValueError(f"unit tag longer than {_UNIT_BYTES} bytes")
    header = (
        TRACE_MAGIC
        + struct.pack("<IQd", TRACE_VERSION, trace.n, trace.sample_rate)
        + unit.ljust(_UNIT_BYTES)
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(trace.values.astype("<f8").tobytes())


def read_trace(path) -> TimeTrace:
    with open(path, "rb") as f:
        magic = f.read(len(TRACE_MAGIC))
        if magic != TRACE_MAGIC:
            raise FileFormatError(f"{path}: not a trace file (bad magic)")
        head = f.read(struct.calcsize("<IQd"))
        if len(head) != struct.calcsize("<IQd"):
            raise FileFormatError(f"{path}: truncated header")
        version, count, rate = struct.unpack("<IQd", head)
        if version != TRACE_VERSION:
            raise FileFormatError(f"{path}: unsupported trace version {version}")
        unit = f.read(_UNIT_BYTES)
        if len(unit) != _UNIT_BYTES:
            raise FileFormatError(f"{path}: truncated unit tag")
        payload = f.read()
    if len(payload) != 8 * count:
        raise FileFormatError(
            f"{path}: declared {count} samples but payload holds {len(payload) // 8}"
        )
    values = np.frombuffer(payload, dtype="<f8")
    return TimeTrace(values, rate, unit.decode("ascii").rstrip(" "))


def write_spectrum(path, spectrum: Spectrum) -> None:
    for token in (spectrum.unit, spectrum.window):
        if any(c.isspace() for c in token):
            raise ValueError("unit and window tags must not contain whitespace")
    lines = [
        f"# unit={spectrum.unit} df_hz={_fmt(spectrum.df)} "
        f"window={spectrum.window} overlap={_fmt(spectrum.overlap)} "
        f"segments={spectrum.segments}"
    ]
    for f_hz, v in zip(spectrum.frequencies, spectrum.values):
        lines.append(f"{_fmt(f_hz)},{_fmt(v)}")
    with open(path, "w", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")


def read_spectrum(path) -> Spectrum:
    with open(path, "r", encoding="ascii") as f:
        header = f.readline().rstrip("\n")
        if not header.startswith("# "):
            raise FileFormatError(f"{path}: missing spectrum header")
        fields = {}
        for token in header[2:].split():
            if "=" not in token:
                raise FileFormatError(f"{path}: malformed header token {token!r}")
            key, value = token.split("=", 1)
            fields[key] = value
        missing = {"unit", "df_hz", "window", "overlap", "segments"} - fields.keys()
        if missing:
            raise FileFormatError(f"{path}: header missing {sorted(missing)}")
        freqs, values = [], []
        for line_no, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise FileFormatError(f"{path}:{line_no}: expected 'frequency_hz,psd'")
            freqs.append(float(parts[0]))
            values.append(float(parts[1]))
    if len(freqs) < 2:
        raise FileFormatError(f"{path}: fewer than two spectrum rows")
    spectrum = Spectrum(
        np.array(freqs),
        np.array(values),
        fields["unit"],
        fields["window"],
        float(fields["overlap"]),
        int(fields["segments"]),
    )
    df_declared = float(fields["df_hz"])
    if not np.isclose(spectrum.df, df_declared, rtol=1e-12, atol=0.0):
        raise FileFormatError(f"{path}: df mismatch between header and rows")
    return spectrum
