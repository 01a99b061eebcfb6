"""Binary trace files and text spectrum files."""

import struct

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from tinsim import (
    FileFormatError,
    Spectrum,
    TimeTrace,
    read_spectrum,
    read_trace,
    write_spectrum,
    write_trace,
)


def test_trace_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(0)
    trace = TimeTrace(rng.standard_normal(1000) * 1e-12, 8.192e6, "m")
    path = tmp_path / "a.trace"
    write_trace(path, trace)
    back = read_trace(path)
    assert np.array_equal(back.values, trace.values)
    assert back.sample_rate == trace.sample_rate
    assert back.unit == "m"


@given(
    values=st.lists(
        st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1,
        max_size=64,
    ),
    rate=st.floats(1e-3, 1e12),
    unit=st.text(
        alphabet=st.characters(min_codepoint=33, max_codepoint=126), max_size=16
    ),
)
# every example rewrites the same file from scratch, so sharing tmp_path
# across examples is sound
@settings(
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
def test_trace_round_trip_property(tmp_path, values, rate, unit):
    trace = TimeTrace(np.array(values), rate, unit.rstrip(" "))
    path = tmp_path / "prop.trace"
    write_trace(path, trace)
    back = read_trace(path)
    assert np.array_equal(back.values, trace.values)
    assert back.sample_rate == trace.sample_rate
    assert back.unit == trace.unit


def test_trace_unit_too_long(tmp_path):
    trace = TimeTrace(np.zeros(4), 1.0, "x" * 17)
    with pytest.raises(ValueError, match="unit tag"):
        write_trace(tmp_path / "bad.trace", trace)


def test_trace_corrupt_files(tmp_path):
    trace = TimeTrace(np.arange(16.0), 100.0, "V")
    path = tmp_path / "good.trace"
    write_trace(path, trace)
    raw = path.read_bytes()

    bad_magic = tmp_path / "magic.trace"
    bad_magic.write_bytes(b"NOTRACE0" + raw[8:])
    with pytest.raises(FileFormatError, match="bad magic"):
        read_trace(bad_magic)

    bad_version = tmp_path / "version.trace"
    bad_version.write_bytes(raw[:8] + struct.pack("<I", 9) + raw[12:])
    with pytest.raises(FileFormatError, match="version"):
        read_trace(bad_version)

    truncated = tmp_path / "trunc.trace"
    truncated.write_bytes(raw[: len(raw) - 11])
    with pytest.raises(FileFormatError, match="payload holds"):
        read_trace(truncated)

    headerless = tmp_path / "head.trace"
    headerless.write_bytes(raw[:10])
    with pytest.raises(FileFormatError, match="truncated header"):
        read_trace(headerless)


def test_spectrum_round_trip_identical_bytes(tmp_path):
    rng = np.random.default_rng(3)
    spec = Spectrum(
        np.arange(0.0, 512.0) * 12.5,
        np.abs(rng.standard_normal(512)) * 1e-9,
        unit="m",
        window="hann",
        overlap=0.5,
        segments=31,
    )
    first = tmp_path / "a.spec"
    second = tmp_path / "b.spec"
    write_spectrum(first, spec)
    back = read_spectrum(first)
    write_spectrum(second, back)
    assert first.read_bytes() == second.read_bytes()
    assert back.unit == "m" and back.window == "hann"
    assert back.overlap == 0.5 and back.segments == 31
    assert np.array_equal(back.frequencies, spec.frequencies)
    assert np.array_equal(back.values, spec.values)


def test_spectrum_rejects_whitespace_tags(tmp_path):
    spec = Spectrum(np.array([0.0, 1.0]), np.array([1.0, 2.0]), unit="a b")
    with pytest.raises(ValueError, match="whitespace"):
        write_spectrum(tmp_path / "ws.spec", spec)


def test_spectrum_corrupt_files(tmp_path):
    good = tmp_path / "good.spec"
    write_spectrum(good, Spectrum(np.array([0.0, 2.0, 4.0]), np.ones(3), unit="1"))
    lines = good.read_text().splitlines()

    no_header = tmp_path / "nohead.spec"
    no_header.write_text("\n".join(lines[1:]) + "\n")
    with pytest.raises(FileFormatError, match="header"):
        read_spectrum(no_header)

    missing_field = tmp_path / "field.spec"
    missing_field.write_text(
        "# unit=1 window=none overlap=0 segments=1\n" + "\n".join(lines[1:]) + "\n"
    )
    with pytest.raises(FileFormatError, match="df_hz"):
        read_spectrum(missing_field)

    bad_row = tmp_path / "row.spec"
    bad_row.write_text("\n".join(lines[:2]) + "\n1.0;2.0\n")
    with pytest.raises(FileFormatError, match="frequency_hz,psd"):
        read_spectrum(bad_row)

    one_row = tmp_path / "onerow.spec"
    one_row.write_text("\n".join(lines[:2]) + "\n")
    with pytest.raises(FileFormatError, match="fewer than two"):
        read_spectrum(one_row)

    df_lie = tmp_path / "df.spec"
    df_lie.write_text(
        lines[0].replace("df_hz=2", "df_hz=3") + "\n" + "\n".join(lines[1:]) + "\n"
    )
    with pytest.raises(FileFormatError, match="df mismatch"):
        read_spectrum(df_lie)
