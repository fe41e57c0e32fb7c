import struct

import numpy as np
import pytest
from scipy.io import wavfile

from stringlab.io import (
    FormatError,
    read_field,
    read_wav,
    write_field,
    write_field_csv,
    write_wav,
)


def test_wav_header_is_ieee_float_mono(tmp_path):
    path = tmp_path / "t.wav"
    data = 0.001 * np.sin(np.linspace(0, 20, 1000))
    write_wav(path, data, 48000)
    raw = path.read_bytes()
    assert raw[:4] == b"RIFF"
    assert raw[8:12] == b"WAVE"
    assert raw[12:16] == b"fmt "
    fmt_tag, channels = struct.unpack("<HH", raw[20:24])
    rate = struct.unpack("<I", raw[24:28])[0]
    bits = struct.unpack("<H", raw[34:36])[0]
    assert fmt_tag == 3  # IEEE float
    assert channels == 1
    assert rate == 48000
    assert bits == 32


def test_wav_round_trip_preserves_absolute_scale(tmp_path):
    path = tmp_path / "t.wav"
    data = (1e-4 * np.sin(np.linspace(0, 50, 4800))).astype(np.float32)
    write_wav(path, data, 48000)
    rate, back = read_wav(path)
    assert rate == 48000
    np.testing.assert_array_equal(back, data)


def test_read_wav_rejects_pcm(tmp_path):
    path = tmp_path / "pcm.wav"
    wavfile.write(path, 48000, (np.zeros(100)).astype(np.int16))
    with pytest.raises(FormatError):
        read_wav(path)


def test_field_round_trip(tmp_path):
    path = tmp_path / "field.f64"
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((17, 93))
    write_field(path, vals, dt=1 / 48000, x0=-0.5, dx=1 / 16)
    back, header = read_field(path)
    np.testing.assert_array_equal(back, vals)
    assert header["rows"] == 17
    assert header["cols"] == 93
    assert header["dtype"] == "<f8"
    # raw payload is exactly rows*cols little-endian doubles
    assert path.stat().st_size == 17 * 93 * 8


def test_field_size_mismatch_detected(tmp_path):
    path = tmp_path / "field.f64"
    write_field(path, np.zeros((4, 10)), dt=1 / 48000.0, x0=-0.5, dx=0.25)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(FormatError):
        read_field(path)


def test_field_csv(tmp_path):
    path = tmp_path / "f.csv"
    write_field_csv(path, np.arange(6.0).reshape(2, 3))
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 2
    assert [float(v) for v in lines[1].split(",")] == [3.0, 4.0, 5.0]
