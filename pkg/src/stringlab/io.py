"""File formats: float32 WAV audio, raw float64 field dumps, CSV exports.

WAV files are mono IEEE-float (format tag 3), samples written as raw
physical displacement with no normalization: absolute scale must survive
the round trip for SDR comparisons against the solver.

A field dump is a flat little-endian float64 binary (row-major, rows =
space, cols = time) next to a small JSON header describing the grid.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import StringlabError


class FormatError(StringlabError):
    """File contents do not match the expected format."""


def write_wav(path, data, sample_rate: int = 48000) -> None:
    data = np.asarray(data)
    wavfile.write(str(path), int(sample_rate), data.astype(np.float32))


def read_wav(path) -> tuple[int, np.ndarray]:
    rate, data = wavfile.read(str(path))
    if data.dtype != np.float32:
        raise FormatError(f"{path}: expected float32 samples, got {data.dtype}")
    return int(rate), data


def write_field(path, values: np.ndarray, dt: float, x0: float, dx: float) -> None:
    """Raw float64 dump of a (space x time) array plus JSON sidecar header."""
    path = Path(path)
    arr = np.ascontiguousarray(values, dtype="<f8")
    arr.tofile(path)
    header = {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "dtype": "<f8",
        "layout": "row-major, rows = space, cols = time",
        "dt": dt,
        "x0": x0,
        "dx": dx,
    }
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(header, indent=2))


def read_field(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    header = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    data = np.fromfile(path, dtype="<f8")
    rows, cols = header["rows"], header["cols"]
    if data.size != rows * cols:
        raise FormatError(f"{path}: {data.size} values, header says {rows}x{cols}")
    return data.reshape(rows, cols), header


def write_field_csv(path, values: np.ndarray) -> None:
    np.savetxt(str(path), values, delimiter=",")


def write_csv(path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")
