"""CSV and manifest files.

All CSVs have a header row, use '.' as the decimal point, no thousands
separators and LF line endings. Floats are written with ``repr`` (shortest
round-trip form) so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import MissingArtifact
from .receiver import Spectrum
from .waveform import SampledWaveform

SPECTRUM_HEADER = ("freq_hz", "level_dbuv")
NEARFIELD_HEADER = ("drive_freq_hz", "fundamental_dbuv", "band_power_dbuv")
WAVEFORM_HEADER = ("time_s", "value")
HARMONICS_HEADER = ("harmonic", "freq_hz", "level_dbuv")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def read_rows(path: Path, header: Sequence[str]) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact(f"missing file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got is None or tuple(got) != tuple(header):
            raise MissingArtifact(f"{path}: expected header {','.join(header)}")
        data = [[float(v) for v in row] for row in reader if row]
    return np.array(data, dtype=float).reshape(-1, len(header))


def write_spectrum(path: Path, spec: Spectrum) -> Path:
    return write_rows(path, SPECTRUM_HEADER, zip(spec.freqs, spec.levels))


def read_spectrum(path: Path) -> Spectrum:
    data = read_rows(path, SPECTRUM_HEADER)
    return Spectrum(data[:, 0], data[:, 1])


def write_waveform(path: Path, w: SampledWaveform) -> Path:
    return write_rows(path, WAVEFORM_HEADER, zip(w.times, w.samples))


def write_manifest(path: Path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_manifest(path: Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact(f"missing manifest: {path}")
    return json.loads(path.read_text(encoding="utf-8"))
