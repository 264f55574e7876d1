"""Run configuration files.

A config is a YAML mapping with a mandatory ``schema_version`` and a
``kind`` of ``conducted`` or ``nearfield``. Unknown keys are rejected.

Conducted example::

    schema_version: 1
    kind: conducted
    label: fosc-25k
    circuit: {r1: 20e3, r2: 10e3, r_ref: 10e3, c_int: 1e-9, c_off: 20e-12, c_sen: 20e-12}
    parasitic_cm_capacitance: 10e-12
    receiver: {f_start: 150e3, f_stop: 10e6}

Nearfield example::

    schema_version: 1
    kind: nearfield
    drive: {c_electrode: 10e-12, pulse: {frequency: 1e6, rise: 20e-9, fall: 20e-9}}
    drive_freqs: [1e3, 1e4, 1e5, 1e6]
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError
from .lisn import LisnModel
from .nearfield import ElectrodeDrive
from .oscillator import CircuitParams
from .receiver import ReceiverSettings
from .scenario import Scenario, default_duration, default_sample_rate
from .waveform import TrapezoidSpec

SCHEMA_VERSION = 1
KINDS = ("conducted", "nearfield")

_COMMON_KEYS = {"schema_version", "kind", "label", "output_dir", "workers", "receiver"}
_CONDUCTED_KEYS = _COMMON_KEYS | {
    "circuit", "parasitic_cm_capacitance", "lisn", "duration", "sample_rate", "lisn_prewarp",
    "export_waveforms",
}
_NEARFIELD_KEYS = _COMMON_KEYS | {"drive", "drive_freqs", "duration", "sample_rate"}


@dataclass(frozen=True)
class RunConfig:
    kind: str
    label: str
    receiver: ReceiverSettings
    output_dir: Path | None = None
    workers: int = 1
    scenario: Scenario | None = None
    export_waveforms: bool = False
    drive: ElectrodeDrive | None = None
    drive_freqs: tuple[float, ...] = ()
    duration: float | None = None
    sample_rate: float | None = None


def _number(value: Any, where: str) -> float:
    # PyYAML reads "10e-12" (no dot) as a string
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None


def _build(cls, raw: Any, where: str, nested: dict[str, Any] | None = None):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a mapping")
    allowed = {f.name: f for f in fields(cls)}
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    kwargs = {}
    for key, value in raw.items():
        if nested and key in nested:
            kwargs[key] = nested[key](value, f"{where}.{key}")
        elif key in ("detector", "edge_mode"):
            kwargs[key] = str(value)
        else:
            kwargs[key] = _number(value, f"{where}.{key}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _check_keys(raw: dict, allowed: set[str]) -> None:
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}")


def parse_config(raw: Any, base_dir: Path | None = None) -> RunConfig:
    """Validate a decoded config mapping.

    Physical-model violations (e.g. a non-oscillating circuit) propagate as
    :class:`~touchemc.errors.SimulationError`; schema problems raise
    :class:`ConfigError`.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {raw.get('schema_version')!r}")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    _check_keys(raw, _CONDUCTED_KEYS if kind == "conducted" else _NEARFIELD_KEYS)

    label = str(raw.get("label", kind))
    workers = int(_number(raw.get("workers", 1), "workers"))
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    out = raw.get("output_dir")
    output_dir = None
    if out is not None:
        output_dir = Path(out)
        if base_dir is not None and not output_dir.is_absolute():
            output_dir = base_dir / output_dir

    receiver = _build(ReceiverSettings, raw.get("receiver"), "receiver")
    if kind == "conducted":
        if "circuit" not in raw:
            raise ConfigError("conducted config needs a 'circuit' section")
        circuit = _build(CircuitParams, raw["circuit"], "circuit")
        lisn = _build(LisnModel, raw.get("lisn"), "lisn")
        duration = raw.get("duration")
        duration = _number(duration, "duration") if duration is not None else default_duration(circuit, receiver)
        fs = raw.get("sample_rate")
        fs = _number(fs, "sample_rate") if fs is not None else default_sample_rate(circuit, receiver)
        prewarp = raw.get("lisn_prewarp")
        scenario = Scenario(
            circuit=circuit,
            duration=duration,
            sample_rate=fs,
            parasitic_cm_capacitance=_number(raw.get("parasitic_cm_capacitance", 10e-12), "parasitic_cm_capacitance"),
            lisn=lisn,
            receiver=receiver,
            label=label,
            lisn_prewarp=None if prewarp is None else _number(prewarp, "lisn_prewarp"),
        )
        return RunConfig(kind, label, receiver, output_dir, workers, scenario=scenario,
                         export_waveforms=bool(raw.get("export_waveforms", False)))

    drive = _build(ElectrodeDrive, raw.get("drive"), "drive",
                   nested={"pulse": lambda v, w: _build(TrapezoidSpec, v, w)})
    freqs = raw.get("drive_freqs", [drive.pulse.frequency])
    if not isinstance(freqs, list) or not freqs:
        raise ConfigError("drive_freqs must be a non-empty list")
    freqs = tuple(_number(f, "drive_freqs[]") for f in freqs)
    duration = raw.get("duration")
    fs = raw.get("sample_rate")
    return RunConfig(
        kind, label, receiver, output_dir, workers, drive=drive, drive_freqs=freqs,
        duration=None if duration is None else _number(duration, "duration"),
        sample_rate=None if fs is None else _number(fs, "sample_rate"),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return parse_config(raw, base_dir=path.parent)
