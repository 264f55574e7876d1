"""Near-field emission of a touch electrode driven by a trapezoidal pulse.

The electrode is treated as a capacitance to ground. Its displacement current
``i = C dV/dt`` is mapped to a probe voltage through a flat coupling gain
(1 V/A at 0 dB) and the preamplifier gain, and measured with the receiver.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

from .errors import InvalidParams
from .receiver import (
    ReceiverSettings,
    Spectrum,
    band_power,
    comb_peaks,
    sweep,
)
from .waveform import SampledWaveform, TrapezoidSpec, Unit, displacement_current, synth_trapezoid

EDGE_SCALED = "scaled"
EDGE_FIXED = "fixed"


def _default_pulse() -> TrapezoidSpec:
    return TrapezoidSpec(frequency=1e6, v_low=0.0, v_high=5.0, duty=0.5, rise=20e-9, fall=20e-9)


@dataclass(frozen=True)
class ElectrodeDrive:
    pulse: TrapezoidSpec = field(default_factory=_default_pulse)
    c_electrode: float = 10e-12
    field_rejection_db: float = 30.0  # probe selectivity, metadata only
    preamp_gain_db: float = 38.0
    coupling_gain_db: float = 0.0
    edge_mode: str = EDGE_SCALED

    def __post_init__(self) -> None:
        if not self.c_electrode > 0:
            raise InvalidParams("c_electrode must be positive")
        if self.edge_mode not in (EDGE_SCALED, EDGE_FIXED):
            raise InvalidParams(f"edge_mode must be '{EDGE_SCALED}' or '{EDGE_FIXED}'")

    @property
    def chain_gain_db(self) -> float:
        return self.coupling_gain_db + self.preamp_gain_db

    def pulse_at(self, frequency: float) -> TrapezoidSpec:
        if self.edge_mode == EDGE_SCALED:
            return self.pulse.time_scaled(frequency)
        return self.pulse.at_frequency(frequency)

    def to_dict(self) -> dict:
        return asdict(self)


def probe_voltage(d: ElectrodeDrive, duration: float, sample_rate: float) -> SampledWaveform:
    """Voltage at the receiver input for the drive ``d`` (pulse used as given)."""
    v = synth_trapezoid(d.pulse, duration, sample_rate)
    i = displacement_current(v, d.c_electrode)
    gain = 10.0 ** (d.chain_gain_db / 20.0)
    return SampledWaveform(sample_rate, i.samples * gain, Unit.VOLTS)


def electrode_emission(
    d: ElectrodeDrive, s: ReceiverSettings, duration: float, sample_rate: float, workers: int = 1
) -> Spectrum:
    """Receiver spectrum of the probe voltage for the drive ``d``.

    A zero peak-to-peak drive gives a floor-only spectrum.
    """
    return sweep(probe_voltage(d, duration, sample_rate), s, workers=workers)


def default_sample_rate(s: ReceiverSettings, pulse: TrapezoidSpec | None = None) -> float:
    """2.5 x f_stop, raised so drive edges span >= 2 samples, rounded up to 1 MHz."""
    fs = 2.5 * s.f_stop
    if pulse is not None:
        fs = max(fs, 2.0 / min(pulse.rise, pulse.fall))
    return math.ceil(fs / 1e6) * 1e6


def _zoom_settings(f0: float, s: ReceiverSettings) -> ReceiverSettings:
    rbw = min(s.rbw, f0 / 4.0)
    return ReceiverSettings(f_start=0.5 * f0, f_stop=1.5 * f0, rbw=rbw, overlap=s.overlap, detector=s.detector)


def fundamental_level(
    d: ElectrodeDrive, f0: float, s: ReceiverSettings, spectrum: Spectrum | None = None
) -> tuple[float, float, float]:
    """(frequency, level, bin width) of the strongest line near the drive frequency.

    When ``f0`` is inside the main span and at least twice the RBW the main
    spectrum is used; otherwise a narrow zoom sweep with RBW <= f0/4 is run
    on a record sampled just fast enough for the drive edges.
    """
    if spectrum is not None and s.f_start <= f0 <= s.f_stop and f0 >= 2 * s.rbw:
        spec = spectrum
        tol = min(max(4 * spec.bin_width, f0 / 4), f0 / 2)
    else:
        zs = _zoom_settings(f0, s)
        pulse = d.pulse_at(f0)
        fs = max(4.0 * zs.f_stop, 2.0 / min(pulse.rise, pulse.fall))
        # round up to an integer number of samples per drive period
        fs = math.ceil(fs / f0) * f0
        duration = max(zs.min_duration * 1.05, 4.0 / f0)
        spec = electrode_emission(replace(d, pulse=pulse), zs, duration, fs)
        tol = f0 / 4
    mask = abs(spec.freqs - f0) <= tol
    idx = mask.nonzero()[0]
    i = int(idx[spec.levels[idx].argmax()])
    return float(spec.freqs[i]), float(spec.levels[i]), spec.bin_width


@dataclass(frozen=True)
class SweepRow:
    drive_freq_hz: float
    fundamental_freq_hz: float
    fundamental_dbuv: float
    band_power_dbuv: float
    fundamental_bin_hz: float


def frequency_sweep_report(
    d: ElectrodeDrive,
    freqs: list[float],
    s: ReceiverSettings,
    duration: float | None = None,
    sample_rate: float | None = None,
    workers: int = 1,
) -> list[SweepRow]:
    """Fundamental level and in-span band power for each drive frequency.

    The drive pulse keeps its shape (``edge_mode='scaled'``) or its edge
    times (``'fixed'``) as the repetition frequency changes.
    """
    if not freqs:
        raise InvalidParams("freqs must not be empty")
    rows = []
    for f0 in freqs:
        local = replace(d, pulse=d.pulse_at(f0))
        fs = sample_rate or default_sample_rate(s, local.pulse)
        dur = duration or max(s.min_duration * 1.05, 2.0 / f0)
        spec = electrode_emission(local, s, dur, fs, workers=workers)
        f_fund, level, bin_hz = fundamental_level(local, f0, s, spec)
        rows.append(SweepRow(f0, f_fund, level, band_power(spec, s.f_start, s.f_stop), bin_hz))
    return rows


def harmonic_levels(spec: Spectrum, f0: float, n_max: int, prominence_db: float = 6.0) -> dict[int, float]:
    return {n: lv for n, _, lv in comb_peaks(spec, f0, n_max, prominence_db)}
