"""LISN measurement port and common/differential-mode algebra for the two rails.

Network per rail (supply side is an AC short)::

    rail node --+-- L_line -- supply (AC ground)
                |
                +-- (C_couple || R_bleed) --+-- R_meas (50 ohm port) -- ground

The transfer impedance from injected rail current to port voltage is

    Z(s) = R_meas * s L / (s L + R_meas + Z_cb(s)),   Z_cb = R_bleed / (1 + s R_bleed C)

which vanishes at DC and tends to R_meas at high frequency.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy import signal

from .errors import InvalidParams, LengthMismatch, SampleRateMismatch
from .waveform import SampledWaveform, Unit, require_unit

log = logging.getLogger(__name__)

PORT_RESISTANCE = 50.0


@dataclass(frozen=True)
class LisnModel:
    line_inductance: float = 50e-6
    measurement_resistance: float = PORT_RESISTANCE
    coupling_capacitance: float = 0.1e-6
    bleed_resistance: float = 1e3

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not value > 0:
                raise InvalidParams(f"{name} must be positive")
        if self.measurement_resistance != PORT_RESISTANCE:
            raise InvalidParams("measurement_resistance is fixed at 50 ohm")

    def to_dict(self) -> dict:
        return asdict(self)

    def transfer_coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Analog numerator/denominator of Z(s) in descending powers of s."""
        L = self.line_inductance
        R = self.measurement_resistance
        C = self.coupling_capacitance
        Rb = self.bleed_resistance
        num = np.array([R * L * Rb * C, R * L, 0.0])
        den = np.array([L * Rb * C, L + R * Rb * C, R + Rb])
        return num, den

    def impedance(self, f: np.ndarray | float) -> np.ndarray:
        """Analytic transfer impedance Z(j 2 pi f) in ohms (complex)."""
        s = 2j * np.pi * np.asarray(f, dtype=float)
        L = self.line_inductance
        R = self.measurement_resistance
        z_cb = self.bleed_resistance / (1.0 + s * self.bleed_resistance * self.coupling_capacitance)
        return R * s * L / (s * L + R + z_cb)


def discretize(model: LisnModel, sample_rate: float, prewarp: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear-transform Z(s) to a digital filter (b, a).

    With ``prewarp`` the digital and analog responses agree exactly at that
    frequency instead of only at DC.
    """
    num, den = model.transfer_coefficients()
    fs = sample_rate
    if prewarp is not None:
        if not 0 < prewarp < sample_rate / 2:
            raise InvalidParams("prewarp frequency must lie strictly inside (0, fs/2)")
        # bilinear uses s = 2 fs (z-1)/(z+1); match at prewarp by rescaling fs
        wd = 2 * np.pi * prewarp
        fs = wd / (2.0 * np.tan(wd / (2.0 * sample_rate)))
    return signal.bilinear(num, den, fs=fs)


def digital_impedance(model: LisnModel, sample_rate: float, f: np.ndarray, prewarp: float | None = None) -> np.ndarray:
    b, a = discretize(model, sample_rate, prewarp)
    _, h = signal.freqz(b, a, worN=np.asarray(f, dtype=float), fs=sample_rate)
    return h


@dataclass(frozen=True)
class PortVoltages:
    v_p: SampledWaveform
    v_n: SampledWaveform

    def __post_init__(self) -> None:
        _check_pair(self.v_p, self.v_n)
        require_unit(self.v_p, Unit.VOLTS)
        require_unit(self.v_n, Unit.VOLTS)


@dataclass(frozen=True)
class ModalCurrents:
    i_cm: SampledWaveform
    i_dm: SampledWaveform

    def __post_init__(self) -> None:
        _check_pair(self.i_cm, self.i_dm)
        require_unit(self.i_cm, Unit.AMPERES)
        require_unit(self.i_dm, Unit.AMPERES)


def _check_pair(a: SampledWaveform, b: SampledWaveform) -> None:
    if a.sample_rate != b.sample_rate:
        raise SampleRateMismatch(f"sample rates differ: {a.sample_rate} vs {b.sample_rate}")
    if len(a) != len(b):
        raise LengthMismatch(f"lengths differ: {len(a)} vs {len(b)}")


def modal_compose(m: ModalCurrents) -> PortVoltages:
    r = PORT_RESISTANCE
    cm, dm = m.i_cm.samples, m.i_dm.samples
    return PortVoltages(
        m.i_cm.with_samples(r * (cm + dm), Unit.VOLTS),
        m.i_cm.with_samples(r * (cm - dm), Unit.VOLTS),
    )


def modal_decompose(pv: PortVoltages) -> ModalCurrents:
    vp, vn = pv.v_p.samples, pv.v_n.samples
    return ModalCurrents(
        pv.v_p.with_samples((vp + vn) / (2 * PORT_RESISTANCE), Unit.AMPERES),
        pv.v_p.with_samples((vp - vn) / (2 * PORT_RESISTANCE), Unit.AMPERES),
    )


def rail_currents(m: ModalCurrents) -> tuple[SampledWaveform, SampledWaveform]:
    """Currents injected into the +rail and -rail LISNs for given modal currents."""
    cm, dm = m.i_cm.samples, m.i_dm.samples
    return m.i_cm.with_samples(cm + dm), m.i_cm.with_samples(cm - dm)


def lisn_response(
    rail_currents: tuple[SampledWaveform, SampledWaveform],
    model: LisnModel | None = None,
    prewarp: float | None = None,
    f_max: float | None = None,
) -> PortVoltages:
    """Port voltages produced by the +rail and -rail currents.

    Each rail runs through the discretized transfer impedance starting from
    rest. ``f_max`` is only used to warn when the sample rate is below ten
    times the highest frequency of interest.
    """
    model = model or LisnModel()
    i_p, i_n = rail_currents
    _check_pair(i_p, i_n)
    require_unit(i_p, Unit.AMPERES)
    require_unit(i_n, Unit.AMPERES)
    fs = i_p.sample_rate
    if f_max is not None and fs < 10 * f_max:
        log.warning("LISN sample rate %.3g Hz is below 10 x %.3g Hz; bilinear warping is significant", fs, f_max)
    b, a = discretize(model, fs, prewarp)
    v_p = signal.lfilter(b, a, i_p.samples)
    v_n = signal.lfilter(b, a, i_n.samples)
    return PortVoltages(i_p.with_samples(v_p, Unit.VOLTS), i_n.with_samples(v_n, Unit.VOLTS))
