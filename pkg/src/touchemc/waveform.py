"""Uniformly sampled waveforms, periodic stimuli and finite-difference calculus."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, TooShort, UnderSampled, UnitMismatch


class Unit(str, enum.Enum):
    VOLTS = "V"
    AMPERES = "A"
    VOLTS_PER_SECOND = "V/s"
    AMPERES_PER_SECOND = "A/s"

    @property
    def is_derivative(self) -> bool:
        return self.value.endswith("/s")

    def derivative(self) -> "Unit":
        if self.is_derivative:
            raise UnitMismatch(f"cannot differentiate a waveform already in {self.value}")
        return Unit(self.value + "/s")


@dataclass(frozen=True, eq=False)
class SampledWaveform:
    """A uniformly sampled real time series tagged with its physical unit.

    ``samples`` is stored as a read-only float64 array so instances can be
    shared freely between threads.
    """

    sample_rate: float
    samples: np.ndarray
    unit: Unit = Unit.VOLTS
    t0: float = 0.0

    def __post_init__(self) -> None:
        arr = np.array(self.samples, dtype=np.float64, copy=True).ravel()
        if not self.sample_rate > 0:
            raise InvalidSpec(f"sample_rate must be positive, got {self.sample_rate}")
        if arr.size == 0:
            raise InvalidSpec("waveform has no samples")
        if not np.all(np.isfinite(arr)):
            raise InvalidSpec("waveform contains non-finite samples")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "unit", Unit(self.unit))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    def with_samples(self, samples: np.ndarray, unit: Unit | None = None) -> "SampledWaveform":
        return SampledWaveform(self.sample_rate, samples, unit or self.unit, self.t0)

    def scaled(self, factor: float) -> "SampledWaveform":
        return self.with_samples(self.samples * factor)


def require_unit(w: SampledWaveform, unit: Unit) -> None:
    if w.unit is not unit:
        raise UnitMismatch(f"expected waveform in {unit.value}, got {w.unit.value}")


@dataclass(frozen=True)
class TrapezoidSpec:
    """Periodic trapezoidal pulse.

    ``duty`` is the fraction of the period between the 50 % points of the
    rising and falling edges, so the time-average of one period is exactly
    ``v_low + duty * (v_high - v_low)``. The rising edge starts at t = 0.
    """

    frequency: float
    v_low: float = 0.0
    v_high: float = 5.0
    duty: float = 0.5
    rise: float = 20e-9
    fall: float = 20e-9

    def __post_init__(self) -> None:
        if not self.frequency > 0:
            raise InvalidSpec("frequency must be positive")
        # v_high == v_low is a flat (zero-swing) drive
        if not self.v_high >= self.v_low:
            raise InvalidSpec("v_high must not be below v_low")
        if not 0.0 < self.duty < 1.0:
            raise InvalidSpec("duty must lie in (0, 1)")
        if self.rise <= 0 or self.fall <= 0:
            raise InvalidSpec("rise and fall must be positive")
        period = self.period
        if not self.rise + self.fall < period:
            raise InvalidSpec("rise + fall must be shorter than the period")
        if not self.duty * period > self.rise:
            raise InvalidSpec("duty * period must exceed the rise time")
        # plateaus must be non-negative with 50 %-point duty
        half_edges = 0.5 * (self.rise + self.fall)
        if self.duty * period < half_edges or (1.0 - self.duty) * period < half_edges:
            raise InvalidSpec("edges do not fit inside the high/low intervals")

    @property
    def period(self) -> float:
        return 1.0 / self.frequency

    @property
    def v_pp(self) -> float:
        return self.v_high - self.v_low

    def time_scaled(self, frequency: float) -> "TrapezoidSpec":
        """Same shape at another frequency (edges scale with the period)."""
        ratio = self.frequency / frequency
        return TrapezoidSpec(frequency, self.v_low, self.v_high, self.duty,
                             self.rise * ratio, self.fall * ratio)

    def at_frequency(self, frequency: float) -> "TrapezoidSpec":
        """Same edges, new repetition frequency."""
        return TrapezoidSpec(frequency, self.v_low, self.v_high, self.duty,
                             self.rise, self.fall)


def trapezoid_levels(spec: TrapezoidSpec, t: np.ndarray) -> np.ndarray:
    period = spec.period
    t_high_end = spec.duty * period + 0.5 * (spec.rise - spec.fall)
    knots = [0.0, spec.rise, t_high_end, t_high_end + spec.fall, period]
    levels = [spec.v_low, spec.v_high, spec.v_high, spec.v_low, spec.v_low]
    phase = np.mod(t, period)
    return np.interp(phase, knots, levels)


def synth_trapezoid(spec: TrapezoidSpec, duration: float, sample_rate: float) -> SampledWaveform:
    if not sample_rate > 2 * spec.frequency:
        raise UnderSampled(f"sample rate {sample_rate:g} Hz does not exceed 2 x {spec.frequency:g} Hz")
    if sample_rate * min(spec.rise, spec.fall) < 2 - 1e-9:
        raise UnderSampled("edges must span at least two samples")
    n = int(round(duration * sample_rate))
    if n < 1:
        raise InvalidSpec("duration shorter than one sample")
    t = np.arange(n) / sample_rate
    return SampledWaveform(sample_rate, trapezoid_levels(spec, t), Unit.VOLTS)


def differentiate(w: SampledWaveform) -> SampledWaveform:
    """Second-order finite-difference time derivative.

    Central differences in the interior; second-order one-sided stencils at
    both ends so the result is exact for polynomials up to degree two.
    """
    if len(w) < 3:
        raise TooShort("differentiation needs at least 3 samples")
    out_unit = w.unit.derivative()
    d = np.gradient(w.samples, 1.0 / w.sample_rate, edge_order=2)
    return SampledWaveform(w.sample_rate, d, out_unit, w.t0)


def displacement_current(v: SampledWaveform, c: float) -> SampledWaveform:
    """Capacitor current ``i = C dv/dt`` for a voltage waveform."""
    require_unit(v, Unit.VOLTS)
    if not c > 0:
        raise InvalidSpec("capacitance must be positive")
    dv = differentiate(v)
    return SampledWaveform(v.sample_rate, c * dv.samples, Unit.AMPERES, v.t0)
