"""Timing model of the self-oscillating capacitance-to-time converter.

Closed form::

    K     = R1 / R2
    J     = (Csen - Coff) / CInt
    Ton   = Rref * CInt * K
    Toff  = Rref * CInt * (K - 2J)
    fosc  = 1 / (Ton + Toff)

plus the inverse (duty cycle to sensing capacitance) and a behavioural
transient simulator that reproduces the timing without using the formulas.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidParams, NonOscillating, OutOfRange, TooShort, UnderSampled
from .waveform import SampledWaveform, Unit


@dataclass(frozen=True)
class CircuitParams:
    r1: float
    r2: float
    r_ref: float
    c_int: float
    c_off: float
    c_sen: float
    v_rail: float = 2.5
    edge_time: float = 10e-9

    def __post_init__(self) -> None:
        for name in ("r1", "r2", "r_ref", "c_int", "c_off", "c_sen", "v_rail"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParams(f"{name} must be a positive finite number, got {value!r}")
        if self.c_sen < self.c_off:
            raise InvalidParams("c_sen must not be below c_off (negative J)")
        if not (math.isfinite(self.edge_time) and self.edge_time >= 0):
            raise InvalidParams("edge_time must be >= 0")

    @property
    def k(self) -> float:
        return self.r1 / self.r2

    @property
    def j(self) -> float:
        return (self.c_sen - self.c_off) / self.c_int

    def replace(self, **changes) -> "CircuitParams":
        return CircuitParams(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TimingSolution:
    k: float
    j: float
    t_on: float
    t_off: float
    f_osc: float
    duty: float

    @property
    def period(self) -> float:
        return self.t_on + self.t_off

    def to_dict(self) -> dict:
        return asdict(self)


def _solution(k: float, j: float, t_on: float, t_off: float) -> TimingSolution:
    period = t_on + t_off
    return TimingSolution(k=k, j=j, t_on=t_on, t_off=t_off, f_osc=1.0 / period, duty=t_on / period)


def timing_from_params(p: CircuitParams) -> TimingSolution:
    k, j = p.k, p.j
    if k <= 2.0 * j:
        raise NonOscillating(f"K={k:g} <= 2J={2 * j:g}: off-time would be non-positive")
    tau = p.r_ref * p.c_int
    t_on = tau * k
    t_off = tau * (k - 2.0 * j)
    if p.edge_time >= min(t_on, t_off):
        raise InvalidParams("edge_time must be shorter than both Ton and Toff")
    return _solution(k, j, t_on, t_off)


def capacitance_from_duty(duty: float, p: CircuitParams) -> float:
    """Sensing capacitance that produces ``duty``; ``p.c_sen`` is ignored."""
    if not (0.5 <= duty < 1.0):
        raise OutOfRange(f"duty {duty!r} outside [0.5, 1)")
    return p.c_off + p.c_int * p.k * (2.0 * duty - 1.0) / (2.0 * duty)


def _switching_times(p: CircuitParams, t_end: float) -> list[float]:
    """Integrate the behavioural integrator node and return switching instants.

    The node ramps at +-v_rail/(Rref*CInt) between hysteresis thresholds
    +-v_rail*K/2. Entering the off phase it receives a charge-injection step
    of 2*v_rail*J towards the off-phase threshold.
    """
    slope = p.v_rail / (p.r_ref * p.c_int)
    upper = 0.5 * p.v_rail * p.k
    lower = -upper
    injection = 2.0 * p.v_rail * p.j

    events: list[float] = []
    t = 0.0
    node = lower
    on = True
    while t < t_end:
        target = upper if on else lower
        remaining = abs(target - node)
        t += remaining / slope
        events.append(t)
        if on:
            node = upper - injection
            if node <= lower:
                raise NonOscillating("charge injection crosses the lower threshold")
        else:
            node = lower
        on = not on
    return events


def _node_waveform(p: CircuitParams, events: np.ndarray, t: np.ndarray) -> np.ndarray:
    slope = p.v_rail / (p.r_ref * p.c_int)
    upper = 0.5 * p.v_rail * p.k
    lower = -upper
    starts = np.concatenate(([0.0], events))
    # phase index 0 is on (rising from lower), odd phases are off
    idx = np.searchsorted(starts, t, side="right") - 1
    on = idx % 2 == 0
    start_level = np.where(on, lower, upper - 2.0 * p.v_rail * p.j)
    direction = np.where(on, 1.0, -1.0)
    return start_level + direction * slope * (t - starts[idx])


def _output_waveform(p: CircuitParams, events: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Rail-to-rail output with linear edges of width ``edge_time`` centred on each switch."""
    high, low = p.v_rail, -p.v_rail
    if p.edge_time == 0.0:
        idx = np.searchsorted(events, t, side="right")
        return np.where(idx % 2 == 0, high, low)
    half = 0.5 * p.edge_time
    xp = np.empty(2 * events.size + 1)
    fp = np.empty_like(xp)
    xp[0], fp[0] = 0.0, high
    xp[1::2] = events - half
    xp[2::2] = events + half
    before = np.where(np.arange(events.size) % 2 == 0, high, low)
    fp[1::2] = before
    fp[2::2] = -before
    return np.interp(t, xp, fp)


def _crossings(t: np.ndarray, v: np.ndarray, level: float) -> tuple[np.ndarray, np.ndarray]:
    s = v - level
    rising = np.flatnonzero((s[:-1] < 0) & (s[1:] >= 0))
    falling = np.flatnonzero((s[:-1] >= 0) & (s[1:] < 0))

    def interp(i: np.ndarray) -> np.ndarray:
        frac = s[i] / (s[i] - s[i + 1])
        return t[i] + frac * (t[i + 1] - t[i])

    return interp(rising), interp(falling)


def measure_timing(v_out: SampledWaveform, p: CircuitParams) -> TimingSolution:
    """Extract Ton/Toff from 50 %-of-swing crossings of the output waveform."""
    v = v_out.samples
    mid = 0.5 * (v.max() + v.min())
    rises, falls = _crossings(v_out.times, v, mid)
    if rises.size < 1 or falls.size < 2:
        raise TooShort("fewer than one complete oscillation period in the transient")
    on_times, off_times = [], []
    for r in rises:
        before = falls[falls < r]
        after = falls[falls > r]
        if before.size:
            off_times.append(r - before[-1])
        if after.size:
            on_times.append(after[0] - r)
    if not on_times or not off_times:
        raise TooShort("fewer than one complete oscillation period in the transient")
    t_on = float(np.mean(on_times))
    t_off = float(np.mean(off_times))
    tau = p.r_ref * p.c_int
    k = t_on / tau
    return _solution(k, 0.5 * (k - t_off / tau), t_on, t_off)


def simulate_relaxation_transient(
    p: CircuitParams, duration: float, sample_rate: float
) -> tuple[SampledWaveform, SampledWaveform, TimingSolution]:
    """Run the behavioural oscillator and measure its timing from the output.

    Returns ``(v_out, v_node, measured)``.
    """
    if p.k <= 2.0 * p.j:
        raise NonOscillating(f"K={p.k:g} <= 2J={2 * p.j:g}")
    # the only use of the closed form is checking preconditions
    nominal = timing_from_params(p)
    if sample_rate < 100.0 * nominal.f_osc:
        raise UnderSampled(f"sample rate must be >= 100 x fosc = {100 * nominal.f_osc:g} Hz")
    if duration < 10.0 * nominal.period * (1 - 1e-12):
        raise TooShort("duration must cover at least 10 oscillation periods")

    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    events = np.asarray(_switching_times(p, t[-1] + p.edge_time))
    v_out = SampledWaveform(sample_rate, _output_waveform(p, events, t), Unit.VOLTS)
    v_node = SampledWaveform(sample_rate, _node_waveform(p, events, t), Unit.VOLTS)
    return v_out, v_node, measure_timing(v_out, p)
