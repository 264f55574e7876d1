"""End-to-end conducted-emission pipeline.

oscillator transient -> DM supply draw and CM displacement current -> rail
currents -> LISN ports -> receiver sweeps of V_P and V_N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams
from .lisn import LisnModel, ModalCurrents, PortVoltages, lisn_response, rail_currents
from .oscillator import CircuitParams, TimingSolution, simulate_relaxation_transient, timing_from_params
from .receiver import ReceiverSettings, Spectrum, sweep
from .waveform import SampledWaveform, Unit, differentiate, displacement_current


@dataclass(frozen=True)
class Scenario:
    circuit: CircuitParams
    duration: float
    sample_rate: float
    parasitic_cm_capacitance: float = 10e-12
    lisn: LisnModel = field(default_factory=LisnModel)
    receiver: ReceiverSettings = field(default_factory=ReceiverSettings)
    label: str = "scenario"
    lisn_prewarp: float | None = None

    def __post_init__(self) -> None:
        if self.parasitic_cm_capacitance < 0:
            raise InvalidParams("parasitic_cm_capacitance must be >= 0")
        if not self.sample_rate > 2 * self.receiver.f_stop:
            raise InvalidParams("sample_rate must exceed 2 x receiver f_stop")
        if not self.duration > 0:
            raise InvalidParams("duration must be positive")


def default_duration(circuit: CircuitParams, receiver: ReceiverSettings) -> float:
    """Long enough for 10 oscillation periods and the receiver's 10/RBW record."""
    period = timing_from_params(circuit).period
    return max(10.5 * period, 1.05 * receiver.min_duration)


def default_sample_rate(circuit: CircuitParams, receiver: ReceiverSettings) -> float:
    """Ten times f_stop (LISN discretization margin), at least 100 x fosc."""
    fs = max(10.0 * receiver.f_stop, 100.0 * timing_from_params(circuit).f_osc)
    return math.ceil(fs / 1e6) * 1e6


def supply_currents(
    v_out: SampledWaveform, circuit: CircuitParams, parasitic_cm_capacitance: float
) -> ModalCurrents:
    """Modal currents drawn by the behavioural oscillator.

    DM: the integrator ramp current v_out/Rref plus the edge charge that the
    output delivers into the sensing capacitance, Csen * dv_out/dt.
    CM: displacement current of the output node through the parasitic path
    to the reference, Ccm * dv_out/dt.
    """
    dvdt = differentiate(v_out).samples
    i_dm = v_out.samples / circuit.r_ref + circuit.c_sen * dvdt
    if parasitic_cm_capacitance > 0:
        i_cm = displacement_current(v_out, parasitic_cm_capacitance)
    else:
        i_cm = v_out.with_samples(np.zeros(len(v_out)), Unit.AMPERES)
    return ModalCurrents(i_cm, v_out.with_samples(i_dm, Unit.AMPERES))


@dataclass(frozen=True)
class ConductedResult:
    spectrum_p: Spectrum
    spectrum_n: Spectrum
    modal: ModalCurrents
    ports: PortVoltages
    timing: TimingSolution
    measured: TimingSolution
    v_out: SampledWaveform


def run_conducted(sc: Scenario, workers: int = 1) -> ConductedResult:
    timing = timing_from_params(sc.circuit)
    v_out, _, measured = simulate_relaxation_transient(sc.circuit, sc.duration, sc.sample_rate)
    modal = supply_currents(v_out, sc.circuit, sc.parasitic_cm_capacitance)
    ports = lisn_response(rail_currents(modal), sc.lisn, prewarp=sc.lisn_prewarp, f_max=sc.receiver.f_stop)
    spec_p = sweep(ports.v_p, sc.receiver, workers=workers)
    spec_n = sweep(ports.v_n, sc.receiver, workers=workers)
    return ConductedResult(spec_p, spec_n, modal, ports, timing, measured, v_out)


def conducted_emission_pipeline(sc: Scenario, workers: int = 1) -> tuple[Spectrum, Spectrum, ModalCurrents]:
    r = run_conducted(sc, workers=workers)
    return r.spectrum_p, r.spectrum_n, r.modal
