"""Simulation toolkit for a self-oscillating capacitive touch-sensing circuit
and its conducted and near-field emissions."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    EmptyBand,
    InvalidParams,
    InvalidSpec,
    LengthMismatch,
    MissingArtifact,
    NegativeInput,
    NonOscillating,
    OutOfRange,
    SampleRateMismatch,
    SimulationError,
    TooShort,
    TouchEmcError,
    UnderSampled,
    UnitMismatch,
)
from .lisn import (  # noqa: E402
    LisnModel,
    ModalCurrents,
    PortVoltages,
    lisn_response,
    modal_compose,
    modal_decompose,
)
from .nearfield import ElectrodeDrive, electrode_emission, frequency_sweep_report  # noqa: E402
from .oscillator import (  # noqa: E402
    CircuitParams,
    TimingSolution,
    capacitance_from_duty,
    simulate_relaxation_transient,
    timing_from_params,
)
from .receiver import (  # noqa: E402
    FLOOR_DBUV,
    Detector,
    ReceiverSettings,
    Spectrum,
    band_power,
    comb_peaks,
    sweep,
    to_dbuv,
)
from .scenario import Scenario, conducted_emission_pipeline  # noqa: E402
from .waveform import (  # noqa: E402
    SampledWaveform,
    TrapezoidSpec,
    Unit,
    differentiate,
    displacement_current,
    synth_trapezoid,
)

__all__ = [
    "__version__",
    "CircuitParams",
    "ConfigError",
    "Detector",
    "ElectrodeDrive",
    "EmptyBand",
    "FLOOR_DBUV",
    "InvalidParams",
    "InvalidSpec",
    "LengthMismatch",
    "LisnModel",
    "MissingArtifact",
    "ModalCurrents",
    "NegativeInput",
    "NonOscillating",
    "OutOfRange",
    "PortVoltages",
    "ReceiverSettings",
    "SampleRateMismatch",
    "SampledWaveform",
    "Scenario",
    "SimulationError",
    "Spectrum",
    "TimingSolution",
    "TooShort",
    "TouchEmcError",
    "TrapezoidSpec",
    "UnderSampled",
    "Unit",
    "UnitMismatch",
    "band_power",
    "capacitance_from_duty",
    "comb_peaks",
    "conducted_emission_pipeline",
    "differentiate",
    "displacement_current",
    "electrode_emission",
    "frequency_sweep_report",
    "lisn_response",
    "modal_compose",
    "modal_decompose",
    "simulate_relaxation_transient",
    "sweep",
    "synth_trapezoid",
    "timing_from_params",
    "to_dbuv",
]
