"""Exception hierarchy.

Model and numerical failures derive from :class:`SimulationError` so the CLI
can map them onto a single exit code.
"""

from __future__ import annotations


class TouchEmcError(Exception):
    """Base class for every error raised by this package."""


class SimulationError(TouchEmcError):
    pass


class InvalidParams(SimulationError, ValueError):
    pass


class NonOscillating(SimulationError):
    """Raised when the off-time would be zero or negative (K <= 2J)."""


class OutOfRange(SimulationError, ValueError):
    pass


class UnderSampled(SimulationError, ValueError):
    pass


class TooShort(SimulationError, ValueError):
    pass


class InvalidSpec(SimulationError, ValueError):
    pass


class UnitMismatch(SimulationError, TypeError):
    pass


class LengthMismatch(SimulationError, ValueError):
    pass


class SampleRateMismatch(SimulationError, ValueError):
    pass


class NegativeInput(SimulationError, ValueError):
    pass


class EmptyBand(SimulationError, ValueError):
    pass


class MissingArtifact(TouchEmcError):
    pass


class ConfigError(TouchEmcError):
    pass
