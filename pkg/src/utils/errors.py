"""Exception hierarchy shared by every simulator module."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class SeedZeroError(SimulationError, ValueError):
    """LFSR seed reduces to the all-zero (absorbing) state."""


class UnsupportedOrderError(SimulationError, ValueError):
    pass


class LengthMismatchError(SimulationError, ValueError):
    pass


class EmptySymbolsError(SimulationError, ValueError):
    pass


class DisabledAmplifierError(SimulationError, ValueError):
    pass


class ZeroPowerError(SimulationError, ValueError):
    pass


class DegenerateSignalError(SimulationError, ValueError):
    """Signal has no peak-to-peak span to normalize."""


class NonIntegerTapSpacingError(SimulationError, ValueError):
    pass


class DivergenceError(SimulationError):
    """Equalizer taps left the allowed magnitude range."""


class EmptySegmentError(SimulationError, ValueError):
    pass


class OffsetOutOfRangeError(SimulationError, ValueError):
    pass


class NoAlignmentError(SimulationError):
    """No rotation/delay pair brought the window BER under the failure threshold."""


class EmptyStreamsError(SimulationError, ValueError):
    pass


class IoFailureError(SimulationError, OSError):
    pass


class ConfigInvalidError(SimulationError, ValueError):
    def __init__(self, message: str, source: str = None):
        self.source = source
        prefix = f"{source}: " if source else ""
        super().__init__(f"{prefix}{message}")


class ScenarioError(SimulationError):
    """A module error raised while running a named scenario."""

    def __init__(self, scenario: str, cause: Exception):
        self.scenario = scenario
        self.cause = cause
        super().__init__(f"scenario '{scenario}' failed: {type(cause).__name__}: {cause}")
