"""Modulator driver amplifier with high-frequency roll-off."""
import math
from dataclasses import dataclass
from typing import Optional

from src.signal_core.waveforms import ComplexWaveform
from src.utils.spectral import apply_frequency_response, frequency_grid, single_pole_response


@dataclass(frozen=True)
class DriverConfig:
    # None (or inf) bypasses the low-pass
    f3db_hz: Optional[float] = 7e9
    gain: float = 1.0

    def __post_init__(self):
        if self.f3db_hz is not None and not self.f3db_hz > 0:
            raise ValueError(f"f3db_hz must be positive or None, got {self.f3db_hz}")

    @property
    def bypass(self) -> bool:
        return self.f3db_hz is None or math.isinf(self.f3db_hz)


def driver_lowpass(wave: ComplexWaveform, cfg: DriverConfig) -> ComplexWaveform:
    """Gain followed by a single-pole low-pass over the whole (circular) record."""
    amplified = wave.samples * cfg.gain
    if cfg.bypass:
        return wave.with_samples(amplified)
    freqs = frequency_grid(len(wave), wave.sample_rate)
    response = single_pole_response(freqs, cfg.f3db_hz)
    return wave.with_samples(apply_frequency_response(amplified, response))
