"""Sampled waveform containers on the shared simulation time grid."""
from dataclasses import dataclass

import numpy as np

from src.utils.errors import LengthMismatchError


def _frozen(values, dtype=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ComplexWaveform:
    """Uniformly sampled signal. Optical fields are in sqrt(mW)."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("waveform needs at least one sample")
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", _frozen(samples))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    @property
    def mean_power(self) -> float:
        return float(np.mean(self.power))

    def with_samples(self, samples: np.ndarray) -> "ComplexWaveform":
        return ComplexWaveform(samples, self.sample_rate)


@dataclass(frozen=True, eq=False)
class DualPolWaveform:
    """X and Y polarization field envelopes sharing length and sample rate."""

    x: ComplexWaveform
    y: ComplexWaveform

    def __post_init__(self):
        check_same_grid(self.x, self.y)

    @classmethod
    def from_arrays(cls, x: np.ndarray, y: np.ndarray, sample_rate: float) -> "DualPolWaveform":
        return cls(ComplexWaveform(x, sample_rate), ComplexWaveform(y, sample_rate))

    def __len__(self) -> int:
        return len(self.x)

    @property
    def sample_rate(self) -> float:
        return self.x.sample_rate

    @property
    def total_power(self) -> np.ndarray:
        """Instantaneous |x|^2 + |y|^2 in mW."""
        return self.x.power + self.y.power

    @property
    def mean_power(self) -> float:
        return float(np.mean(self.total_power))

    def map(self, fn) -> "DualPolWaveform":
        """Apply the same array transform to both polarizations."""
        return DualPolWaveform.from_arrays(fn(self.x.samples), fn(self.y.samples), self.sample_rate)


def check_same_grid(*waves: ComplexWaveform) -> None:
    """Raise LengthMismatchError unless all waveforms share length and rate."""
    first = waves[0]
    for wave in waves[1:]:
        if len(wave) != len(first):
            raise LengthMismatchError(f"waveform lengths differ: {len(first)} vs {len(wave)}")
        if wave.sample_rate != first.sample_rate:
            raise LengthMismatchError(
                f"sample rates differ: {first.sample_rate} vs {wave.sample_rate}"
            )
