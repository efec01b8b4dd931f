"""CW laser source with Wiener phase noise."""
import logging
from dataclasses import dataclass

import numpy as np

from src.signal_core.waveforms import ComplexWaveform

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LaserConfig:
    power_dbm: float = 13.4
    wavelength_nm: float = 1550.0
    linewidth_hz: float = 100e3

    def __post_init__(self):
        if not self.wavelength_nm > 0:
            raise ValueError(f"wavelength_nm must be positive, got {self.wavelength_nm}")
        if self.linewidth_hz < 0:
            raise ValueError(f"linewidth_hz must be >= 0, got {self.linewidth_hz}")

    @property
    def power_mw(self) -> float:
        return 10 ** (self.power_dbm / 10)


def laser_field(cfg: LaserConfig, n_samples: int, sample_rate: float, seed) -> ComplexWaveform:
    """
    Constant-power optical carrier whose phase is a Wiener process.

    Args:
        cfg (LaserConfig): Laser parameters.
        n_samples (int): Record length.
        sample_rate (float): Samples per second.
        seed: Anything accepted by ``numpy.random.default_rng``.

    Returns:
        ComplexWaveform: Field in sqrt(mW); phase starts at 0.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    amplitude = np.sqrt(cfg.power_mw)
    if cfg.linewidth_hz == 0:
        return ComplexWaveform(np.full(n_samples, amplitude, dtype=complex), sample_rate)

    rng = np.random.default_rng(seed)
    sigma = np.sqrt(2 * np.pi * cfg.linewidth_hz / sample_rate)
    steps = rng.normal(0.0, sigma, n_samples - 1)
    phase = np.concatenate(([0.0], np.cumsum(steps)))
    logger.debug(f"Laser phase walk: final phase {phase[-1]:.3f} rad over {n_samples} samples")
    return ComplexWaveform(amplitude * np.exp(1j * phase), sample_rate)
