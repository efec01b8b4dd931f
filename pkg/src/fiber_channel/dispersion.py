"""Linear SSMF propagation: chromatic dispersion and attenuation."""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.constants import c

from src.signal_core.waveforms import DualPolWaveform
from src.utils.spectral import apply_frequency_response, frequency_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiberConfig:
    length_km: float = 0.0
    dispersion_ps_nm_km: float = 17.0
    attenuation_db_km: float = 0.2
    wavelength_nm: float = 1550.0

    def __post_init__(self):
        if self.length_km < 0:
            raise ValueError(f"length_km must be >= 0, got {self.length_km}")
        if self.attenuation_db_km < 0:
            raise ValueError(f"attenuation_db_km must be >= 0, got {self.attenuation_db_km}")
        if not self.wavelength_nm > 0:
            raise ValueError(f"wavelength_nm must be positive, got {self.wavelength_nm}")

    @property
    def beta2(self) -> float:
        """Group-velocity dispersion in s^2/m."""
        d_si = self.dispersion_ps_nm_km * 1e-6  # ps/(nm km) -> s/m^2
        wavelength = self.wavelength_nm * 1e-9
        return -d_si * wavelength ** 2 / (2 * np.pi * c)

    @property
    def loss_db(self) -> float:
        return self.attenuation_db_km * self.length_km


def cd_response(n_samples: int, sample_rate: float, beta2_l: float) -> np.ndarray:
    """All-pass H(w) = exp(-j (beta2 L / 2) w^2) for accumulated beta2*L in s^2."""
    omega = 2 * np.pi * frequency_grid(n_samples, sample_rate)
    return np.exp(-1j * (beta2_l / 2) * omega ** 2)


def apply_cd(field: DualPolWaveform, cfg: FiberConfig) -> DualPolWaveform:
    """Chromatic dispersion on both polarizations (frequency domain, circular)."""
    if cfg.length_km == 0 or cfg.dispersion_ps_nm_km == 0:
        return field
    beta2_l = cfg.beta2 * cfg.length_km * 1e3
    response = cd_response(len(field), field.sample_rate, beta2_l)
    logger.debug(f"CD: beta2*L = {beta2_l:.3e} s^2 over {cfg.length_km} km")
    return field.map(lambda samples: apply_frequency_response(samples, response))


def attenuate(field: DualPolWaveform, cfg: FiberConfig) -> DualPolWaveform:
    """Scale both polarizations by 10^(-alpha L / 20)."""
    if cfg.loss_db == 0:
        return field
    scale = 10 ** (-cfg.loss_db / 20)
    return field.map(lambda samples: samples * scale)


def propagate(field: DualPolWaveform, cfg: FiberConfig) -> DualPolWaveform:
    """Dispersion followed by span loss."""
    return attenuate(apply_cd(field, cfg), cfg)
