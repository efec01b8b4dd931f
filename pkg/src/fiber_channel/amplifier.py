"""Lumped EDFA with white ASE noise over the simulated band."""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.constants import c, h

from src.signal_core.waveforms import DualPolWaveform
from src.utils.errors import DisabledAmplifierError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdfaConfig:
    enabled: bool = False
    gain_db: float = 16.0
    noise_figure_db: float = 5.0

    def __post_init__(self):
        if self.enabled:
            if self.gain_db < 0:
                raise ValueError(f"gain_db must be >= 0, got {self.gain_db}")
            if self.noise_figure_db < 3:
                raise ValueError(f"noise_figure_db must be >= 3, got {self.noise_figure_db}")


def ase_psd_mw_per_hz(cfg: EdfaConfig, wavelength_nm: float = 1550.0) -> float:
    """S_ASE = (G - 1) n_sp h nu per polarization, with n_sp = NF / 2."""
    gain = 10 ** (cfg.gain_db / 10)
    n_sp = 10 ** (cfg.noise_figure_db / 10) / 2
    nu = c / (wavelength_nm * 1e-9)
    return (gain - 1) * n_sp * h * nu * 1e3


def edfa_amplify(field: DualPolWaveform, cfg: EdfaConfig, seed, wavelength_nm: float = 1550.0) -> DualPolWaveform:
    """
    Amplify by sqrt(G) and add circular complex Gaussian ASE on each polarization.

    The noise is white over the full simulation bandwidth (the sample rate).

    Args:
        field (DualPolWaveform): Input field in sqrt(mW).
        cfg (EdfaConfig): Gain and noise figure.
        seed: ASE noise seed.
        wavelength_nm (float): Carrier wavelength for the photon energy.

    Returns:
        DualPolWaveform: Amplified noisy field.
    """
    if not cfg.enabled:
        raise DisabledAmplifierError("edfa_amplify called with a disabled amplifier")
    gain = 10 ** (cfg.gain_db / 10)
    noise_power = ase_psd_mw_per_hz(cfg, wavelength_nm) * field.sample_rate
    rng = np.random.default_rng(seed)
    n = len(field)
    sigma = np.sqrt(noise_power / 2)

    def amplify(samples):
        noise = sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        return np.sqrt(gain) * samples + noise

    logger.info(
        f"EDFA: gain {cfg.gain_db:.1f} dB, NF {cfg.noise_figure_db:.1f} dB, "
        f"ASE {noise_power:.3e} mW per polarization"
    )
    return field.map(amplify)
