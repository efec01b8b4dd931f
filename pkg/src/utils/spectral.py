"""Frequency-domain helpers shared by the driver, fiber and receiver models.

All filtering treats the record as circular; callers discard a guard interval at
the record edges before measuring anything.
"""
import math
from typing import Optional

import numpy as np
from numpy.fft import fft, ifft, fftfreq


def frequency_grid(n_samples: int, sample_rate: float) -> np.ndarray:
    """FFT-ordered baseband frequency axis in Hz."""
    return fftfreq(n_samples, d=1.0 / sample_rate)


def single_pole_response(freqs: np.ndarray, f3db_hz: Optional[float]) -> np.ndarray:
    """H(f) = 1 / (1 + j f / f3dB); a missing or infinite corner is a bypass."""
    if f3db_hz is None or math.isinf(f3db_hz):
        return np.ones_like(freqs, dtype=complex)
    return 1.0 / (1.0 + 1j * freqs / f3db_hz)


def apply_frequency_response(samples: np.ndarray, response: np.ndarray) -> np.ndarray:
    """Multiply the spectrum of ``samples`` by ``response``.

    Real input stays real when the response is Hermitian-symmetric.
    """
    out = ifft(fft(samples) * response)
    if not np.iscomplexobj(samples):
        return out.real
    return out
