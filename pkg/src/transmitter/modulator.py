"""Nested Mach-Zehnder IQ modulator and polarization beam combiner."""
from dataclasses import dataclass

import numpy as np

from src.signal_core.waveforms import ComplexWaveform, DualPolWaveform, check_same_grid


@dataclass(frozen=True)
class ModulatorConfig:
    v_pi: float = 3.5
    bias: str = "null"
    insertion_loss_db: float = 4.0
    carrier_split_ratio: float = 0.5

    def __post_init__(self):
        if not self.v_pi > 0:
            raise ValueError(f"v_pi must be positive, got {self.v_pi}")
        if self.bias != "null":
            raise ValueError(f"only null bias is modelled, got '{self.bias}'")
        if not 0 < self.carrier_split_ratio < 1:
            raise ValueError(
                f"carrier_split_ratio must lie in (0, 1), got {self.carrier_split_ratio}"
            )


def mzm_iq_modulate(
    carrier: ComplexWaveform,
    drive_i: ComplexWaveform,
    drive_q: ComplexWaveform,
    cfg: ModulatorConfig,
) -> ComplexWaveform:
    """
    Push-pull, null-biased child MZMs combined in quadrature by the parent.

    E_out = (E_in / 2) * [sin(pi v_I / (2 v_pi)) + j sin(pi v_Q / (2 v_pi))] * 10^(-IL/20)
    """
    check_same_grid(carrier, drive_i, drive_q)
    if np.iscomplexobj(drive_i.samples) and np.any(drive_i.samples.imag != 0):
        raise ValueError("drive_i must be real-valued")
    if np.iscomplexobj(drive_q.samples) and np.any(drive_q.samples.imag != 0):
        raise ValueError("drive_q must be real-valued")
    v_i = np.real(drive_i.samples)
    v_q = np.real(drive_q.samples)
    arg = np.pi / (2 * cfg.v_pi)
    loss = 10 ** (-cfg.insertion_loss_db / 20)
    field = carrier.samples / 2 * (np.sin(arg * v_i) + 1j * np.sin(arg * v_q)) * loss
    return carrier.with_samples(field)


def pol_mux(signal: ComplexWaveform, carrier: ComplexWaveform) -> DualPolWaveform:
    """Signal on X, unmodulated carrier on Y."""
    check_same_grid(signal, carrier)
    return DualPolWaveform(signal, carrier)
