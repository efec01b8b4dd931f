"""LO-less coherent front-end: VOA, PBS, 90-degree hybrid, balanced detection, AGC."""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.fiber_channel.jones import pol_transform
from src.receiver.pol_controller import OBJECTIVES, PolSearchResult, pol_control_search
from src.signal_core.waveforms import ComplexWaveform, DualPolWaveform, check_same_grid
from src.utils.errors import DegenerateSignalError, ZeroPowerError
from src.utils.spectral import apply_frequency_response, frequency_grid, single_pole_response

logger = logging.getLogger(__name__)

AGC_LOW_PERCENTILE = 0.1
AGC_HIGH_PERCENTILE = 99.9


@dataclass(frozen=True)
class ReceiverConfig:
    responsivity_a_w: float = 0.8
    thermal_noise_a_rthz: float = 20e-12
    electrical_bandwidth_hz: float = 16e9
    agc_target_vpp: float = 0.4
    tia_transimpedance_ohm: float = 1000.0
    # Received power set by the VOA; None leaves the field untouched
    rx_power_dbm: Optional[float] = None
    pol_objective: str = "max-power-ratio"

    def __post_init__(self):
        if not self.responsivity_a_w > 0:
            raise ValueError(f"responsivity_a_w must be positive, got {self.responsivity_a_w}")
        if not self.agc_target_vpp > 0:
            raise ValueError(f"agc_target_vpp must be positive, got {self.agc_target_vpp}")
        if self.thermal_noise_a_rthz < 0:
            raise ValueError("thermal_noise_a_rthz must be >= 0")
        if not self.electrical_bandwidth_hz > 0:
            raise ValueError("electrical_bandwidth_hz must be positive")
        if self.pol_objective not in OBJECTIVES:
            raise ValueError(f"pol_objective must be one of {OBJECTIVES}")


@dataclass(frozen=True, eq=False)
class ReceiverOutput:
    x_in: ComplexWaveform
    y_in: ComplexWaveform
    scale_v_per_unit: float
    pol_search: PolSearchResult
    voa_attenuation_db: float


def voa_attenuate(pol_field: DualPolWaveform, target_dbm: Optional[float]) -> Tuple[DualPolWaveform, float]:
    """Common attenuation bringing the mean total power to ``target_dbm``; returns (field, dB)."""
    if target_dbm is None:
        return pol_field, 0.0
    power = pol_field.mean_power
    if not power > 0:
        raise ZeroPowerError("cannot set the received power of a dark field")
    ratio = 10 ** (target_dbm / 10) / power
    scale = np.sqrt(ratio)
    return pol_field.map(lambda samples: samples * scale), float(-10 * np.log10(ratio))


def hybrid_balanced_detect(
    signal: ComplexWaveform,
    lo: ComplexWaveform,
    cfg: ReceiverConfig,
    seed,
) -> Tuple[ComplexWaveform, ComplexWaveform]:
    """
    Ideal 90-degree hybrid with balanced photodetectors and TIAs.

    i = R Re{E_s E_lo*} Z + n_i, q = R Im{E_s E_lo*} Z + n_q, both low-passed by a
    single pole at the electrical bandwidth. Fields in sqrt(mW) give currents in mA,
    so the outputs are in mV per ohm of transimpedance. The thermal noise is white
    over the simulated band with the configured one-sided density before the filter.

    Returns:
        Tuple[ComplexWaveform, ComplexWaveform]: Real I and Q waveforms.
    """
    check_same_grid(signal, lo)
    beat = cfg.responsivity_a_w * signal.samples * np.conj(lo.samples)
    if cfg.thermal_noise_a_rthz > 0:
        rng = np.random.default_rng(seed)
        n = len(signal)
        # density in mA/sqrt(Hz) over the one-sided simulation band
        sigma = cfg.thermal_noise_a_rthz * 1e3 * np.sqrt(signal.sample_rate / 2)
        beat = beat + sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))

    freqs = frequency_grid(len(signal), signal.sample_rate)
    response = single_pole_response(freqs, cfg.electrical_bandwidth_hz)
    detected = apply_frequency_response(beat, response) * cfg.tia_transimpedance_ohm
    return signal.with_samples(detected.real), signal.with_samples(detected.imag)


def agc_gain(wave: ComplexWaveform, target_vpp: float) -> float:
    """Gain that maps the 0.1-99.9 percentile span of ``wave`` onto ``target_vpp``."""
    values = np.real(wave.samples)
    low, high = np.percentile(values, [AGC_LOW_PERCENTILE, AGC_HIGH_PERCENTILE])
    span = high - low
    if not span > 0:
        raise DegenerateSignalError("AGC input has no peak-to-peak span")
    return target_vpp / span


def agc_normalize(wave: ComplexWaveform, target_vpp: float = 0.4) -> ComplexWaveform:
    """Remove the mean and scale so the percentile peak-to-peak equals ``target_vpp``."""
    values = np.real(wave.samples)
    gain = agc_gain(wave, target_vpp)
    return wave.with_samples((values - values.mean()) * gain)


def receive(pol_field: DualPolWaveform, cfg: ReceiverConfig, seed) -> ReceiverOutput:
    """
    Full front-end: VOA, polarization search, PBS, coherent detection and AGC.

    The equalizer input is the complex I + jQ swing normalized to unit RMS; the
    returned scale converts normalized units back to volts. The second equalizer
    lane carries no data in a self-homodyne link and is fed zeros.

    Args:
        pol_field (DualPolWaveform): Field arriving from the fiber.
        cfg (ReceiverConfig): Front-end settings.
        seed: Seed for the thermal noise.

    Returns:
        ReceiverOutput: Equalizer inputs, scale factor and search diagnostics.
    """
    attenuated, voa_db = voa_attenuate(pol_field, cfg.rx_power_dbm)
    search = pol_control_search(attenuated, cfg.pol_objective)
    separated = pol_transform(attenuated, search.matrix)

    i_wave, q_wave = hybrid_balanced_detect(separated.x, separated.y, cfg, seed)
    i_agc = agc_normalize(i_wave, cfg.agc_target_vpp)
    q_agc = agc_normalize(q_wave, cfg.agc_target_vpp)

    combined = i_agc.samples + 1j * q_agc.samples
    scale = float(np.sqrt(np.mean(np.abs(combined) ** 2)))
    logger.info(
        f"Receiver: VOA {voa_db:.2f} dB, extinction {search.extinction_db:.1f} dB, "
        f"scale {scale:.4f} V/unit"
    )
    x_in = ComplexWaveform(combined / scale, i_agc.sample_rate)
    y_in = ComplexWaveform(np.zeros(len(x_in), dtype=complex), i_agc.sample_rate)
    return ReceiverOutput(x_in, y_in, scale, search, voa_db)
