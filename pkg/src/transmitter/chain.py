"""Transmitter assembly: BERT tributaries -> drivers -> IQ MZM -> PBC."""
import logging
from dataclasses import dataclass, field

import numpy as np

from config.settings import DEFAULT_SAMPLES_PER_SYMBOL, DEFAULT_SYMBOL_RATE_BAUD
from src.signal_core.bitstreams import Bitstream, SymbolStream, qpsk_gray_map
from src.signal_core.pulse_shaping import build_waveform
from src.signal_core.waveforms import ComplexWaveform, DualPolWaveform
from src.transmitter.driver import DriverConfig, driver_lowpass
from src.transmitter.laser import LaserConfig, laser_field
from src.transmitter.modulator import ModulatorConfig, mzm_iq_modulate, pol_mux

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransmitterConfig:
    laser: LaserConfig = field(default_factory=LaserConfig)
    modulator: ModulatorConfig = field(default_factory=ModulatorConfig)
    driver: DriverConfig = field(default_factory=DriverConfig)
    symbol_rate_baud: float = DEFAULT_SYMBOL_RATE_BAUD
    samples_per_symbol: int = DEFAULT_SAMPLES_PER_SYMBOL
    pulse: str = "nrz"
    rolloff: float = 0.35


@dataclass(frozen=True, eq=False)
class TransmitterOutput:
    field: DualPolWaveform
    symbols: SymbolStream
    drive_i: ComplexWaveform
    drive_q: ComplexWaveform


def bert_drive(symbols: SymbolStream, cfg: TransmitterConfig):
    """
    Real I/Q drive waveforms scaled so the child MZMs swing +-v_pi/2 after the driver gain.
    """
    wave = build_waveform(
        symbols, cfg.samples_per_symbol, cfg.pulse, cfg.rolloff, cfg.symbol_rate_baud
    )
    amplitude = np.sqrt(2.0) * cfg.modulator.v_pi / (2.0 * cfg.driver.gain)
    drive_i = wave.with_samples(amplitude * wave.samples.real)
    drive_q = wave.with_samples(amplitude * wave.samples.imag)
    return driver_lowpass(drive_i, cfg.driver), driver_lowpass(drive_q, cfg.driver)


def transmit(bits_i: Bitstream, bits_q: Bitstream, cfg: TransmitterConfig, seed) -> TransmitterOutput:
    """
    Build the polarization-multiplexed signal-plus-carrier field.

    Args:
        bits_i (Bitstream): I tributary.
        bits_q (Bitstream): Q tributary.
        cfg (TransmitterConfig): Laser, modulator, driver and grid settings.
        seed: Laser phase-noise seed.

    Returns:
        TransmitterOutput: Field (signal on X, carrier on Y), reference symbols and drives.
    """
    symbols = qpsk_gray_map(bits_i, bits_q)
    drive_i, drive_q = bert_drive(symbols, cfg)
    laser = laser_field(cfg.laser, len(drive_i), drive_i.sample_rate, seed)

    ratio = cfg.modulator.carrier_split_ratio
    signal_path = laser.with_samples(np.sqrt(ratio) * laser.samples)
    carrier_path = laser.with_samples(np.sqrt(1.0 - ratio) * laser.samples)

    signal = mzm_iq_modulate(signal_path, drive_i, drive_q, cfg.modulator)
    field_out = pol_mux(signal, carrier_path)
    logger.info(
        f"Transmitter: {len(symbols)} symbols, signal {10 * np.log10(signal.mean_power):.2f} dBm, "
        f"carrier {10 * np.log10(carrier_path.mean_power):.2f} dBm"
    )
    return TransmitterOutput(field_out, symbols, drive_i, drive_q)
