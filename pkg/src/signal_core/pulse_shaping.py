"""Drive-waveform construction from symbol streams."""
import numpy as np
from scipy.signal import oaconvolve

from config.settings import DEFAULT_SYMBOL_RATE_BAUD
from src.signal_core.bitstreams import SymbolStream
from src.signal_core.waveforms import ComplexWaveform
from src.utils.errors import EmptySymbolsError

PULSES = ("nrz", "raised-cosine")


def raised_cosine_taps(samples_per_symbol: int, rolloff: float, span_symbols: int = 16) -> np.ndarray:
    """Raised-cosine impulse response with unit peak, truncated to +-span/2 symbols."""
    half = span_symbols * samples_per_symbol // 2
    t = np.arange(-half, half + 1) / samples_per_symbol
    taps = np.sinc(t)
    if rolloff > 0:
        denom = 1.0 - (2.0 * rolloff * t) ** 2
        singular = np.isclose(denom, 0.0)
        safe = np.where(singular, 1.0, denom)
        taps = np.where(
            singular,
            np.pi / 4 * np.sinc(1.0 / (2.0 * rolloff)),
            taps * np.cos(np.pi * rolloff * t) / safe,
        )
    return taps


def build_waveform(
    symbols: SymbolStream,
    samples_per_symbol: int,
    pulse: str = "nrz",
    rolloff: float = 0.35,
    symbol_rate: float = DEFAULT_SYMBOL_RATE_BAUD,
) -> ComplexWaveform:
    """
    Oversample a symbol stream onto the simulation grid.

    Symbol k is centred on sample k*sps + sps//2 for both pulse shapes, so that
    sampling at offset sps//2 recovers the symbols of an NRZ waveform exactly.

    Args:
        symbols (SymbolStream): Symbols to shape.
        samples_per_symbol (int): Oversampling factor (>= 2).
        pulse (str): "nrz" or "raised-cosine".
        rolloff (float): Raised-cosine excess bandwidth.
        symbol_rate (float): Symbol rate in Bd.

    Returns:
        ComplexWaveform: Waveform at symbol_rate * samples_per_symbol.
    """
    if len(symbols) == 0:
        raise EmptySymbolsError("cannot build a waveform from zero symbols")
    if samples_per_symbol < 2:
        raise ValueError(f"samples_per_symbol must be >= 2, got {samples_per_symbol}")
    sps = int(samples_per_symbol)
    sample_rate = symbol_rate * sps

    if pulse == "nrz":
        return ComplexWaveform(np.repeat(symbols.symbols, sps), sample_rate)
    if pulse != "raised-cosine":
        raise ValueError(f"unknown pulse shape '{pulse}', expected one of {PULSES}")
    if not 0.0 <= rolloff <= 1.0:
        raise ValueError(f"rolloff must lie in [0, 1], got {rolloff}")

    n = len(symbols) * sps
    impulses = np.zeros(n, dtype=complex)
    impulses[sps // 2::sps] = symbols.symbols
    taps = raised_cosine_taps(sps, rolloff)
    half = taps.size // 2
    shaped = oaconvolve(impulses, taps, mode="full")[half:half + n]
    return ComplexWaveform(shaped, sample_rate)
