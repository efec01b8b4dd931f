"""Decision stage: eye sampling and blind phase/delay alignment to the reference."""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.signal_core.bitstreams import Bitstream, SymbolStream
from src.signal_core.waveforms import ComplexWaveform
from src.utils.errors import EmptyStreamsError, NoAlignmentError, OffsetOutOfRangeError

logger = logging.getLogger(__name__)

ALIGNMENT_FAILURE_BER = 0.45
DEFAULT_SEARCH_WINDOW = 4096
DEFAULT_MAX_DELAY = 64
# multiply by these to remove a rotation of 0, 90, 180, 270 degrees
_DEROTATIONS = (1.0 + 0j, -1j, -1.0 + 0j, 1j)


@dataclass(frozen=True)
class Alignment:
    delay: int
    rotation_deg: int
    fine_derotation_rad: float
    window_ber: float = 0.0


def symbol_sample(wave: ComplexWaveform, sps: int, offset: Optional[int] = None) -> SymbolStream:
    """One sample per symbol at ``offset`` (default sps // 2); a trailing partial symbol is dropped."""
    if offset is None:
        offset = sps // 2
    if not 0 <= offset < sps:
        raise OffsetOutOfRangeError(f"offset {offset} outside [0, {sps})")
    n_symbols = len(wave) // sps
    return SymbolStream(wave.samples[offset:n_symbols * sps:sps])


def fourth_power_concentration(symbols: np.ndarray) -> float:
    """|mean(s^4)| / mean(|s|^4); 1 for a noiseless, ISI-free QPSK constellation."""
    denom = np.mean(np.abs(symbols) ** 4)
    if denom == 0:
        return 0.0
    return float(np.abs(np.mean(symbols ** 4)) / denom)


def select_sampling_offset(wave: ComplexWaveform, sps: int) -> int:
    """Eye centre: the offset whose samples form the tightest QPSK constellation."""
    scores = [fourth_power_concentration(symbol_sample(wave, sps, k).symbols) for k in range(sps)]
    best = int(np.argmax(scores))
    logger.debug(f"Sampling offset {best} (concentration {scores[best]:.4f})")
    return best


def fourth_power_phase(symbols: np.ndarray) -> float:
    """Residual rotation in (-pi/4, pi/4] relative to the (+-1 +-j)/sqrt(2) orientation."""
    m = np.mean(symbols ** 4)
    if m == 0:
        return 0.0
    return float(np.angle(-m) / 4)


def resolve_ambiguity(
    symbols: SymbolStream,
    ref_i: Bitstream,
    ref_q: Bitstream,
    window: int = DEFAULT_SEARCH_WINDOW,
    max_delay: int = DEFAULT_MAX_DELAY,
) -> Tuple[SymbolStream, Alignment]:
    """
    Undo the CMA's phase ambiguity and find the symbol delay to the reference.

    Received symbol k + delay is compared against reference symbol k. The fine
    rotation comes from the fourth-power estimator; the remaining 90-degree
    ambiguity and the delay are chosen by minimum BER over the search window.

    Args:
        symbols (SymbolStream): Sampled received symbols.
        ref_i (Bitstream): Reference I bits, starting at the earliest candidate symbol.
        ref_q (Bitstream): Reference Q bits.
        window (int): Symbols compared per candidate.
        max_delay (int): Largest delay tried.

    Returns:
        Tuple[SymbolStream, Alignment]: Derotated symbols starting at the aligned
        position, and the winning transform.
    """
    s = symbols.symbols
    if s.size == 0:
        raise EmptyStreamsError("no symbols to align")
    if len(ref_i) != len(ref_q):
        raise ValueError("reference tributaries differ in length")
    window = min(window, len(ref_i))
    max_delay = min(max_delay, s.size - window)
    if window < 1 or max_delay < 0:
        raise EmptyStreamsError(f"{s.size} symbols are too few for a {window}-symbol search window")

    fine = fourth_power_phase(s)
    derotated = s * np.exp(-1j * fine)
    ri = ref_i.bits[:window].astype(bool)
    rq = ref_q.bits[:window].astype(bool)

    ber = np.empty((4, max_delay + 1))
    for r, factor in enumerate(_DEROTATIONS):
        candidate = derotated[: window + max_delay] * factor
        bi = sliding_window_view(candidate.real < 0, window)
        bq = sliding_window_view(candidate.imag < 0, window)
        errors = np.count_nonzero(bi != ri, axis=1) + np.count_nonzero(bq != rq, axis=1)
        ber[r] = errors / (2 * window)

    r_best, d_best = np.unravel_index(int(np.argmin(ber)), ber.shape)
    best = float(ber[r_best, d_best])
    if best > ALIGNMENT_FAILURE_BER:
        raise NoAlignmentError(f"best window BER {best:.3f} exceeds {ALIGNMENT_FAILURE_BER}")

    alignment = Alignment(
        delay=int(d_best),
        rotation_deg=int(90 * r_best),
        fine_derotation_rad=fine,
        window_ber=best,
    )
    logger.info(
        f"Alignment: delay {alignment.delay} symbols, rotation {alignment.rotation_deg} deg, "
        f"fine {fine:.4f} rad, window BER {best:.3e}"
    )
    aligned = derotated[d_best:] * _DEROTATIONS[r_best]
    return SymbolStream(aligned), alignment
