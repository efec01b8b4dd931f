"""BER and EVM measurement."""
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from src.link_metrics.decision import Alignment
from src.signal_core.bitstreams import Bitstream, SymbolStream, qpsk_decide
from src.utils.errors import EmptyStreamsError, LengthMismatchError


@dataclass(frozen=True)
class BerReport:
    bit_errors: int
    bits_compared: int
    ber: float
    alignment: Optional[Alignment] = None

    @property
    def upper_bound(self) -> float:
        """Honest floor when nothing failed: BER < 1 / bits_compared."""
        return 1.0 / self.bits_compared

    def as_dict(self) -> dict:
        data = asdict(self)
        data["zero_error_bound"] = self.upper_bound if self.bit_errors == 0 else None
        return data


def ber_measure(rx_i: Bitstream, rx_q: Bitstream, ref_i: Bitstream, ref_q: Bitstream) -> BerReport:
    """Count bit mismatches over both tributaries of aligned, equal-length streams."""
    lengths = {len(rx_i), len(rx_q), len(ref_i), len(ref_q)}
    if len(lengths) != 1:
        raise LengthMismatchError(
            f"streams must share length, got rx ({len(rx_i)}, {len(rx_q)}) "
            f"ref ({len(ref_i)}, {len(ref_q)})"
        )
    errors = int(np.count_nonzero(rx_i.bits != ref_i.bits) + np.count_nonzero(rx_q.bits != ref_q.bits))
    total = 2 * len(rx_i)
    return BerReport(bit_errors=errors, bits_compared=total, ber=errors / total)


def normalize_power(symbols: SymbolStream) -> SymbolStream:
    """Scale to unit mean power."""
    s = symbols.symbols
    if s.size == 0:
        raise EmptyStreamsError("cannot normalize an empty symbol stream")
    power = np.mean(np.abs(s) ** 2)
    if power == 0:
        return symbols
    return SymbolStream(s / np.sqrt(power))


def evm_measure(symbols: SymbolStream) -> float:
    """RMS error to the nearest unit-energy QPSK point over RMS ideal magnitude, in percent."""
    s = symbols.symbols
    if s.size == 0:
        raise EmptyStreamsError("EVM of an empty symbol stream")
    ideal = qpsk_decide(s)
    error_rms = np.sqrt(np.mean(np.abs(s - ideal) ** 2))
    ideal_rms = np.sqrt(np.mean(np.abs(ideal) ** 2))
    return float(100 * error_rms / ideal_rms)
