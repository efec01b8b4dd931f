"""Bit sources and QPSK (Gray) symbol mapping."""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.utils.errors import (
    EmptyStreamsError,
    LengthMismatchError,
    SeedZeroError,
    UnsupportedOrderError,
)

logger = logging.getLogger(__name__)

# Fibonacci LFSR feedback tap (besides the top stage) for each PRBS order.
PRBS_TAPS = {
    7: 6,    # x^7 + x^6 + 1
    9: 5,    # x^9 + x^5 + 1
    15: 14,  # x^15 + x^14 + 1
    23: 18,  # x^23 + x^18 + 1
    31: 28,  # x^31 + x^28 + 1
}

INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Bitstream:
    bits: np.ndarray
    origin: str = "explicit"
    order: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 1 or bits.size == 0:
            raise EmptyStreamsError("bitstream must be a nonempty 1-D sequence")
        if not np.all((bits == 0) | (bits == 1)):
            raise ValueError("bitstream elements must be 0 or 1")
        bits = bits.astype(np.uint8, copy=True)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return self.bits.size

    def __getitem__(self, item) -> "Bitstream":
        if isinstance(item, slice):
            return Bitstream(self.bits[item], self.origin, self.order, self.seed)
        return int(self.bits[item])


@dataclass(frozen=True, eq=False)
class SymbolStream:
    symbols: np.ndarray
    modulation: str = "QPSK-Gray"

    def __post_init__(self):
        symbols = np.array(self.symbols, dtype=complex, copy=True)
        if symbols.ndim != 1:
            raise ValueError("symbol stream must be 1-D")
        symbols.setflags(write=False)
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return self.symbols.size


def prbs_generate(order: int, n_bits: int, seed: int) -> Bitstream:
    """
    First ``n_bits`` of the maximal-length Fibonacci LFSR sequence.

    Args:
        order (int): PRBS order, one of 7, 9, 15, 23, 31.
        n_bits (int): Number of bits to produce.
        seed (int): Initial register state; only the low ``order`` bits are used.

    Returns:
        Bitstream: bits with prbs origin metadata; period 2^order - 1.
    """
    if order not in PRBS_TAPS:
        raise UnsupportedOrderError(
            f"Unsupported PRBS order {order}. Available: {sorted(PRBS_TAPS)}"
        )
    if n_bits < 1:
        raise ValueError(f"n_bits must be >= 1, got {n_bits}")
    mask = (1 << order) - 1
    state = int(seed) & mask
    if state == 0:
        raise SeedZeroError(f"seed {seed} gives the all-zero LFSR state for PRBS-{order}")

    top = order - 1
    tap = PRBS_TAPS[order] - 1
    bits = np.empty(n_bits, dtype=np.uint8)
    for i in range(n_bits):
        fb = ((state >> top) ^ (state >> tap)) & 1
        state = ((state << 1) | fb) & mask
        bits[i] = fb
    return Bitstream(bits, origin="prbs", order=order, seed=int(seed))


def qpsk_gray_map(bits_i: Bitstream, bits_q: Bitstream) -> SymbolStream:
    """Symbol k = ((1 - 2 b_i) + j (1 - 2 b_q)) / sqrt(2)."""
    if len(bits_i) != len(bits_q):
        raise LengthMismatchError(
            f"I and Q tributaries differ in length: {len(bits_i)} vs {len(bits_q)}"
        )
    re = 1.0 - 2.0 * bits_i.bits.astype(float)
    im = 1.0 - 2.0 * bits_q.bits.astype(float)
    return SymbolStream((re + 1j * im) * INV_SQRT2)


def qpsk_demap(symbols: SymbolStream) -> Tuple[Bitstream, Bitstream]:
    """Hard quadrant decision; values on a boundary (>= 0) decide bit 0."""
    s = symbols.symbols
    if s.size == 0:
        raise EmptyStreamsError("cannot demap an empty symbol stream")
    bits_i = (s.real < 0).astype(np.uint8)
    bits_q = (s.imag < 0).astype(np.uint8)
    return Bitstream(bits_i), Bitstream(bits_q)


def qpsk_decide(symbols: np.ndarray) -> np.ndarray:
    """Nearest unit-energy constellation point for each sample."""
    re = np.where(symbols.real < 0, -1.0, 1.0)
    im = np.where(symbols.imag < 0, -1.0, 1.0)
    return (re + 1j * im) * INV_SQRT2
