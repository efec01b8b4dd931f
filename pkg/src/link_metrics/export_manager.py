import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import pandas as pd

from src.signal_core.bitstreams import SymbolStream
from src.utils.errors import EmptySymbolsError, IoFailureError

logger = logging.getLogger(__name__)

CONSTELLATION_COLUMNS = ["index", "re", "im"]


@dataclass(frozen=True)
class ConstellationDump:
    """Symbol-centre samples of the equalized x lane after warm-up."""

    scenario_id: str
    x: SymbolStream
    scale: float = 1.0
    y: Optional[SymbolStream] = None

    def __len__(self) -> int:
        return len(self.x)


def constellation_to_frame(symbols: SymbolStream) -> pd.DataFrame:
    s = symbols.symbols
    return pd.DataFrame({"index": range(s.size), "re": s.real, "im": s.imag}, columns=CONSTELLATION_COLUMNS)


def export_constellation(dump: ConstellationDump, destination: Path) -> Path:
    """
    Export a constellation dump to CSV.

    Writes a '# scenario=<id> scale=<v>' comment line followed by
    index,re,im rows at full precision. The optional y lane goes to a
    sibling file with a '_y' suffix.
    """
    if len(dump) == 0:
        raise EmptySymbolsError("constellation dump is empty")
    path = Path(destination)
    written = [(path, dump.x)]
    if dump.y is not None and len(dump.y) > 0:
        written.append((path.with_name(f"{path.stem}_y{path.suffix}"), dump.y))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        for target, symbols in written:
            with open(target, "w", encoding="utf-8", newline="") as f:
                f.write(f"# scenario={dump.scenario_id} scale={dump.scale!r}\n")
                constellation_to_frame(symbols).to_csv(
                    f, index=False, float_format="%.17g", lineterminator="\n"
                )
    except OSError as e:
        raise IoFailureError(f"Failed to export constellation to {path}: {e}") from e
    logger.info(f"Exported {len(dump)} constellation points to {path}")
    return path


def read_constellation_header(path: Path) -> dict:
    """Parse the 'key=value' pairs of the leading comment line."""
    try:
        with open(path, encoding="utf-8") as f:
            first = f.readline()
    except OSError as e:
        raise IoFailureError(f"Failed to read constellation from {path}: {e}") from e
    if not first.startswith("#"):
        return {}
    return dict(item.split("=", 1) for item in first[1:].split() if "=" in item)


def load_constellation(path: Path) -> Tuple[SymbolStream, dict]:
    """Re-import an exported constellation; returns the symbols and header metadata."""
    try:
        df = pd.read_csv(path, comment="#", float_precision="round_trip")
    except OSError as e:
        raise IoFailureError(f"Failed to read constellation from {path}: {e}") from e
    symbols = SymbolStream(df["re"].to_numpy() + 1j * df["im"].to_numpy())
    return symbols, read_constellation_header(path)
