import logging
from pathlib import Path
from typing import List

import pandas as pd

from src.equalizer.cma import TAP_NAMES, TapSnapshot
from src.utils.errors import IoFailureError

logger = logging.getLogger(__name__)

TAP_COLUMNS = ["sample_index", "tap_name", "re", "im"]


def taps_to_frame(trajectory: List[TapSnapshot]) -> pd.DataFrame:
    """Long-format table, one row per (snapshot, tap)."""
    rows = []
    for snap in trajectory:
        for name in TAP_NAMES:
            for k, h in enumerate(getattr(snap.taps, name)):
                rows.append({
                    "sample_index": snap.sample_index,
                    "tap_name": f"{name}[{k}]",
                    "re": float(h.real),
                    "im": float(h.imag),
                })
    return pd.DataFrame(rows, columns=TAP_COLUMNS)


def export_taps(trajectory: List[TapSnapshot], destination: Path) -> Path:
    """Write the tap trajectory as CSV (sample_index, tap_name, re, im)."""
    if not trajectory:
        raise ValueError("empty tap trajectory")
    path = Path(destination)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        taps_to_frame(trajectory).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise IoFailureError(f"Failed to export taps to {path}: {e}") from e
    logger.info(f"Exported tap trajectory to {path}")
    return path


def load_taps(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except OSError as e:
        raise IoFailureError(f"Failed to read taps from {path}: {e}") from e
