"""Master-seed expansion into independent per-stage seeds."""
from typing import Dict, Optional

import numpy as np

# Order is part of the seeding contract: appending is safe, reordering is not.
STAGES = ("prbs_i", "prbs_q", "laser", "edfa", "sop", "receiver")


def derive_seeds(master: int, sop_seed: Optional[int] = None) -> Dict[str, int]:
    """
    Spawn one child SeedSequence per stage from the master seed.

    Each stage draws from its own stream, so disabling the equalizer or the
    EDFA leaves every other noise realization untouched. An explicit
    ``sop_seed`` replaces the derived fiber-rotation seed.
    """
    children = np.random.SeedSequence(master).spawn(len(STAGES))
    seeds = {
        stage: int(child.generate_state(1, dtype=np.uint32)[0])
        for stage, child in zip(STAGES, children)
    }
    if sop_seed is not None:
        seeds["sop"] = int(sop_seed)
    return seeds


def prbs_seed(value: int, order: int) -> int:
    """Fold a stage seed into a valid nonzero LFSR state."""
    return value % ((1 << order) - 1) + 1
