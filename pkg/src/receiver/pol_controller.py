"""Polarization-controller search that separates the signal from the carrier.

The controller is a 3-angle unitary. The search works on second- and fourth-order
statistics gathered once from the field, so each objective evaluation is O(1)
regardless of record length. Row phases of the controller do not change either
objective, so the returned matrix is put in a fixed phase convention.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.fiber_channel.jones import JonesMatrix, su2_matrix
from src.signal_core.waveforms import DualPolWaveform
from src.utils.errors import ZeroPowerError

logger = logging.getLogger(__name__)

OBJECTIVES = ("max-power-ratio", "min-carrier-intensity-variance")
EXTINCTION_CAP_DB = 200.0
MIN_STEP_RAD = 1e-10
MAX_ITERATIONS = 20000
EIGEN_GAP_TOL = 1e-9
GAUGE_ANCHOR_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class PolSearchResult:
    matrix: JonesMatrix
    extinction_db: float
    iterations: int
    objective: str = "max-power-ratio"
    objective_value: float = 0.0
    objective_trace: List[float] = field(default_factory=list)
    polished: bool = False


class _FieldStatistics:
    """Coherency matrix and intensity-feature moments of a dual-pol field."""

    def __init__(self, pol_field: DualPolWaveform):
        x, y = pol_field.x.samples, pol_field.y.samples
        cross = x * np.conj(y)
        self.coherency = np.array(
            [
                [np.mean(np.abs(x) ** 2), np.mean(cross)],
                [np.conj(np.mean(cross)), np.mean(np.abs(y) ** 2)],
            ]
        )
        features = np.vstack([np.abs(x) ** 2, np.abs(y) ** 2, cross.real, cross.imag])
        self.feature_mean = features.mean(axis=1)
        self.feature_cov = np.cov(features, bias=True)
        self.total_power = float(np.real(np.trace(self.coherency)))

    def output_coherency(self, jones: np.ndarray) -> np.ndarray:
        return jones @ self.coherency @ jones.conj().T

    def carrier_port_intensity(self, jones: np.ndarray) -> Tuple[float, float]:
        """Mean and variance of |y'|^2 for y' = c x + d y."""
        c_, d_ = jones[1]
        cd = c_ * np.conj(d_)
        w = np.array([abs(c_) ** 2, abs(d_) ** 2, 2 * cd.real, -2 * cd.imag])
        return float(w @ self.feature_mean), float(w @ self.feature_cov @ w)


def extinction_db(coherency: np.ndarray) -> float:
    """Cross-talk extinction 10 log10(P_x P_y / |<x y*>|^2) between the two PBS ports."""
    p_x, p_y = coherency[0, 0].real, coherency[1, 1].real
    cross = abs(coherency[0, 1]) ** 2
    if cross <= p_x * p_y * 10 ** (-EXTINCTION_CAP_DB / 10):
        return EXTINCTION_CAP_DB
    return float(10 * np.log10(p_x * p_y / cross))


def _objective_fn(stats: _FieldStatistics, objective: str):
    floor = stats.total_power * 1e-30

    def power_ratio(jones):
        out = stats.output_coherency(jones)
        p_x = max(out[0, 0].real, floor)
        p_y = max(out[1, 1].real, floor)
        return 10 * np.log10(p_y / p_x)

    def intensity_flatness(jones):
        mean, var = stats.carrier_port_intensity(jones)
        if mean <= floor:
            return -np.inf
        return -var / mean ** 2

    if objective == "max-power-ratio":
        return power_ratio
    if objective == "min-carrier-intensity-variance":
        return intensity_flatness
    raise ValueError(f"unknown objective '{objective}', expected one of {OBJECTIVES}")


def _coordinate_search(fn, start: np.ndarray, initial_step: float):
    """Coordinate ascent with step halving; returns (angles, value, accepted trace)."""
    angles = np.array(start, dtype=float)
    value = fn(su2_matrix(*angles))
    trace = [value]
    step = initial_step
    iterations = 0
    while step > MIN_STEP_RAD and iterations < MAX_ITERATIONS:
        improved = False
        for axis in range(3):
            for direction in (1.0, -1.0):
                candidate = angles.copy()
                candidate[axis] += direction * step
                cand_value = fn(su2_matrix(*candidate))
                iterations += 1
                if cand_value > value:
                    angles, value = candidate, cand_value
                    trace.append(value)
                    improved = True
                    break
        if not improved:
            step /= 2
    return angles, value, trace


def principal_basis(coherency: np.ndarray) -> Optional[np.ndarray]:
    """
    Rows are the conjugated coherency eigenvectors, weakest mode on X and strongest on Y.

    This is the exact maximizer of the X/Y power ratio. Returns None when the two
    eigenvalues are too close for the basis to be well defined.
    """
    values, vectors = np.linalg.eigh(coherency)
    if values[1] - values[0] <= EIGEN_GAP_TOL * abs(values[0] + values[1]):
        return None
    return vectors.conj().T


def fix_row_phases(matrix: np.ndarray) -> np.ndarray:
    """Rotate each row by a common phase so its diagonal entry is real and non-negative."""
    fixed = np.array(matrix, dtype=complex, copy=True)
    for row in range(2):
        anchor = fixed[row, row] if abs(fixed[row, row]) > GAUGE_ANCHOR_TOL else fixed[row, 1 - row]
        if abs(anchor) > 0:
            fixed[row] *= np.conj(anchor) / abs(anchor)
    return fixed


def pol_control_search(
    pol_field: DualPolWaveform,
    objective: str = "max-power-ratio",
    restarts: int = 4,
    seed: int = 0,
) -> PolSearchResult:
    """
    Find the controller setting that puts the carrier (LO) on the Y port.

    Args:
        pol_field (DualPolWaveform): Received field before the PBS.
        objective (str): "max-power-ratio" (maximize P_y / P_x) or
            "min-carrier-intensity-variance" (flattest intensity on Y).
        restarts (int): Number of starting points (>= 3); the first is the identity.
        seed (int): Seed for the non-identity starting points.

    Returns:
        PolSearchResult: Best unitary over all restarts with its accepted-objective trace.
            For the power-ratio objective the result is snapped to the coherency
            eigenbasis. Row phases are fixed so the diagonal is real and non-negative.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective '{objective}', expected one of {OBJECTIVES}")
    stats = _FieldStatistics(pol_field)
    if not stats.total_power > 0:
        raise ZeroPowerError("polarization search needs a field with nonzero power")
    fn = _objective_fn(stats, objective)

    rng = np.random.default_rng(seed)
    starts = [np.zeros(3)]
    for _ in range(max(restarts, 3) - 1):
        starts.append(np.array([np.pi / 2, 2 * np.pi, 2 * np.pi]) * rng.random(3))

    best = None
    for i, start in enumerate(starts):
        angles, value, trace = _coordinate_search(fn, start, np.pi / 4)
        logger.debug(f"Pol search restart {i}: objective {value:.6g} after {len(trace) - 1} moves")
        if best is None or value > best[1]:
            best = (angles, value, trace)

    angles, value, trace = best
    matrix = su2_matrix(*angles)
    polished = False
    if objective == "max-power-ratio":
        basis = principal_basis(stats.coherency)
        if basis is not None:
            matrix, polished = basis, True
            basis_value = fn(basis)
            if basis_value > value:
                trace.append(basis_value)
            value = basis_value
    jones = JonesMatrix(fix_row_phases(matrix))
    ext = extinction_db(stats.output_coherency(jones.matrix))
    if ext < 30:
        logger.warning(f"Pol search ended at {ext:.1f} dB extinction")
    logger.info(f"Pol search ({objective}): extinction {ext:.1f} dB, {len(trace) - 1} accepted moves")
    return PolSearchResult(
        matrix=jones,
        extinction_db=ext,
        iterations=len(trace) - 1,
        objective=objective,
        objective_value=float(value),
        objective_trace=trace,
        polished=polished,
    )
