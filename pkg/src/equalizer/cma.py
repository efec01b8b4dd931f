"""All-analog CMA butterfly equalizer, discretized on the simulation grid.

The chip integrates error x conj(input) continuously; here that integral is a
forward-Euler step per sample with mu_dt = mu / sample_rate.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from src.signal_core.waveforms import ComplexWaveform, check_same_grid
from src.utils.errors import (
    DivergenceError,
    EmptySegmentError,
    NonIntegerTapSpacingError,
)

logger = logging.getLogger(__name__)

TAP_NAMES = ("h_xx", "h_xy", "h_yx", "h_yy")


@dataclass(frozen=True)
class EqConfig:
    mu: float = 5e6
    target_a: float = 1.0
    n_taps: int = 2
    tap_spacing_s: float = 20e-12
    leak: float = 0.0
    divergence_ceiling: float = 1e3
    cost_window_samples: int = 1000
    snapshot_interval_samples: int = 10000
    enabled: bool = True

    def __post_init__(self):
        # mu == 0 is allowed and freezes adaptation
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not self.target_a > 0:
            raise ValueError(f"target_a must be positive, got {self.target_a}")
        if self.n_taps < 1:
            raise ValueError(f"n_taps must be >= 1, got {self.n_taps}")
        if self.tap_spacing_s < 0:
            raise ValueError("tap_spacing_s must be >= 0")
        if not 0 <= self.leak < 1:
            raise ValueError(f"leak must lie in [0, 1), got {self.leak}")
        if not self.divergence_ceiling > 0:
            raise ValueError("divergence_ceiling must be positive")
        if self.cost_window_samples < 1 or self.snapshot_interval_samples < 1:
            raise ValueError("cost_window_samples and snapshot_interval_samples must be >= 1")


@dataclass(frozen=True, eq=False)
class ButterflyTaps:
    h_xx: np.ndarray
    h_xy: np.ndarray
    h_yx: np.ndarray
    h_yy: np.ndarray

    def __post_init__(self):
        lengths = set()
        for name in TAP_NAMES:
            taps = np.array(getattr(self, name), dtype=complex, copy=True)
            if taps.ndim != 1 or taps.size < 1:
                raise ValueError(f"{name} must be a nonempty 1-D vector")
            if not np.all(np.isfinite(taps)):
                raise ValueError(f"{name} has non-finite entries")
            taps.setflags(write=False)
            object.__setattr__(self, name, taps)
            lengths.add(taps.size)
        if len(lengths) != 1:
            raise ValueError(f"tap vectors differ in length: {sorted(lengths)}")

    @property
    def n_taps(self) -> int:
        return self.h_xx.size

    def as_dict(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in TAP_NAMES}

    def max_magnitude(self) -> float:
        return float(max(np.max(np.abs(v)) for v in self.as_dict().values()))


@dataclass(frozen=True, eq=False)
class TapSnapshot:
    sample_index: int
    taps: ButterflyTaps


@dataclass(frozen=True, eq=False)
class EqRunResult:
    x_eq: ComplexWaveform
    y_eq: ComplexWaveform
    final_taps: ButterflyTaps
    tap_trajectory: List[TapSnapshot] = field(default_factory=list)
    cost_trace: np.ndarray = None
    cost_trace_y: np.ndarray = None
    warmup_samples: int = 0
    tap_delay_samples: int = 0


def reset_taps(cfg: EqConfig) -> ButterflyTaps:
    """Centre-spike initialization driven by the board's reset switch."""
    spike = np.zeros(cfg.n_taps, dtype=complex)
    spike[0] = 1.0
    zeros = np.zeros(cfg.n_taps, dtype=complex)
    return ButterflyTaps(spike, zeros, zeros, spike)


def tap_delay_samples(cfg: EqConfig, sample_rate: float) -> int:
    """Integer sample offset between adjacent taps."""
    if cfg.n_taps == 1:
        return 0
    exact = cfg.tap_spacing_s * sample_rate
    d = int(round(exact))
    if not math.isclose(exact, d, rel_tol=0, abs_tol=1e-6) or d < 1:
        raise NonIntegerTapSpacingError(
            f"tap spacing {cfg.tap_spacing_s:.3e} s is {exact:.6f} samples at {sample_rate:.3e} S/s"
        )
    return d


def cma_cost(segment: np.ndarray, target_a: float) -> float:
    """J = mean over samples of (A^2 - |v|^2)^2."""
    v = np.asarray(getattr(segment, "samples", segment))
    if v.size == 0:
        raise EmptySegmentError("CMA cost of an empty segment")
    return float(np.mean((target_a ** 2 - np.abs(v) ** 2) ** 2))


def cma_error(output, target_a: float):
    """epsilon = out (A^2 - |out|^2)."""
    return output * (target_a ** 2 - np.abs(output) ** 2)


def cma_update_direction(output, delayed_input, target_a: float):
    """Per-sample tap increment direction epsilon * conj(u), i.e. -1/2 dJ/dh*."""
    return cma_error(output, target_a) * np.conj(delayed_input)


def _delayed(samples: np.ndarray, shift: int) -> np.ndarray:
    if shift == 0:
        return samples
    out = np.zeros_like(samples)
    out[shift:] = samples[:-shift]
    return out


def butterfly_apply(x: np.ndarray, y: np.ndarray, taps: ButterflyTaps, delay: int):
    """Static 2x2 FIR: x_eq = sum_k h_xx,k x[n-kd] + h_xy,k y[n-kd]; y_eq likewise."""
    x_eq = np.zeros(x.size, dtype=complex)
    y_eq = np.zeros(x.size, dtype=complex)
    for k in range(taps.n_taps):
        xd = _delayed(x, k * delay)
        yd = _delayed(y, k * delay)
        x_eq += taps.h_xx[k] * xd + taps.h_xy[k] * yd
        y_eq += taps.h_yx[k] * xd + taps.h_yy[k] * yd
    return x_eq, y_eq


def _windowed_cost(v: np.ndarray, target_a: float, window: int) -> np.ndarray:
    dev = (target_a ** 2 - np.abs(v) ** 2) ** 2
    n_windows = max(dev.size // window, 1)
    if dev.size < window:
        return np.array([dev.mean()])
    return dev[: n_windows * window].reshape(n_windows, window).mean(axis=1)


def _check_taps(taps: List[List[complex]], ceiling: float, n: int) -> None:
    for name, vec in zip(TAP_NAMES, taps):
        for k, h in enumerate(vec):
            mag = abs(h)
            if not mag <= ceiling:  # also catches nan
                raise DivergenceError(
                    f"{name}[{k}] reached |h| = {mag:.3e} > {ceiling:.1e} at sample {n}"
                )


def _snapshot(n: int, taps: List[List[complex]]) -> TapSnapshot:
    return TapSnapshot(n, ButterflyTaps(*[list(vec) for vec in taps]))


def equalizer_run(
    x_in: ComplexWaveform,
    y_in: ComplexWaveform,
    cfg: EqConfig,
    taps0: ButterflyTaps,
    adapt: bool = True,
    warmup_samples: int = 0,
) -> EqRunResult:
    """
    Run the butterfly equalizer sample by sample.

    Args:
        x_in (ComplexWaveform): X lane input.
        y_in (ComplexWaveform): Y lane input.
        cfg (EqConfig): Adaptation settings.
        taps0 (ButterflyTaps): Starting coefficients (see ``reset_taps``).
        adapt (bool): Integrate the CMA error into the taps.
        warmup_samples (int): Leading output samples dropped from x_eq / y_eq.

    Returns:
        EqRunResult: Outputs after warm-up, final taps, tap snapshots and windowed cost.
    """
    check_same_grid(x_in, y_in)
    if taps0.n_taps != cfg.n_taps:
        raise ValueError(f"taps0 has {taps0.n_taps} taps, config expects {cfg.n_taps}")
    if not 0 <= warmup_samples < len(x_in):
        raise ValueError(f"warmup_samples must lie in [0, {len(x_in)}), got {warmup_samples}")
    d = tap_delay_samples(cfg, x_in.sample_rate)
    A = cfg.target_a

    if not adapt:
        x_eq, y_eq = butterfly_apply(x_in.samples, y_in.samples, taps0, d)
        final = taps0
        trajectory = [TapSnapshot(0, taps0), TapSnapshot(len(x_in), taps0)]
    else:
        x_eq, y_eq, final, trajectory = _adapt_loop(x_in, y_in, cfg, taps0, d)

    cost_x = _windowed_cost(x_eq, A, cfg.cost_window_samples)
    cost_y = _windowed_cost(y_eq, A, cfg.cost_window_samples)
    logger.info(
        f"Equalizer ({'adaptive' if adapt else 'static'}): {len(x_in)} samples, tap delay {d}, "
        f"cost {cost_x[0]:.4g} -> {cost_x[-1]:.4g}"
    )
    rate = x_in.sample_rate
    return EqRunResult(
        x_eq=ComplexWaveform(x_eq[warmup_samples:], rate),
        y_eq=ComplexWaveform(y_eq[warmup_samples:], rate),
        final_taps=final,
        tap_trajectory=trajectory,
        cost_trace=cost_x,
        cost_trace_y=cost_y,
        warmup_samples=warmup_samples,
        tap_delay_samples=d,
    )


def _adapt_loop(x_in, y_in, cfg: EqConfig, taps0: ButterflyTaps, d: int):
    n_samples = len(x_in)
    n_taps = cfg.n_taps
    pad = (n_taps - 1) * d
    x = [0j] * pad + x_in.samples.astype(complex).tolist()
    y = [0j] * pad + y_in.samples.astype(complex).tolist()
    hxx, hxy, hyx, hyy = (getattr(taps0, name).tolist() for name in TAP_NAMES)
    taps = [hxx, hxy, hyx, hyy]
    offsets = [pad - k * d for k in range(n_taps)]
    mu_dt = cfg.mu / x_in.sample_rate
    keep = 1.0 - cfg.leak
    A2 = cfg.target_a ** 2
    ceiling = cfg.divergence_ceiling
    window = cfg.cost_window_samples
    snap_every = cfg.snapshot_interval_samples

    x_out = [0j] * n_samples
    y_out = [0j] * n_samples
    trajectory = [_snapshot(0, taps)]
    ks = range(n_taps)

    for n in range(n_samples):
        xe = 0j
        ye = 0j
        for k in ks:
            i = n + offsets[k]
            u = x[i]
            v = y[i]
            xe += hxx[k] * u + hxy[k] * v
            ye += hyx[k] * u + hyy[k] * v
        x_out[n] = xe
        y_out[n] = ye
        gx = mu_dt * xe * (A2 - (xe.real * xe.real + xe.imag * xe.imag))
        gy = mu_dt * ye * (A2 - (ye.real * ye.real + ye.imag * ye.imag))
        for k in ks:
            i = n + offsets[k]
            uc = x[i].conjugate()
            vc = y[i].conjugate()
            hxx[k] = keep * hxx[k] + gx * uc
            hxy[k] = keep * hxy[k] + gx * vc
            hyx[k] = keep * hyx[k] + gy * uc
            hyy[k] = keep * hyy[k] + gy * vc
        if (n + 1) % window == 0:
            _check_taps(taps, ceiling, n)
        if (n + 1) % snap_every == 0:
            _check_taps(taps, ceiling, n)
            trajectory.append(_snapshot(n + 1, taps))

    _check_taps(taps, ceiling, n_samples - 1)
    if trajectory[-1].sample_index != n_samples:
        trajectory.append(_snapshot(n_samples, taps))
    return np.array(x_out), np.array(y_out), trajectory[-1].taps, trajectory
