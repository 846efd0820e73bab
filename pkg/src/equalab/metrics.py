"""Learning-curve statistics: smoothing, convergence detection, steady state, BER.

Convergence is pinned as: the smoothed MSE stays within `ratio` times its own
steady-state value for a confirmation span of `window` consecutive points.
Steady state is the mean squared error over the final `tail_fraction` of the
run.  Both parameters are echoed in every summary so results are comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True, slots=True)
class LearningCurve:
    """Per-iteration squared errors plus derived statistics.

    `smoothed` has length len(sq_errors) - window + 1; `convergence_iter`
    indexes into it (equivalently: the first iteration of the qualifying
    window) and is None when the run never settled.
    """

    sq_errors: np.ndarray
    smoothed: np.ndarray
    window: int
    steady_state_mse: float
    convergence_iter: int | None


@dataclass(frozen=True, slots=True)
class ComparisonReport:
    """Headline numbers per algorithm plus the convergence speedup ratio.

    `speedup` is convergence_iter(conventional) / convergence_iter(improved)
    and is None unless both algorithms ran and converged.
    """

    steady_state_mse: dict[str, float]
    convergence_iter: dict[str, int | None]
    ber: dict[str, float]
    speedup: float | None


def smooth(sq_errors, window: int) -> np.ndarray:
    """Forward moving average: out[i] = mean(sq_errors[i .. i+window-1])."""
    x = np.asarray(sq_errors, dtype=np.float64)
    if window < 1:
        raise InputError("smoothing window must be >= 1")
    if window > x.size:
        raise InputError(f"smoothing window {window} exceeds curve length {x.size}")
    return np.convolve(x, np.ones(window), mode="valid") / window


def steady_state_mse(sq_errors, tail_fraction: float) -> float:
    """Mean of the final ceil(tail_fraction * len) squared errors."""
    x = np.asarray(sq_errors, dtype=np.float64)
    if x.size == 0:
        raise InputError("empty learning curve")
    if not 0 < tail_fraction <= 1:
        raise InputError("tail fraction must be in (0, 1]")
    k = math.ceil(tail_fraction * x.size)
    return float(np.mean(x[x.size - k :]))


def convergence_iteration(curve: LearningCurve, ratio: float) -> int | None:
    """First index whose next `window` smoothed points all sit at or below
    ratio * steady_state_mse; None if no such span exists."""
    if not ratio > 0:
        raise InputError("convergence ratio must be > 0")
    below = curve.smoothed <= ratio * curve.steady_state_mse
    w = curve.window
    if below.size < w:
        return None
    run = np.convolve(below.astype(np.int64), np.ones(w, dtype=np.int64), mode="valid")
    hits = np.nonzero(run == w)[0]
    return int(hits[0]) if hits.size else None


def speedup(conv_conventional: int | None, conv_improved: int | None) -> float | None:
    """Iterations-to-convergence ratio, conventional over improved.

    Defined only when both counts are present and positive; None otherwise.
    """
    if conv_conventional is None or conv_improved is None:
        return None
    if conv_conventional <= 0 or conv_improved <= 0:
        return None
    return conv_conventional / conv_improved


def ber(decisions, transmitted, delay: int, skip: int) -> float:
    """Fraction of indices n >= skip where decisions[n] != transmitted[n - delay]."""
    d = np.asarray(decisions)
    t = np.asarray(transmitted)
    if delay < 0 or skip < 0:
        raise InputError("delay and skip must be >= 0")
    if skip < delay:
        raise InputError(f"skip {skip} must be >= delay {delay}")
    if skip >= d.size:
        raise InputError(f"skip {skip} leaves no symbols to compare (have {d.size})")
    if t.size < d.size - delay:
        raise InputError("transmitted sequence too short for the requested delay")
    compared = d[skip:]
    reference = t[skip - delay : skip - delay + compared.size]
    return float(np.mean(compared != reference))


def learning_curve(sq_errors, window: int, ratio: float, tail_fraction: float) -> LearningCurve:
    """Assemble a LearningCurve: smooth, measure steady state, find convergence."""
    x = np.asarray(sq_errors, dtype=np.float64)
    smoothed = smooth(x, window)
    steady = steady_state_mse(x, tail_fraction)
    partial = LearningCurve(x, smoothed, window, steady, None)
    conv = convergence_iteration(partial, ratio)
    return LearningCurve(x, smoothed, window, steady, conv)
