"""Decision-feedback equalizer state machine.

Per received sample: the feed-forward filter runs on the received history,
the feedback filter output (driven by past hard decisions) is subtracted,
the result is quantized to +/-1, and the error between the reference symbol
and the combiner output drives the weight update.  In decision-directed
mode the reference is the quantizer output itself; a training preamble can
use the true (delayed) transmitted symbols instead.

State is an explicit value: each step returns a fresh `DfeState` plus a
`StepTrace` of what happened, so runs are replayable and side-effect free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import adapt
from .adapt import AdaptParams
from .dsp import DelayLine, TapWeights, delay_line, dot, shift_in
from .errors import ConfigurationError, InputError

ALGO_CONVENTIONAL = "conventional"
ALGO_IMPROVED = "improved"
MODE_DECISION_DIRECTED = "decision_directed"
MODE_TRAINED = "trained"

# Reference used during a training preamble while the decision delay still
# points before the start of the transmitted sequence (at most `delay`
# cold-start steps, where the weights are still essentially zero).
PAD_SYMBOL = 1.0


@dataclass(frozen=True, slots=True)
class DfeConfig:
    """Static equalizer configuration.

    `decision_delay` is the lag of the reference symbol relative to the
    current received sample; None selects the FF half-length (n_ff - 1) // 2.
    `training_len` must be 0 in decision-directed mode.
    """

    n_ff: int
    n_fb: int
    mu: float
    algo: str = ALGO_CONVENTIONAL
    mode: str = MODE_DECISION_DIRECTED
    training_len: int = 0
    decision_delay: int | None = None
    step_floor: float = 0.0
    step_cap: float | None = None
    center_spike: bool = False

    def __post_init__(self):
        if self.n_ff < 1:
            raise ConfigurationError("must be >= 1", field="n_ff")
        if self.n_fb < 0:
            raise ConfigurationError("must be >= 0", field="n_fb")
        if self.algo not in (ALGO_CONVENTIONAL, ALGO_IMPROVED):
            raise ConfigurationError(f"unknown algorithm {self.algo!r}", field="algo")
        if self.mode not in (MODE_DECISION_DIRECTED, MODE_TRAINED):
            raise ConfigurationError(f"unknown mode {self.mode!r}", field="mode")
        if self.training_len < 0:
            raise ConfigurationError("must be >= 0", field="training_len")
        if self.mode == MODE_DECISION_DIRECTED and self.training_len != 0:
            raise ConfigurationError("must be 0 in decision-directed mode", field="training_len")
        if self.decision_delay is not None and self.decision_delay < 0:
            raise ConfigurationError("must be >= 0", field="decision_delay")
        AdaptParams(self.mu, self.step_floor, self.step_cap)  # range checks
        if self.center_spike and not self.delay < self.n_ff:
            raise ConfigurationError(
                "center-spike initialization needs decision_delay < n_ff", field="decision_delay"
            )

    @property
    def delay(self) -> int:
        """Resolved reference delay."""
        return (self.n_ff - 1) // 2 if self.decision_delay is None else self.decision_delay

    @property
    def adapt_params(self) -> AdaptParams:
        return AdaptParams(self.mu, self.step_floor, self.step_cap)


@dataclass(frozen=True, slots=True)
class DfeState:
    """Full equalizer state between steps.

    `fb_line` holds the most recent hard decisions, newest first;
    `prev_error` is e(n-1) for the variable-step rule, 0 before the first step.
    """

    ff_weights: TapWeights
    fb_weights: TapWeights
    ff_line: DelayLine
    fb_line: DelayLine
    prev_error: float = 0.0
    iteration: int = 0


@dataclass(frozen=True, slots=True)
class StepTrace:
    """What one step did: combiner output, decision, error, step size applied."""

    iteration: int
    combiner_out: float
    decision: float
    error: float
    effective_step: float


def initial_state(cfg: DfeConfig) -> DfeState:
    """Fresh state: zero weights and lines, optional unit spike at the delay tap."""
    ff = np.zeros(cfg.n_ff, dtype=np.float64)
    if cfg.center_spike:
        ff[cfg.delay] = 1.0
    return DfeState(ff, np.zeros(cfg.n_fb, dtype=np.float64), delay_line(cfg.n_ff), delay_line(cfg.n_fb))


def quantize(y: float) -> float:
    """Hard decision: +1 for positive input, -1 for negative, +1 at exactly 0."""
    if not math.isfinite(y):
        raise InputError(f"non-finite quantizer input: {y!r}")
    return 1.0 if y >= 0.0 else -1.0


def combiner(state: DfeState, r: float) -> tuple[float, DfeState]:
    """Shift `r` into the FF line and form y = ff.line' - fb.decisions.

    The feedback line is not advanced here; it moves only once the step's
    decision is known (see `dfe_step`).
    """
    ff_line = shift_in(state.ff_line, r)
    y = dot(state.ff_weights, ff_line) - dot(state.fb_weights, state.fb_line)
    mid = DfeState(
        state.ff_weights, state.fb_weights, ff_line, state.fb_line, state.prev_error, state.iteration
    )
    return y, mid


def form_error(y: float, reference: float) -> float:
    """Adaptation error e = reference - y."""
    return reference - y


def dfe_step(
    state: DfeState, r: float, true_symbol: float | None, cfg: DfeConfig
) -> tuple[StepTrace, DfeState]:
    """Advance the equalizer by one received sample `r`.

    `true_symbol` is the delayed transmitted symbol and is required (and
    used as the error reference) only while `cfg.mode` is trained and the
    iteration count is below `cfg.training_len`; otherwise the quantizer
    decision is the reference.  Weight updates use the regressors that
    produced y (the shifted FF line and the pre-decision FB line); the new
    decision enters the FB line afterwards.
    """
    y, mid = combiner(state, r)
    d = quantize(y)
    if cfg.mode == MODE_TRAINED and state.iteration < cfg.training_len:
        if true_symbol is None:
            raise InputError(f"training reference required at iteration {state.iteration}")
        reference = float(true_symbol)
        if reference not in (1.0, -1.0):
            raise InputError(f"training reference must be +1 or -1, got {true_symbol!r}")
    else:
        reference = d
    e = form_error(y, reference)
    params = AdaptParams(cfg.mu, cfg.step_floor, cfg.step_cap)
    if cfg.algo == ALGO_IMPROVED:
        ff_w, fb_w, step = adapt.improved_step(
            params, mid.ff_weights, mid.ff_line, mid.fb_weights, mid.fb_line, e, state.prev_error
        )
    else:
        ff_w, fb_w, step = adapt.conventional_step(
            params, mid.ff_weights, mid.ff_line, mid.fb_weights, mid.fb_line, e
        )
    fb_line = shift_in(mid.fb_line, d)
    nxt = DfeState(ff_w, fb_w, mid.ff_line, fb_line, e, state.iteration + 1)
    return StepTrace(state.iteration, y, d, e, step), nxt


@dataclass(slots=True)
class EqualizerRun:
    """Arrays collected from one full pass: e(n)^2 and the hard decisions."""

    sq_errors: np.ndarray
    decisions: np.ndarray
    final_state: DfeState


def run_equalizer(received, cfg: DfeConfig, transmitted=None) -> EqualizerRun:
    """Run the equalizer over a whole received sequence.

    In trained mode the reference for iteration n is transmitted[n - delay]
    (padded with +1 while n < delay); after `training_len` iterations the
    equalizer switches to its own decisions.
    """
    r = np.ascontiguousarray(received, dtype=np.float64)
    if r.size == 0:
        raise InputError("received sequence is empty")
    train_until = cfg.training_len if cfg.mode == MODE_TRAINED else 0
    tx = None
    if train_until > 0:
        if transmitted is None:
            raise InputError("trained mode requires the transmitted symbols")
        tx = np.asarray(transmitted, dtype=np.float64)
        if tx.size + cfg.delay < min(train_until, r.size):
            raise InputError("transmitted sequence too short for the training preamble")
    delay = cfg.delay
    state = initial_state(cfg)
    sq = np.empty(r.size, dtype=np.float64)
    dec = np.empty(r.size, dtype=np.float64)
    for i in range(r.size):
        ts = None
        if i < train_until:
            ts = tx[i - delay] if i >= delay else PAD_SYMBOL
        trace, state = dfe_step(state, r[i], ts, cfg)
        sq[i] = trace.error * trace.error
        dec[i] = trace.decision
    return EqualizerRun(sq, dec, state)
