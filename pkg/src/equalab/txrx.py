"""Transmit side and channel: BPSK source, FIR distortion, additive Gaussian noise.

All randomness is drawn from seeded PCG64 streams.  Gaussian deviates use an
explicit Box-Muller transform over the uniform stream, so the generator is a
named, stable recipe that other implementations can match statistically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import taps
from .errors import ConfigurationError, InputError


@dataclass(frozen=True, slots=True)
class ChannelModel:
    """FIR channel and noise description.

    `impulse` is the channel impulse response (non-empty, finite);
    `noise_variance` 0 means a noiseless channel.
    """

    impulse: np.ndarray
    noise_variance: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        try:
            validated = taps(self.impulse)
        except ConfigurationError as exc:
            raise ConfigurationError(str(exc), field="channel") from None
        object.__setattr__(self, "impulse", validated)
        if self.noise_variance < 0:
            raise ConfigurationError("must be >= 0", field="noise_variance")


def generate_bpsk(n: int, seed: int) -> np.ndarray:
    """n equiprobable +/-1 symbols from a PCG64 stream seeded with `seed`."""
    if n < 1:
        raise InputError("symbol count must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return np.where(rng.random(n) < 0.5, 1.0, -1.0)


def gaussian(n: int, variance: float, seed: int) -> np.ndarray:
    """n zero-mean Gaussian deviates with the given variance, Box-Muller over PCG64."""
    if variance < 0:
        raise InputError("variance must be >= 0")
    if variance == 0:
        return np.zeros(n, dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(seed))
    m = (n + 1) // 2
    u1 = 1.0 - rng.random(m)  # (0, 1], keeps log() finite
    u2 = rng.random(m)
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])[:n]
    return np.sqrt(variance) * z


def apply_channel(tx, ch: ChannelModel) -> np.ndarray:
    """Convolve the transmitted symbols with the channel impulse and add noise.

    Output sample n is sum_k impulse[k] * tx[n-k] (zero before the start)
    plus seeded Gaussian noise; output length equals the input length.
    """
    x = np.asarray(tx, dtype=np.float64)
    if x.size == 0:
        raise InputError("transmitted sequence is empty")
    y = np.convolve(x, ch.impulse)[: x.size]
    if ch.noise_variance > 0:
        y = y + gaussian(x.size, ch.noise_variance, ch.noise_seed)
    return y
