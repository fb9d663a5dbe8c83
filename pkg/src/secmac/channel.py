"""Scalar Gaussian multiple-access channel with an eavesdropper.

K single-antenna users share one real channel toward the intended
receiver (gains h_k) while an eavesdropper listens through its own gains
h_{k,e}.  Both observations are corrupted by independent unit-variance
Gaussian noise.  All gains are fixed and known everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterError
from .rng import stream

Real = float | Fraction


@dataclass(frozen=True)
class ChannelGains:
    """Main-receiver and eavesdropper gains for K users."""

    h: tuple[float, ...]
    h_e: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(x) for x in self.h))
        object.__setattr__(self, "h_e", tuple(float(x) for x in self.h_e))
        if len(self.h) != len(self.h_e):
            raise ParameterError(
                f"gain vectors differ in length: {len(self.h)} vs {len(self.h_e)}"
            )
        if len(self.h) < 1:
            raise ParameterError("at least one user required")
        for k, g in enumerate(self.h_e):
            if g == 0.0:
                raise ParameterError(f"eavesdropper gain h_e[{k}] is zero")

    @property
    def K(self) -> int:
        return len(self.h)


@dataclass(frozen=True)
class NormalizedGains:
    """Gain ratios g_k = (h_k/h_{k,e}) / (h_K/h_{K,e}), with g_K = 1.

    ``scale`` is the last ratio h_K/h_{K,e} that was divided out, so the
    original ratios are recoverable as scale * g.  Entries may be exact
    Fractions when the caller works over the rationals.
    """

    g: tuple[Real, ...]
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(self.g))
        if len(self.g) < 1:
            raise ParameterError("empty gain vector")
        if self.g[-1] != 1:
            raise ParameterError(f"last normalized gain must be 1, got {self.g[-1]}")

    @property
    def K(self) -> int:
        return len(self.g)

    def as_floats(self) -> np.ndarray:
        return np.array([float(x) for x in self.g], dtype=float)

    @property
    def exact(self) -> bool:
        """True when every ratio is stored as an exact rational."""
        return all(isinstance(x, (Fraction, int)) for x in self.g)


@dataclass(frozen=True)
class PowerParams:
    """Per-user power budget P, effective power and the scheme exponent."""

    P: float
    P_tilde: float
    epsilon: float

    def __post_init__(self):
        if self.P <= 0 or self.P_tilde <= 0:
            raise ParameterError("powers must be positive")
        if not 0 < self.epsilon < 1:
            raise ParameterError(f"epsilon must be in (0,1), got {self.epsilon}")

    @classmethod
    def from_gains(cls, gains: "ChannelGains", P: float, epsilon: float) -> "PowerParams":
        """Effective power taken as min_k h_{k,e}^2 P, so every user's
        average-power constraint holds simultaneously."""
        return cls(P=P, P_tilde=effective_power(gains, P), epsilon=epsilon)


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise variance (1.0 unless stress-testing)."""

    variance: float = 1.0

    def __post_init__(self):
        if self.variance < 0:
            raise ParameterError(f"variance must be >= 0, got {self.variance}")


def normalize_gains(gains: ChannelGains) -> NormalizedGains:
    """Reduce the channel to ratio form with the last ratio equal to 1.

    Raises ParameterError if any h_e[k] is zero (guaranteed absent by
    ChannelGains) or if h[K] is zero, since the last ratio is divided out.
    """
    if gains.h[-1] == 0.0:
        raise ParameterError(f"main gain h[{gains.K - 1}] is zero; cannot normalize")
    ratios = [hk / hek for hk, hek in zip(gains.h, gains.h_e)]
    scale = ratios[-1]
    g = tuple(r / scale for r in ratios[:-1]) + (1.0,)
    return NormalizedGains(g=g, scale=scale)


def sample_gains(seed: int, K: int, low: float = 0.5, high: float = 2.0) -> ChannelGains:
    """Draw 2K i.i.d. uniform gains on [low, high].

    Continuous sampling makes the ratio set rationally independent with
    probability one.  Deterministic for a fixed seed.
    """
    if K < 2:
        raise ParameterError(f"K must be >= 2, got {K}")
    if low <= 0 or low >= high:
        raise ParameterError(f"need 0 < low < high, got [{low}, {high}]")
    rng = stream(seed, "gains")
    vals = rng.uniform(low, high, size=2 * K)
    return ChannelGains(h=tuple(vals[:K]), h_e=tuple(vals[K:]))


def effective_power(gains: ChannelGains, P: float) -> float:
    """Effective power min_k h_{k,e}^2 * P.

    The minimum over users is the single value that keeps every per-user
    constraint E[X_k^2] <= P satisfied simultaneously.
    """
    if P <= 0:
        raise ParameterError(f"P must be positive, got {P}")
    return min(he * he for he in gains.h_e) * P


def transmit(
    x: np.ndarray,
    gains: ChannelGains,
    noise: NoiseModel = NoiseModel(),
    seed: int | np.random.SeedSequence = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Send K blocks of n symbols; return (y, z) at receiver and eavesdropper.

    ``x`` has shape (K, n).  y_i = sum_k h[k] x[k,i] + noise and z_i uses
    h_e with an independent noise stream.  Both noises are keyed off
    ``seed`` so repeated calls are bit-identical.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ParameterError(f"x must be (K, n), got shape {x.shape}")
    if x.shape[0] != gains.K:
        raise ParameterError(f"x has {x.shape[0]} rows for K={gains.K} users")
    n = x.shape[1]
    if n < 1:
        raise ParameterError("block length must be >= 1")
    y = np.asarray(gains.h, dtype=float) @ x
    z = np.asarray(gains.h_e, dtype=float) @ x
    if noise.variance > 0:
        sd = np.sqrt(noise.variance)
        y = y + sd * stream(seed, "transmit/main").standard_normal(n)
        z = z + sd * stream(seed, "transmit/eve").standard_normal(n)
    return y, z
