"""Classical chaotic maps: Bernoulli, baker (plain and dissipative), standard map,
Zaslavsky map, and their noisy variants.

All step functions are pure; stochastic steps take an explicit RNG stream.
Array versions (suffix ``_array``) operate on numpy arrays in a vectorized way
and are the workhorses for ensemble simulations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhasePoint:
    """Point (x, p) on the unit square, the state of the baker-map family."""

    x: float
    p: float

    def __post_init__(self):
        if not (0.0 <= self.x < 1.0 and 0.0 <= self.p < 1.0):
            raise ValueError(f"point ({self.x}, {self.p}) outside the unit square")


@dataclass(frozen=True)
class RotorState:
    """Rotor state (theta, p): angle on [0, 2*pi), unbounded angular momentum."""

    theta: float
    p: float

    def __post_init__(self):
        if not (0.0 <= self.theta < TWO_PI):
            raise ValueError(f"theta={self.theta} not reduced to [0, 2*pi)")
        if not math.isfinite(self.p):
            raise ValueError("p must be finite")


@dataclass(frozen=True)
class NoiseSpec:
    """Per-step angle noise for the noisy standard map.

    kind "none": no noise. kind "gaussian": xi ~ N(0, variance), the
    mean-momentum measurement mode. kind "reset": with probability
    ``reset_prob`` the angle kick xi is drawn uniformly from [0, 2*pi),
    otherwise xi = 0; the full-distribution measurement mode.
    """

    kind: str = "none"
    variance: float = 0.0
    reset_prob: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "reset"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.variance < 0.0:
            raise ValueError("variance must be >= 0")
        if not (0.0 <= self.reset_prob <= 1.0):
            raise ValueError("reset probability must lie in [0, 1]")

    def make_rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)


def bernoulli_step(x: float) -> float:
    """One step of the doubling map x -> 2x mod 1."""
    if not (0.0 <= x < 1.0):
        raise ValueError(f"x={x} outside [0, 1)")
    return (2.0 * x) % 1.0


_BELOW_ONE = math.nextafter(1.0, 0.0)


def baker_step(pt: PhasePoint) -> PhasePoint:
    """Stretch-and-fold map of the unit square: x' = 2x mod 1, p' = (p + int(2x))/2.

    (p + 1)/2 is strictly below 1 but can round to exactly 1.0 when p is
    within one ulp of 1; it is clamped back into [0, 1) so the inverse map
    stays a one-ulp roundtrip.
    """
    branch = math.floor(2.0 * pt.x)
    return PhasePoint((2.0 * pt.x) % 1.0, min(0.5 * (pt.p + branch), _BELOW_ONE))


def baker_inverse(pt: PhasePoint) -> PhasePoint:
    """Inverse baker map; interchanges the roles of x and p in baker_step."""
    branch = math.floor(2.0 * pt.p)
    return PhasePoint(min(0.5 * (pt.x + branch), _BELOW_ONE), (2.0 * pt.p) % 1.0)


def dissipative_baker_step(pt: PhasePoint, a: float) -> PhasePoint:
    """Baker step preceded by momentum contraction p -> a*p, 0 < a <= 1."""
    if not (0.0 < a <= 1.0):
        raise ValueError(f"contraction factor a={a} outside (0, 1]")
    return baker_step(PhasePoint(pt.x, a * pt.p))


def standard_map_step(s: RotorState, K: float) -> RotorState:
    """Kicked-rotor stroboscopic map: theta' = theta + p, p' = p + K sin(theta').

    The angle update is evaluated first; the kick uses the updated angle.
    """
    theta = (s.theta + s.p) % TWO_PI
    return RotorState(theta, s.p + K * math.sin(theta))


def zaslavsky_step(s: RotorState, K: float, lam: float) -> RotorState:
    """Dissipative standard map with per-step momentum damping exp(-lam)."""
    if lam < 0.0:
        raise ValueError("damping rate lam must be >= 0")
    damped = math.exp(-lam) * s.p
    theta = (s.theta + damped) % TWO_PI
    return RotorState(theta, damped + K * math.sin(theta))


def noisy_standard_step(
    s: RotorState,
    K: float,
    noise: NoiseSpec,
    rng: np.random.Generator,
    lam: float = 0.0,
) -> RotorState:
    """Standard/Zaslavsky step with a random angle kick xi added to theta'."""
    if lam < 0.0:
        raise ValueError("damping rate lam must be >= 0")
    xi = 0.0
    if noise.kind == "gaussian" and noise.variance > 0.0:
        xi = rng.normal(0.0, math.sqrt(noise.variance))
    elif noise.kind == "reset" and noise.reset_prob > 0.0:
        if rng.random() < noise.reset_prob:
            xi = rng.uniform(0.0, TWO_PI)
    damped = math.exp(-lam) * s.p
    theta = (s.theta + damped + xi) % TWO_PI
    return RotorState(theta, damped + K * math.sin(theta))


# ---------------------------------------------------------------------------
# Vectorized versions used by ensembles. State arrays are modified in place.
# ---------------------------------------------------------------------------

def bernoulli_array(x: np.ndarray) -> None:
    x *= 2.0
    x %= 1.0


def baker_array(x: np.ndarray, p: np.ndarray) -> None:
    branch = np.floor(2.0 * x)
    x *= 2.0
    x %= 1.0
    p += branch
    p *= 0.5


def dissipative_baker_array(x: np.ndarray, p: np.ndarray, a: float) -> None:
    p *= a
    baker_array(x, p)


def standard_map_array(theta: np.ndarray, p: np.ndarray, K: float) -> None:
    theta += p
    theta %= TWO_PI
    p += K * np.sin(theta)


def zaslavsky_array(theta: np.ndarray, p: np.ndarray, K: float, lam: float) -> None:
    p *= math.exp(-lam)
    theta += p
    theta %= TWO_PI
    p += K * np.sin(theta)


def noisy_standard_array(
    theta: np.ndarray,
    p: np.ndarray,
    K: float,
    noise: NoiseSpec,
    rng: np.random.Generator,
    lam: float = 0.0,
) -> None:
    p *= math.exp(-lam)
    theta += p
    if noise.kind == "gaussian" and noise.variance > 0.0:
        theta += rng.normal(0.0, math.sqrt(noise.variance), size=theta.shape)
    elif noise.kind == "reset" and noise.reset_prob > 0.0:
        hit = rng.random(size=theta.shape) < noise.reset_prob
        theta[hit] += rng.uniform(0.0, TWO_PI, size=int(hit.sum()))
    theta %= TWO_PI
    p += K * np.sin(theta)
