"""Hidden-variable sampling and Jones-vector value types.

The zero-point field is realized as independent standard complex Gaussian
draws.  Every draw is addressed by (seed, trial_index, draw_index) and is a
pure function of that address: a Philox block cipher is keyed on the seed
with the counter holding (trial, draw), and the first two 64-bit words of
the block feed a Box-Muller transform.  This makes ensembles reproducible
regardless of worker count or scheduling, and lets any single sample be
regenerated in isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.random import Philox

SQRT2 = math.sqrt(2.0)

_U64_MASK = (1 << 64) - 1
_KEY_MASK = (1 << 128) - 1


@dataclass(frozen=True)
class GlobalConfig:
    """Scale of the zero-point field and the detector click threshold."""

    sigma0: float = 1.0 / SQRT2
    gamma: float = 1.95

    def __post_init__(self) -> None:
        if not (self.sigma0 > 0.0 and math.isfinite(self.sigma0)):
            raise ValueError(f"sigma0 must be positive and finite, got {self.sigma0}")
        if not (self.gamma >= 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be nonnegative and finite, got {self.gamma}")


@dataclass(frozen=True)
class DrawAddress:
    """Address of one hidden-variable draw; the same address always yields
    the same sample."""

    seed: int
    trial_index: int
    draw_index: int

    def __post_init__(self) -> None:
        if self.trial_index < 0 or self.draw_index < 0:
            raise ValueError("trial_index and draw_index must be nonnegative")


Amplitude = Union[complex, np.ndarray]


@dataclass(frozen=True)
class JonesVector:
    """Complex amplitudes of the horizontal and vertical polarization
    components of one spatial mode.  Components may be scalars or ndarrays
    (one entry per trial); all element transforms are shape-agnostic."""

    h: Amplitude
    v: Amplitude

    def intensity(self) -> Union[float, np.ndarray]:
        return np.abs(self.h) ** 2 + np.abs(self.v) ** 2


def sample_gaussian_block(seed: int, draw_index: int, trial_start: int, n: int) -> np.ndarray:
    """Standard complex Gaussian samples for trials [trial_start, trial_start+n)
    at a fixed draw index.  Element t of the result equals the scalar sample
    at address (seed, trial_start + t, draw_index)."""

    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return np.empty(0, dtype=np.complex128)
    bit_gen = Philox(
        key=seed & _KEY_MASK,
        counter=[trial_start & _U64_MASK, draw_index & _U64_MASK, 0, 0],
    )
    words = bit_gen.random_raw(4 * n).reshape(n, 4)
    # (0, 1] for the log and [0, 1) for the angle
    u1 = ((words[:, 0] >> np.uint64(11)) + np.uint64(1)) * 2.0**-53
    u2 = (words[:, 1] >> np.uint64(11)) * 2.0**-53
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = (2.0 * np.pi) * u2
    return (radius * np.cos(angle) + 1j * radius * np.sin(angle)) / SQRT2


def sample_standard_complex_gaussian(addr: DrawAddress) -> complex:
    """One standard complex Gaussian z = (x + iy)/sqrt(2) with E[z] = 0,
    E[|z|^2] = 1 and E[z^2] = 0, as a pure function of the address."""

    return complex(sample_gaussian_block(addr.seed, addr.draw_index, addr.trial_index, 1)[0])


def jones_in_basis(vec: JonesVector, angle: float) -> JonesVector:
    """Components of a Jones vector along the rotated orthonormal basis
    (cos a, sin a), (-sin a, cos a); preserves total intensity."""

    c, s = math.cos(angle), math.sin(angle)
    return JonesVector(vec.h * c + vec.v * s, -vec.h * s + vec.v * c)
