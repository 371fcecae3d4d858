"""Light sources and optical element transforms on Jones vectors.

Sources map fresh hidden-variable draws to initial Jones vectors; elements
are unitary maps on the amplitudes of one or two spatial modes, except for
the polarizer which discards one polarization axis and back-fills it with a
fresh vacuum draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .core import SQRT2, Amplitude, JonesVector


@dataclass(frozen=True)
class LaserSourceParams:
    """Mean amplitude and phase of attenuated coherent light."""

    alpha: complex


@dataclass(frozen=True)
class EntangledSourceParams:
    """Squeezing strength of the two-mode entanglement source."""

    r: float

    def __post_init__(self) -> None:
        if self.r < 0.0:
            raise ValueError(f"squeezing strength must be nonnegative, got {self.r}")


def sample_laser(params: LaserSourceParams, z_h: Amplitude, z_v: Amplitude,
                 sigma0: float) -> JonesVector:
    """Coherent beam: mean amplitude alpha on H plus ZPF fluctuations on
    both polarizations."""

    return JonesVector(params.alpha + sigma0 * z_h, sigma0 * z_v)


def sample_vacuum(z_h: Amplitude, z_v: Amplitude, sigma0: float) -> JonesVector:
    """Pure ZPF mode."""

    return JonesVector(sigma0 * z_h, sigma0 * z_v)


def sample_entangled_pair(params: EntangledSourceParams,
                          z1_h: Amplitude, z1_v: Amplitude,
                          z2_h: Amplitude, z2_v: Amplitude,
                          sigma0: float) -> Tuple[JonesVector, JonesVector]:
    """Two cross-conjugate squeezed beams; statistically dependent for r > 0
    and independent vacuum modes at r = 0."""

    ch, sh = math.cosh(params.r), math.sinh(params.r)
    first = JonesVector(sigma0 * (z1_h * ch + np.conj(z2_h) * sh),
                        sigma0 * (z1_v * ch + np.conj(z2_v) * sh))
    second = JonesVector(sigma0 * (z2_h * ch + np.conj(z1_h) * sh),
                         sigma0 * (z2_v * ch + np.conj(z1_v) * sh))
    return first, second


def apply_beam_splitter(a: JonesVector, b: JonesVector) -> Tuple[JonesVector, JonesVector]:
    """50/50 splitter: sum on the first output, difference on the second."""

    return (JonesVector((a.h + b.h) / SQRT2, (a.v + b.v) / SQRT2),
            JonesVector((a.h - b.h) / SQRT2, (a.v - b.v) / SQRT2))


def apply_half_wave_plate(vec: JonesVector, theta: float) -> JonesVector:
    """Half-wave plate with fast-axis angle theta."""

    c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return JonesVector(vec.h * c + vec.v * s, vec.h * s - vec.v * c)


def apply_phase_delay(vec: JonesVector, phi: float) -> JonesVector:
    """Global phase factor e^{i phi} on both polarization components."""

    p = complex(math.cos(phi), math.sin(phi))
    return JonesVector(vec.h * p, vec.v * p)


def apply_polarizer(vec: JonesVector, psi: float, fresh: Amplitude,
                    sigma0: float) -> JonesVector:
    """Polarizer along axis psi: the component along the axis is kept, the
    orthogonal component is replaced by a fresh vacuum draw (the ignored
    port of a polarizing beam splitter), and the result is expressed back
    in the H/V basis."""

    c, s = math.cos(psi), math.sin(psi)
    kept = vec.h * c + vec.v * s
    fill = sigma0 * fresh
    return JonesVector(kept * c - fill * s, kept * s + fill * c)


def apply_pbs(a: JonesVector, b: JonesVector) -> Tuple[JonesVector, JonesVector]:
    """Polarizing beam splitter: horizontal components are transmitted,
    vertical components are reflected into the other spatial mode."""

    return JonesVector(a.h, b.v), JonesVector(b.h, a.v)


def apply_mirror_swap(a: JonesVector, b: JonesVector) -> Tuple[JonesVector, JonesVector]:
    """Mirror pair exchanging the two spatial modes, with no extra phase."""

    return b, a


def apply_pdbs(a: JonesVector, b: JonesVector) -> Tuple[JonesVector, JonesVector]:
    """Polarization-dependent beam splitter: 50/50 for horizontal light,
    transparent except for a spatial-mode swap for vertical light."""

    return (JonesVector((a.h + b.h) / SQRT2, b.v),
            JonesVector((a.h - b.h) / SQRT2, a.v))


def element_matrix(kind: str, angle: float = 0.0) -> np.ndarray:
    """Induced matrix of a linear element on the stacked amplitudes it
    touches: 2x2 for one-mode kinds (H, V), 4x4 for two-mode kinds
    (aH, aV, bH, bV).  The polarizer has no linear matrix and is rejected."""

    if kind == "hwp":
        c, s = math.cos(2.0 * angle), math.sin(2.0 * angle)
        return np.array([[c, s], [s, -c]], dtype=complex)
    if kind == "phase":
        p = complex(math.cos(angle), math.sin(angle))
        return np.array([[p, 0], [0, p]], dtype=complex)
    if kind == "bs":
        eye = np.eye(2)
        return np.block([[eye, eye], [eye, -eye]]) / SQRT2
    if kind == "mirror_swap":
        eye = np.eye(2)
        zero = np.zeros((2, 2))
        return np.block([[zero, eye], [eye, zero]]).astype(complex)
    if kind == "pbs":
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = 1  # aH -> aH
        m[1, 3] = 1  # bV -> aV
        m[2, 2] = 1  # bH -> bH
        m[3, 1] = 1  # aV -> bV
        return m
    if kind == "pdbs":
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = 1 / SQRT2
        m[0, 2] = 1 / SQRT2
        m[2, 0] = 1 / SQRT2
        m[2, 2] = -1 / SQRT2
        m[1, 3] = 1  # bV -> aV
        m[3, 1] = 1  # aV -> bV
        return m
    raise ValueError(f"element kind {kind!r} has no induced linear matrix")


LINEAR_KINDS = ("bs", "hwp", "phase", "mirror_swap", "pbs", "pdbs")
