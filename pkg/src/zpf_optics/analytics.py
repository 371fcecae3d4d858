"""Closed-form detection probabilities and dimension-witness curves.

The modulus of a complex Gaussian with nonzero mean is Rician, so every
threshold-click probability reduces to a Marcum Q function.  Both tails are
computed by the Poisson-mixture series with log-space weights: the lower
tail is summed directly rather than as 1 - Q so that probabilities of order
1e-300 survive at large mean amplitude, where naive complementation loses
all precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln

from .core import SQRT2, GlobalConfig

_TAIL_TOL = 1e-13


def _poisson_terms(x: float) -> Tuple[np.ndarray, np.ndarray]:
    """Indices k = 0..K and Poisson(x) weights with tail mass below K
    under _TAIL_TOL."""

    if x < 0.0:
        raise ValueError("noncentrality must be nonnegative")
    if x == 0.0:
        return np.array([0]), np.array([1.0])
    k_max = int(x + 10.0 * math.sqrt(x + 1.0) + 25.0)
    while gammainc(k_max + 1, x) > _TAIL_TOL:
        k_max *= 2
    k = np.arange(k_max + 1)
    log_pmf = k * math.log(x) - x - gammaln(k + 1.0)
    return k, np.exp(log_pmf)


def marcum_q1(a: float, b: float) -> float:
    """First-order Marcum Q function Q1(a, b)."""

    if a < 0.0 or b < 0.0:
        raise ValueError("arguments must be nonnegative")
    k, pmf = _poisson_terms(0.5 * a * a)
    return float(min(1.0, np.dot(pmf, gammaincc(k + 1, 0.5 * b * b))))


def marcum_q1_lower(a: float, b: float) -> float:
    """1 - Q1(a, b), summed directly so tiny values keep full precision."""

    if a < 0.0 or b < 0.0:
        raise ValueError("arguments must be nonnegative")
    k, pmf = _poisson_terms(0.5 * a * a)
    return float(min(1.0, np.dot(pmf, gammainc(k + 1, 0.5 * b * b))))


def rician_no_click(mean_amplitude: complex, config: GlobalConfig) -> float:
    """Probability that |m + sigma0 z| stays at or below the threshold, for
    a standard complex Gaussian z."""

    nu = abs(mean_amplitude)
    return marcum_q1_lower(SQRT2 * nu / config.sigma0, SQRT2 * config.gamma / config.sigma0)


def single_mode_click_prob(mean_h: complex, mean_v: complex,
                           config: GlobalConfig) -> float:
    """Click probability of one detector watching a mode whose H and V
    amplitudes are independent complex Gaussians around the given means."""

    return 1.0 - rician_no_click(mean_h, config) * rician_no_click(mean_v, config)


def dark_click_prob(config: GlobalConfig) -> float:
    """Click probability on pure vacuum (both means zero)."""

    return single_mode_click_prob(0.0, 0.0, config)


# --- delayed-choice interferometer ------------------------------------------

def dc_output_means(alpha: float, phi: float, theta: float,
                    with_bs2: bool = True) -> Tuple[complex, complex]:
    """Mean H amplitudes at the two interferometer outputs.  With the
    recombining beam splitter in place, the coherent amplitude splits,
    picks up the wave-plate projection cos(2 theta) and the phase e^{i phi}
    on one arm, and recombines; without it, each detector sees one bare
    arm, so the phase drops out of every modulus and the means are given
    up to a (physically irrelevant) global phase."""

    if with_bs2:
        steer = cmath.exp(1j * phi) * math.cos(2.0 * theta)
        return 0.5 * alpha * (1.0 + steer), 0.5 * alpha * (1.0 - steer)
    return alpha / SQRT2, alpha * math.cos(2.0 * theta) / SQRT2


def dc_single_click_probs(alpha: float, phi: float, theta: float,
                          config: GlobalConfig,
                          with_bs2: bool = True) -> Tuple[float, float]:
    """Unconditional click probabilities of the two output detectors, each
    seeing its mean amplitude on H and a fresh vacuum fill on V."""

    mu1, mu2 = dc_output_means(alpha, phi, theta, with_bs2)
    return (single_mode_click_prob(mu1, 0.0, config),
            single_mode_click_prob(mu2, 0.0, config))


# --- dimension witness on the polarization interferometer --------------------

def dw_output_means(alpha: float, delta: float) -> Tuple[complex, complex]:
    """Mean amplitudes (1 +/- e^{i delta}) alpha / 2 of the two analyzer
    detectors for total interferometer phase delta."""

    steer = cmath.exp(1j * delta)
    return 0.5 * alpha * (1.0 + steer), 0.5 * alpha * (1.0 - steer)


def dw_click_probs(alpha: float, delta: float, config: GlobalConfig
                   ) -> Tuple[float, float]:
    """Unconditional click probabilities of the two analyzer detectors.
    Each detector sees an independent Gaussian of total variance sigma0^2
    around its mean, plus an independent vacuum fill on its empty
    polarization."""

    plus, minus = dw_output_means(alpha, delta)
    return (single_mode_click_prob(plus, 0.0, config),
            single_mode_click_prob(minus, 0.0, config))


def dw_conditional_probs(alpha: float, delta: float, config: GlobalConfig
                         ) -> Tuple[float, float]:
    """(p1, p2): probability of an exclusive click on detector 1 (resp. 2)
    given exactly one of the two clicked; p1 + p2 = 1 exactly.  The two
    click events are independent, so the conditioning is a simple ratio,
    computed from no-click probabilities so that exponentially small
    exclusive events keep full precision at large alpha."""

    plus, minus = dw_output_means(alpha, delta)
    q_fill = rician_no_click(0.0, config)
    q1 = rician_no_click(plus, config) * q_fill   # detector 1 stays silent
    q2 = rician_no_click(minus, config) * q_fill  # detector 2 stays silent
    excl1 = (1.0 - q1) * q2
    excl2 = q1 * (1.0 - q2)
    total = excl1 + excl2
    if total == 0.0:
        raise ZeroDivisionError("exclusive single-click events have zero probability")
    p1 = excl1 / total
    return p1, 1.0 - p1


@dataclass(frozen=True)
class DWSettings:
    """Preparation phases and measurement phases of a witness protocol; the
    interferometer phase for cell (x, y) is phis[x-1] + sigmas[y-1]."""

    phis: Tuple[float, ...]
    sigmas: Tuple[float, ...]


W2_SETTINGS = DWSettings(phis=(0.0, math.pi, -math.pi / 2, math.pi / 2),
                         sigmas=(0.0, math.pi / 2))
IDW_SETTINGS = DWSettings(phis=(7 * math.pi / 4, 5 * math.pi / 4, math.pi / 2),
                          sigmas=(math.pi / 2, 0.0))


def w2_matrix(p1_table: Sequence[Sequence[float]]) -> np.ndarray:
    """Bowles-Quintino-Brunner 2x2 witness matrix from a 4x2 table of
    p1(x, y) values."""

    p = np.asarray(p1_table, dtype=float)
    if p.shape != (4, 2):
        raise ValueError(f"need a 4x2 table of p1(x, y), got shape {p.shape}")
    return np.array([
        [p[0, 0] - p[1, 0], p[2, 0] - p[3, 0]],
        [p[0, 1] - p[1, 1], p[2, 1] - p[3, 1]],
    ])


def idw_value(b_table: Sequence[Sequence[float]]) -> float:
    """|B11 + B12 + B21 - B22 - B31| from a 3x2 table of correlators
    B(x, y) = p1(x, y) - p2(x, y)."""

    b = np.asarray(b_table, dtype=float)
    if b.shape != (3, 2):
        raise ValueError(f"need a 3x2 table of B(x, y), got shape {b.shape}")
    return float(abs(b[0, 0] + b[0, 1] + b[1, 0] - b[1, 1] - b[2, 0]))


def r_min(idw: float) -> float:
    """Retrocausality lower bound implied by a witness value."""

    return max((idw - 3.0) / 4.0, 0.0)


def witness_w2(alpha: float, config: GlobalConfig,
               settings: DWSettings = W2_SETTINGS) -> float:
    """|det W2| predicted by the model at coherent amplitude alpha."""

    table = [[dw_conditional_probs(alpha, phi + sigma, config)[0]
              for sigma in settings.sigmas] for phi in settings.phis]
    return float(abs(np.linalg.det(w2_matrix(table))))


def witness_idw(alpha: float, config: GlobalConfig,
                settings: DWSettings = IDW_SETTINGS) -> float:
    """Dimension witness I_DW predicted by the model at amplitude alpha."""

    table = []
    for phi in settings.phis:
        row = []
        for sigma in settings.sigmas:
            p1, p2 = dw_conditional_probs(alpha, phi + sigma, config)
            row.append(p1 - p2)
        table.append(row)
    return idw_value(table)


# --- quantum reference predictions --------------------------------------------

def quantum_q_pdbs(theta: float, phi: float) -> float:
    """Ideal two-photon prediction for the morphing experiment."""

    return (math.cos(0.5 * phi) ** 2 * math.sin(2.0 * theta) ** 2
            + 0.5 * math.cos(2.0 * theta) ** 2)


@dataclass(frozen=True)
class HeraldSettings:
    """Phase-retarder angles of the heralded witness experiment: the
    effective interferometer phase is alphas[x-1] + betas[y-1] for a herald
    on the first detector and an extra pi for the second."""

    alphas: Tuple[float, ...] = (math.pi / 2, math.pi / 4)
    betas: Tuple[float, ...] = (math.pi / 2, 0.0)


HERALD_SETTINGS = HeraldSettings()


def herald_phase(j: int, x: int, y: int,
                 settings: HeraldSettings = HERALD_SETTINGS) -> float:
    """Total phase phi_jxy for herald j in {3, 4} and settings (x, y)."""

    if j not in (3, 4):
        raise ValueError("herald index must be 3 or 4")
    extra = 0.0 if j == 3 else math.pi
    return settings.alphas[x - 1] + extra + settings.betas[y - 1]


def quantum_q_herald(j: int, x: int, y: int,
                     settings: HeraldSettings = HERALD_SETTINGS) -> float:
    """Ideal single-photon prediction q_1j(x, y) for a click on the first
    measurement detector."""

    return 0.25 * abs(1.0 + cmath.exp(1j * herald_phase(j, x, y, settings))) ** 2
