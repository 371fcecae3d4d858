"""Multi-run measurement procedures built on top of the engine.

Witness quantities are not single ensemble estimates: the determinant
witness needs eight runs (four preparation phases times two measurement
phases), the I_DW witness needs six, and the heralded witness needs four
coincidence runs per squeezing value.  These drivers expand the phase
tables of a witness-bearing spec into concrete runs and assemble the
derived quantities, mirroring the closed-form constructions in
`analytics`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .analytics import HeraldSettings, idw_value, r_min, w2_matrix
from .builtins import DWProtocolSettings, builtin
from .detect import (Click, NoClick, Predicate, RunStats, accidental_estimate,
                     evaluate, wilson_interval)
from .dsl import ExperimentSpec
from .engine import DegenerateDenominatorError, count_events, run_ensemble, run_patterns


# --- dimension witness on the laser interferometer ---------------------------

@dataclass(frozen=True)
class DWWitnessResult:
    """Monte-Carlo witness values at one coherent intensity."""

    alpha2: float
    det_w2: float
    idw: float
    r_min: float
    reference: RunStats  # the (phi_1, sigma_1) determinant-witness cell


def _dw_p1(spec: ExperimentSpec, delta: float, trials: Optional[int],
           workers: int) -> RunStats:
    point = spec.with_params(delta=delta)
    return run_ensemble(point, trials=trials, workers=workers)


def dw_witness_point(alpha2: float, spec: Optional[ExperimentSpec] = None,
                     trials: Optional[int] = None, workers: int = 1,
                     ) -> DWWitnessResult:
    """Run both witness protocols on the `dw` setup at intensity
    |alpha|^2 = alpha2.  Each protocol cell conditions on exclusive single
    clicks, so every run's estimate is p1 and the correlator is 2 p1 - 1."""

    if spec is None:
        spec = builtin("dw")
    settings = spec.witness_settings
    if not isinstance(settings, DWProtocolSettings):
        raise ValueError("spec does not carry dimension-witness settings")
    spec = spec.with_params(alpha2=alpha2, alpha=math.sqrt(alpha2))

    reference: Optional[RunStats] = None
    p1_table = []
    for phi in settings.w2.phis:
        row = []
        for sigma in settings.w2.sigmas:
            stats = _dw_p1(spec, phi + sigma, trials, workers)
            if reference is None:
                reference = stats
            row.append(stats.estimate)
        p1_table.append(row)
    det_w2 = float(abs(np.linalg.det(w2_matrix(p1_table))))

    b_table = []
    for phi in settings.idw.phis:
        row = []
        for sigma in settings.idw.sigmas:
            stats = _dw_p1(spec, phi + sigma, trials, workers)
            row.append(2.0 * stats.estimate - 1.0)
        b_table.append(row)
    idw = idw_value(b_table)
    return DWWitnessResult(alpha2=alpha2, det_w2=det_w2, idw=idw,
                           r_min=r_min(idw), reference=reference)


# --- heralded dimension witness -----------------------------------------------

@dataclass(frozen=True)
class HeraldWitnessResult:
    """Heralded-witness conditionals and derived quantities at one
    squeezing strength.  p1 and p2 are keyed by (j, x, y) with herald
    j in {3, 4}."""

    r: float
    p1: Dict[Tuple[int, int, int], float]
    p2: Dict[Tuple[int, int, int], float]
    idw: float
    r_min: float
    coincidences: Dict[Tuple[int, int], int]  # (x, y) -> total 4-fold count


def _herald_coincidences() -> Dict[str, Predicate]:
    d1, d2, d3, d4 = Click("D1"), Click("D2"), Click("D3"), Click("D4")
    n1, n2, n3, n4 = NoClick("D1"), NoClick("D2"), NoClick("D3"), NoClick("D4")
    return {
        "C13": d1 & n2 & d3 & n4,
        "C14": d1 & n2 & n3 & d4,
        "C23": n1 & d2 & d3 & n4,
        "C24": n1 & d2 & n3 & d4,
    }


def herald_witness_point(r: float, spec: Optional[ExperimentSpec] = None,
                         trials: Optional[int] = None, workers: int = 1,
                         ) -> HeraldWitnessResult:
    """Four coincidence runs (one per retarder-setting pair) yielding the
    heralding conditionals p_ij(x, y) and the witness
    I_DW = |B_311 + B_312 + B_321 - B_322 - B_411| with
    B_jxy = p_2j - p_1j."""

    if spec is None:
        spec = builtin("herald-dw")
    settings = spec.witness_settings
    if not isinstance(settings, HeraldSettings):
        raise ValueError("spec does not carry heralded-witness settings")
    spec = spec.with_params(r=r)
    preds = _herald_coincidences()

    p1: Dict[Tuple[int, int, int], float] = {}
    p2: Dict[Tuple[int, int, int], float] = {}
    totals: Dict[Tuple[int, int], int] = {}
    for x in (1, 2):
        for y in (1, 2):
            point = spec.with_params(ax=settings.alphas[x - 1],
                                     by=settings.betas[y - 1])
            counts = count_events(point, preds, trials=trials, workers=workers)
            c1 = counts["C13"] + counts["C14"]
            c2 = counts["C23"] + counts["C24"]
            if c1 == 0 or c2 == 0:
                raise DegenerateDenominatorError(
                    f"no exclusive coincidences at setting (x={x}, y={y})")
            p1[(3, x, y)] = counts["C13"] / c1
            p1[(4, x, y)] = counts["C14"] / c1
            p2[(3, x, y)] = counts["C23"] / c2
            p2[(4, x, y)] = counts["C24"] / c2
            totals[(x, y)] = c1 + c2

    def b(j: int, x: int, y: int) -> float:
        return p2[(j, x, y)] - p1[(j, x, y)]

    idw = abs(b(3, 1, 1) + b(3, 1, 2) + b(3, 2, 1) - b(3, 2, 2) - b(4, 1, 1))
    return HeraldWitnessResult(r=r, p1=p1, p2=p2, idw=idw, r_min=r_min(idw),
                               coincidences=totals)


# --- quantum-controlled morphing experiment ------------------------------------

@dataclass(frozen=True)
class PdbsPointResult:
    """Coincidence statistics of one (theta, phi) setting."""

    theta: float
    phi: float
    estimate: float
    ci95: Tuple[float, float]
    numerator: int
    denominator: int
    accidentals: float


def pdbs_point(theta: float, phi: float, spec: Optional[ExperimentSpec] = None,
               trials: Optional[int] = None, workers: int = 1) -> PdbsPointResult:
    """One run of the morphing experiment: the conditional probability of a
    wave-port detection among exclusive-single coincidences with the
    control arm, plus the delayed-pair accidental estimate for the same
    coincidence event."""

    if spec is None:
        spec = builtin("pdbs")
    point = spec.with_params(theta=theta, phi=phi)
    trials = point.trials if trials is None else trials
    patterns = run_patterns(point, trials=trials, workers=workers)

    coincidence = point.condition
    numerator_pred = point.postselect & coincidence
    denominator = int(np.count_nonzero(evaluate(coincidence, patterns)))
    if denominator == 0:
        raise DegenerateDenominatorError("no coincidences observed")
    numerator = int(np.count_nonzero(evaluate(numerator_pred, patterns)))
    accidentals = accidental_estimate(patterns, coincidence, shifted=("D5", "D6"))
    return PdbsPointResult(theta=theta, phi=phi,
                           estimate=numerator / denominator,
                           ci95=wilson_interval(numerator, denominator),
                           numerator=numerator, denominator=denominator,
                           accidentals=accidentals)


# --- quantum eraser -------------------------------------------------------------

@dataclass(frozen=True)
class EraserPointResult:
    """Unconditional and D3-conditioned exclusive-single probabilities for
    the first interferometer output at one phase setting."""

    phi: float
    p1: float
    p1_ci95: Tuple[float, float]
    p13: float
    p13_ci95: Tuple[float, float]


def eraser_point(phi: float, spec: Optional[ExperimentSpec] = None,
                 trials: Optional[int] = None, workers: int = 1,
                 ) -> EraserPointResult:
    """One phase point of the eraser experiment, measuring the exclusive
    single-click probability on the first detector both unconditionally
    and conditioned on a partner-beam detection."""

    if spec is None:
        spec = builtin("eraser")
    point = spec.with_params(phi=phi)
    trials = point.trials if trials is None else trials
    exclusive = Click("D1") & NoClick("D2")
    counts = count_events(point, {
        "excl": exclusive,
        "excl_heralded": exclusive & Click("D3"),
        "herald": Click("D3"),
    }, trials=trials, workers=workers)
    if counts["herald"] == 0:
        raise DegenerateDenominatorError("partner detector never clicked")
    return EraserPointResult(
        phi=phi,
        p1=counts["excl"] / trials,
        p1_ci95=wilson_interval(counts["excl"], trials),
        p13=counts["excl_heralded"] / counts["herald"],
        p13_ci95=wilson_interval(counts["excl_heralded"], counts["herald"]),
    )
