"""Monte-Carlo execution of experiment specs.

Trials are evaluated in vectorized blocks: every hidden-variable draw slot
(two per laser or vacuum source, four per entangled source, one per
polarizer, in declaration order) maps to a fixed draw index, so the sample
at (seed, trial, slot) never depends on block size, worker count, or
scheduling.  Counting reduces integer block totals, which keeps multi-worker
runs bit-identical to single-worker runs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from .core import JonesVector, sample_gaussian_block
from .detect import (Always, Click, Predicate, RunStats, detector_click,
                     evaluate, wilson_interval)
from .dsl import ExperimentSpec, SweepRange
from . import elements as el

DEFAULT_BLOCK_SIZE = 1 << 16


class EvaluationError(Exception):
    """A spec could not be executed (unresolved sweep, unsourced mode, ...)."""


class DegenerateDenominatorError(Exception):
    """The conditioning event never occurred, so the conditional estimate
    is undefined."""


@dataclass(frozen=True)
class DrawPlan:
    """Draw-index layout of a spec: which indices feed each source and each
    polarizer element."""

    source_slots: Tuple[Tuple[int, ...], ...]
    element_slots: Tuple[Optional[int], ...]
    total: int


def build_draw_plan(spec: ExperimentSpec) -> DrawPlan:
    """Assign draw indices: sources first in declaration order (laser and
    vacuum take two, entangled takes four), then one per polarizer in
    pipeline order."""

    next_index = 0
    source_slots: List[Tuple[int, ...]] = []
    for src in spec.sources:
        width = 4 if src.kind == "entangled" else 2
        source_slots.append(tuple(range(next_index, next_index + width)))
        next_index += width
    element_slots: List[Optional[int]] = []
    for element in spec.elements:
        if element.kind == "polarizer":
            element_slots.append(next_index)
            next_index += 1
        else:
            element_slots.append(None)
    return DrawPlan(tuple(source_slots), tuple(element_slots), next_index)


def resolve_params(spec: ExperimentSpec) -> Dict[str, float]:
    """Concrete parameter values; rejects specs that still carry sweeps."""

    resolved: Dict[str, float] = {}
    for name, value in spec.params:
        if isinstance(value, SweepRange):
            raise EvaluationError(
                f"parameter {name!r} is a sweep; expand it before running")
        resolved[name] = float(value)
    return resolved


def _resolve(value: Union[float, str], params: Mapping[str, float]) -> float:
    if isinstance(value, str):
        try:
            return params[value]
        except KeyError:
            raise EvaluationError(f"unknown parameter {value!r}") from None
    return float(value)


def run_block(spec: ExperimentSpec, trial_start: int, n: int,
              plan: Optional[DrawPlan] = None,
              params: Optional[Mapping[str, float]] = None,
              ) -> Dict[str, np.ndarray]:
    """Click patterns for trials [trial_start, trial_start + n) as boolean
    arrays keyed by detector name."""

    if plan is None:
        plan = build_draw_plan(spec)
    if params is None:
        params = resolve_params(spec)
    seed = spec.seed
    sigma0 = spec.config.sigma0

    def draw(slot: int) -> np.ndarray:
        return sample_gaussian_block(seed, slot, trial_start, n)

    modes: Dict[str, JonesVector] = {}
    for src, slots in zip(spec.sources, plan.source_slots):
        opts = dict(src.params)
        if src.kind == "laser":
            alpha = _resolve(opts["alpha"], params)
            modes[src.targets[0]] = el.sample_laser(
                el.LaserSourceParams(alpha), draw(slots[0]), draw(slots[1]), sigma0)
        elif src.kind == "vacuum":
            modes[src.targets[0]] = el.sample_vacuum(draw(slots[0]), draw(slots[1]), sigma0)
        else:
            r = _resolve(opts["r"], params)
            first, second = el.sample_entangled_pair(
                el.EntangledSourceParams(r),
                draw(slots[0]), draw(slots[1]), draw(slots[2]), draw(slots[3]), sigma0)
            modes[src.targets[0]] = first
            modes[src.targets[1]] = second

    for element, slot in zip(spec.elements, plan.element_slots):
        for m in element.modes:
            if m not in modes:
                raise EvaluationError(f"mode {m!r} used before being sourced")
        if element.kind == "bs":
            a, b = element.modes
            modes[a], modes[b] = el.apply_beam_splitter(modes[a], modes[b])
        elif element.kind == "mirror_swap":
            a, b = element.modes
            modes[a], modes[b] = el.apply_mirror_swap(modes[a], modes[b])
        elif element.kind == "pbs":
            a, b = element.modes
            modes[a], modes[b] = el.apply_pbs(modes[a], modes[b])
        elif element.kind == "pdbs":
            a, b = element.modes
            modes[a], modes[b] = el.apply_pdbs(modes[a], modes[b])
        elif element.kind == "hwp":
            m = element.modes[0]
            modes[m] = el.apply_half_wave_plate(modes[m], _resolve(element.angle, params))
        elif element.kind == "phase":
            m = element.modes[0]
            modes[m] = el.apply_phase_delay(modes[m], _resolve(element.angle, params))
        elif element.kind == "polarizer":
            m = element.modes[0]
            modes[m] = el.apply_polarizer(modes[m], _resolve(element.angle, params),
                                          draw(slot), sigma0)
        else:
            raise EvaluationError(f"unknown element kind {element.kind!r}")

    patterns: Dict[str, np.ndarray] = {}
    for det in spec.detectors:
        if det.mode not in modes:
            raise EvaluationError(f"detector {det.name!r} watches unsourced mode {det.mode!r}")
        gamma = spec.config.gamma if det.gamma is None else det.gamma
        patterns[det.name] = np.asarray(detector_click(modes[det.mode], gamma))
    return patterns


def run_trial(spec: ExperimentSpec, trial_index: int) -> Dict[str, bool]:
    """Click pattern of a single trial, as plain booleans."""

    block = run_block(spec, trial_index, 1)
    return {name: bool(arr[0]) for name, arr in block.items()}


def _blocks(trials: int, block_size: int) -> List[Tuple[int, int]]:
    return [(start, min(block_size, trials - start))
            for start in range(0, trials, block_size)]


def count_events(spec: ExperimentSpec, predicates: Mapping[str, Predicate],
                 trials: Optional[int] = None, workers: int = 1,
                 block_size: int = DEFAULT_BLOCK_SIZE) -> Dict[str, int]:
    """How many of the first `trials` trials satisfy each named predicate."""

    trials = spec.trials if trials is None else trials
    plan = build_draw_plan(spec)
    params = resolve_params(spec)

    def count_block(job: Tuple[int, int]) -> Dict[str, int]:
        start, n = job
        patterns = run_block(spec, start, n, plan, params)
        return {name: int(np.count_nonzero(evaluate(pred, patterns)))
                for name, pred in predicates.items()}

    jobs = _blocks(trials, block_size)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(count_block, jobs))
    else:
        partials = [count_block(job) for job in jobs]
    return {name: sum(part[name] for part in partials) for name in predicates}


def run_patterns(spec: ExperimentSpec, trials: Optional[int] = None,
                 workers: int = 1,
                 block_size: int = DEFAULT_BLOCK_SIZE) -> Dict[str, np.ndarray]:
    """Full click history of every detector over the first `trials` trials."""

    trials = spec.trials if trials is None else trials
    plan = build_draw_plan(spec)
    params = resolve_params(spec)
    out = {det.name: np.empty(trials, dtype=bool) for det in spec.detectors}

    def fill_block(job: Tuple[int, int]) -> None:
        start, n = job
        patterns = run_block(spec, start, n, plan, params)
        for name, arr in patterns.items():
            out[name][start:start + n] = arr

    jobs = _blocks(trials, block_size)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_block, jobs))
    else:
        for job in jobs:
            fill_block(job)
    return out


def run_ensemble(spec: ExperimentSpec, trials: Optional[int] = None,
                 workers: int = 1,
                 block_size: int = DEFAULT_BLOCK_SIZE) -> RunStats:
    """Estimate of the spec's postselect probability, conditioned on its
    condition predicate when one is declared, with a Wilson 95% interval
    and per-detector singles counts."""

    trials = spec.trials if trials is None else trials
    numerator_pred = spec.postselect if spec.postselect is not None else Always()
    condition_pred = spec.condition if spec.condition is not None else Always()
    predicates: Dict[str, Predicate] = {
        "__num__": numerator_pred & condition_pred,
        "__den__": condition_pred,
    }
    for det in spec.detectors:
        predicates[det.name] = Click(det.name)
    counts = count_events(spec, predicates, trials=trials, workers=workers,
                          block_size=block_size)
    numerator = counts.pop("__num__")
    denominator = counts.pop("__den__")
    if denominator == 0:
        raise DegenerateDenominatorError(
            f"conditioning event never occurred in {trials} trials")
    return RunStats(
        trials=trials,
        numerator=numerator,
        denominator=denominator,
        estimate=numerator / denominator,
        ci95=wilson_interval(numerator, denominator),
        seed=spec.seed,
        singles=counts,
    )
