"""Threshold detectors, click-pattern predicates, and run statistics.

A detector clicks when either polarization amplitude of its mode exceeds
the threshold.  Post-selection predicates are small boolean expression
trees over click/noclick atoms; they evaluate on a single click pattern
(dict of bools) or on a whole ensemble at once (dict of bool arrays).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np
from scipy.stats import norm

from .core import JonesVector

BoolLike = Union[bool, np.ndarray]


@dataclass(frozen=True)
class DetectorConfig:
    """A named threshold detector watching one spatial mode.  gamma=None
    means the experiment's global threshold applies."""

    name: str
    mode: str
    gamma: Optional[float] = None

    def __post_init__(self) -> None:
        if self.gamma is not None and self.gamma < 0.0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")


def detector_click(vec: JonesVector, gamma: float) -> BoolLike:
    """True iff either polarization amplitude exceeds the threshold."""

    return (np.abs(vec.h) > gamma) | (np.abs(vec.v) > gamma)


# --- predicate expression tree -------------------------------------------

class Predicate:
    """Base class for click-pattern predicates."""

    def __and__(self, other: "Predicate") -> "Predicate":
        return And(self, other)

    def __or__(self, other: "Predicate") -> "Predicate":
        return Or(self, other)

    def __invert__(self) -> "Predicate":
        return Not(self)


@dataclass(frozen=True)
class Click(Predicate):
    detector: str


@dataclass(frozen=True)
class NoClick(Predicate):
    detector: str


@dataclass(frozen=True)
class And(Predicate):
    left: Predicate
    right: Predicate


@dataclass(frozen=True)
class Or(Predicate):
    left: Predicate
    right: Predicate


@dataclass(frozen=True)
class Not(Predicate):
    inner: Predicate


@dataclass(frozen=True)
class Always(Predicate):
    """Matches every trial; the implicit conditioning predicate."""


def evaluate(pred: Predicate, pattern: Mapping[str, BoolLike]) -> BoolLike:
    """Evaluate a predicate on one click pattern or on arrays of them."""

    if isinstance(pred, Click):
        return pattern[pred.detector]
    if isinstance(pred, NoClick):
        return ~np.asarray(pattern[pred.detector]) if isinstance(pattern[pred.detector], np.ndarray) \
            else not pattern[pred.detector]
    if isinstance(pred, And):
        return evaluate(pred.left, pattern) & evaluate(pred.right, pattern)
    if isinstance(pred, Or):
        return evaluate(pred.left, pattern) | evaluate(pred.right, pattern)
    if isinstance(pred, Not):
        inner = evaluate(pred.inner, pattern)
        return ~inner if isinstance(inner, np.ndarray) else not inner
    if isinstance(pred, Always):
        sample = next(iter(pattern.values()), True)
        if isinstance(sample, np.ndarray):
            return np.ones_like(sample, dtype=bool)
        return True
    raise TypeError(f"unknown predicate node {pred!r}")


def predicate_detectors(pred: Predicate) -> Set[str]:
    """Names of all detectors referenced by a predicate."""

    if isinstance(pred, (Click, NoClick)):
        return {pred.detector}
    if isinstance(pred, (And, Or)):
        return predicate_detectors(pred.left) | predicate_detectors(pred.right)
    if isinstance(pred, Not):
        return predicate_detectors(pred.inner)
    if isinstance(pred, Always):
        return set()
    raise TypeError(f"unknown predicate node {pred!r}")


# --- statistics ------------------------------------------------------------

@dataclass(frozen=True)
class RunStats:
    """Counting results of one ensemble at one parameter point."""

    trials: int
    numerator: int
    denominator: int
    estimate: float
    ci95: Tuple[float, float]
    seed: int
    singles: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.numerator <= self.denominator <= self.trials):
            raise ValueError("expected numerator <= denominator <= trials")


def wilson_interval(successes: int, n: int, level: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""

    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= successes <= n:
        raise ValueError("successes must lie in [0, n]")
    z = float(norm.ppf(0.5 * (1.0 + level)))
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def visibility(curve: Sequence[Tuple[float, float]]) -> float:
    """(max - min) / (max + min) of the estimates in a fringe curve."""

    values = [v for _, v in curve]
    if not values:
        raise ValueError("empty curve")
    hi, lo = max(values), min(values)
    if hi + lo == 0.0:
        return 0.0
    return (hi - lo) / (hi + lo)


def accidental_estimate(patterns: Mapping[str, np.ndarray], predicate: Predicate,
                        shifted: Iterable[str]) -> float:
    """Expected accidental-coincidence count by the delayed-pair technique:
    the named detectors take their outcomes from trial i+1 while all others
    keep trial i, and the coincidence predicate is counted on the mismatched
    pairs (scaled back to the full trial count)."""

    shifted = set(shifted)
    n = len(next(iter(patterns.values())))
    if n < 2:
        raise ValueError("need at least two trials to form delayed pairs")
    unknown = shifted - set(patterns)
    if unknown:
        raise KeyError(f"unknown detectors to shift: {sorted(unknown)}")
    hybrid = {name: (arr[1:] if name in shifted else arr[:-1])
              for name, arr in patterns.items()}
    count = int(np.count_nonzero(evaluate(predicate, hybrid)))
    return count * n / (n - 1)


def accidental_pair_estimate(patterns: Mapping[str, np.ndarray],
                             pair: Tuple[str, str],
                             predicate: Optional[Predicate] = None) -> float:
    """Accidental coincidences of a detector pair: outcomes of the second
    detector are delayed by one trial relative to the first, and the
    coincidence predicate (default: both click) is counted on the
    mismatched pairs.  For independent detectors this estimates
    N * p_a * p_b."""

    first, second = pair
    if predicate is None:
        predicate = Click(first) & Click(second)
    return accidental_estimate(patterns, predicate, shifted=(second,))
