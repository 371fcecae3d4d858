"""Detector clicks, predicate algebra, and counting statistics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.stats.proportion import proportion_confint

from zpf_optics.core import JonesVector
from zpf_optics.detect import (Always, And, Click, NoClick, Not, Or,
                               RunStats, accidental_estimate,
                               accidental_pair_estimate, detector_click,
                               evaluate, predicate_detectors, visibility,
                               wilson_interval)


def test_click_threshold_on_either_component():
    gamma = 1.95
    assert detector_click(JonesVector(2.0, 0.0), gamma)
    assert detector_click(JonesVector(0.0, -2.0j), gamma)
    assert not detector_click(JonesVector(1.0, 1.0), gamma)
    assert not detector_click(JonesVector(1.95, 0.0), gamma)  # strict


def test_click_vectorized():
    vec = JonesVector(np.array([2.0, 0.1]), np.array([0.0, 0.2]))
    np.testing.assert_array_equal(detector_click(vec, 1.95), [True, False])


# --- predicates ---------------------------------------------------------------

_DETS = ("D1", "D2", "D3")


def _patterns(draw_bools):
    return dict(zip(_DETS, draw_bools))


bool3 = st.tuples(st.booleans(), st.booleans(), st.booleans())


def predicates(depth=3):
    atoms = st.sampled_from([Click(d) for d in _DETS]
                            + [NoClick(d) for d in _DETS] + [Always()])
    return st.recursive(
        atoms,
        lambda inner: st.one_of(
            st.builds(Not, inner),
            st.builds(And, inner, inner),
            st.builds(Or, inner, inner),
        ),
        max_leaves=8,
    )


@given(p=predicates(), q=predicates(), bits=bool3)
def test_de_morgan(p, q, bits):
    pattern = _patterns(bits)
    assert evaluate(Not(And(p, q)), pattern) == evaluate(Or(Not(p), Not(q)), pattern)
    assert evaluate(Not(Or(p, q)), pattern) == evaluate(And(Not(p), Not(q)), pattern)


@given(p=predicates(), bits=bool3)
def test_double_negation(p, bits):
    pattern = _patterns(bits)
    assert evaluate(Not(Not(p)), pattern) == evaluate(p, pattern)


@given(p=predicates(), q=predicates(), bits=bool3)
def test_conjunction_never_increases(p, q, bits):
    pattern = _patterns(bits)
    assert evaluate(And(p, q), pattern) <= evaluate(p, pattern)


def test_noclick_equals_not_click_on_arrays():
    arr = np.array([True, False, True])
    pattern = {"D1": arr, "D2": ~arr, "D3": arr}
    np.testing.assert_array_equal(evaluate(NoClick("D1"), pattern),
                                  evaluate(Not(Click("D1")), pattern))


def test_operator_sugar_and_detector_listing():
    pred = (Click("D1") & ~Click("D2")) | NoClick("D3")
    assert predicate_detectors(pred) == {"D1", "D2", "D3"}
    assert evaluate(pred, {"D1": True, "D2": False, "D3": True})


def test_always_matches_all():
    arr = np.zeros(5, dtype=bool)
    np.testing.assert_array_equal(evaluate(Always(), {"D1": arr}),
                                  np.ones(5, dtype=bool))
    assert evaluate(Always(), {}) is True


# --- statistics -----------------------------------------------------------------

@pytest.mark.parametrize("successes,n", [(0, 10), (10, 10), (50, 100),
                                         (3, 1000), (999, 1000)])
def test_wilson_matches_statsmodels(successes, n):
    lo, hi = wilson_interval(successes, n)
    ref_lo, ref_hi = proportion_confint(successes, n, alpha=0.05, method="wilson")
    assert lo == pytest.approx(ref_lo, abs=1e-12)
    assert hi == pytest.approx(ref_hi, abs=1e-12)


def test_wilson_edge_cases():
    lo, _ = wilson_interval(0, 10)
    _, hi = wilson_interval(10, 10)
    assert lo == 0.0
    assert hi == pytest.approx(1.0, abs=1e-12)
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert hi - lo == pytest.approx(0.19, abs=0.01)
    with pytest.raises(ValueError):
        wilson_interval(5, 0)
    with pytest.raises(ValueError):
        wilson_interval(11, 10)


def test_visibility():
    assert visibility([(0, 0.5), (1, 0.5)]) == 0.0
    assert visibility([(0, 0.0), (1, 1.0)]) == 1.0
    assert visibility([(0, 1.0), (1, 3.0)]) == pytest.approx(0.5)
    assert visibility([(0, 0.0), (1, 0.0)]) == 0.0  # max+min = 0


def test_run_stats_invariant():
    RunStats(trials=10, numerator=3, denominator=5, estimate=0.6,
             ci95=(0.2, 0.9), seed=0)
    with pytest.raises(ValueError):
        RunStats(trials=10, numerator=6, denominator=5, estimate=1.2,
                 ci95=(0.0, 1.0), seed=0)
    with pytest.raises(ValueError):
        RunStats(trials=4, numerator=3, denominator=5, estimate=0.6,
                 ci95=(0.0, 1.0), seed=0)


def test_accidental_estimate_independent_pair():
    rng = np.random.default_rng(42)
    n = 2_000_000
    p = 0.001
    patterns = {"A": rng.random(n) < p, "B": rng.random(n) < p}
    est = accidental_pair_estimate(patterns, ("A", "B"))
    expected = n * p * p
    assert est == pytest.approx(expected, abs=4 * math.sqrt(expected))


def test_accidental_estimate_correlated_pair_underestimates():
    rng = np.random.default_rng(1)
    n = 1_000_000
    clicks = rng.random(n) < 0.001
    patterns = {"A": clicks, "B": clicks.copy()}  # perfectly correlated
    true_coincidences = int(np.count_nonzero(clicks))
    est = accidental_pair_estimate(patterns, ("A", "B"))
    assert est < 0.05 * true_coincidences


def test_accidental_estimate_shifted_set():
    pattern = np.array([True, False, True, False])
    patterns = {"A": pattern, "B": np.array([False, True, False, True])}
    # shifting B by one aligns its True entries with A's
    est = accidental_estimate(patterns, Click("A") & Click("B"), shifted=("B",))
    assert est == pytest.approx(2 * 4 / 3)
    with pytest.raises(KeyError):
        accidental_estimate(patterns, Click("A"), shifted=("C",))
    with pytest.raises(ValueError):
        accidental_estimate({"A": pattern[:1], "B": pattern[:1]},
                            Click("A"), shifted=("B",))
