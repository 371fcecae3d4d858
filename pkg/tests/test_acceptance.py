"""End-to-end acceptance suite.

Each test covers one release criterion, prints a single PASS/FAIL line with
the measured quantities, and asserts the stated tolerance.  The Monte-Carlo
criteria use fixed seeds, so the whole suite is deterministic.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import i0e

from zpf_optics.analytics import (dark_click_prob, dc_single_click_probs,
                                  marcum_q1, quantum_q_herald, r_min,
                                  witness_idw, witness_w2)
from zpf_optics.builtins import BUILTIN_NAMES, builtin, builtin_text
from zpf_optics.core import SQRT2, GlobalConfig
from zpf_optics.detect import (Click, NoClick, accidental_estimate,
                               visibility)
from zpf_optics.dsl import DslError, parse, to_text
from zpf_optics.elements import LINEAR_KINDS, element_matrix
from zpf_optics.engine import run_ensemble, run_patterns
from zpf_optics.protocols import (dw_witness_point, eraser_point,
                                  herald_witness_point, pdbs_point)

CONFIG = GlobalConfig()
WORKERS = 4
CLASSICAL_BOUND = 1.0 + 2.0 * SQRT2


def report(criterion: int, passed: bool, detail: str) -> None:
    print(f"criterion {criterion:02d} {'PASS' if passed else 'FAIL'}: {detail}")
    assert passed, detail


def test_criterion_01_dark_count_rate():
    """Threshold dark-count probability, closed form and simulated."""
    p = dark_click_prob(CONFIG)
    trials = 1_000_000
    spec = parse('experiment "vacuum"\nmode a\nsource vacuum -> a\n'
                 'detector D1 on a\npostselect click(D1)\n'
                 f"trials {trials}\nseed 101\n")
    stats = run_ensemble(spec, workers=WORKERS)
    sigma = math.sqrt(p * (1.0 - p) / trials)
    z = abs(stats.estimate - p) / sigma
    ok = 0.00095 <= p <= 0.00105 and z < 4.0
    report(1, ok, f"closed form {p:.6f}, mc {stats.estimate:.6f}, z = {z:.2f}")


def _marcum_quadrature(a: float, b: float) -> float:
    def integrand(t):
        return t * math.exp(-0.5 * (t - a) ** 2) * i0e(a * t)

    value, _ = quad(integrand, b, max(b + 50.0, a + 50.0), limit=500,
                    epsabs=1e-13, epsrel=1e-13)
    return value


def test_criterion_02_marcum_series():
    """Marcum Q1 series against the exponential identity and quadrature."""
    worst_identity = 0.0
    for gamma in (0.5, 1.0, 1.95, 3.0):
        b = SQRT2 * gamma / CONFIG.sigma0
        err = abs(marcum_q1(0.0, b) - math.exp(-gamma ** 2 / CONFIG.sigma0 ** 2))
        worst_identity = max(worst_identity, err)
    worst_quad = 0.0
    for a in np.linspace(0.1, 5.0, 20):
        for b in np.linspace(0.1, 5.0, 20):
            err = abs(marcum_q1(float(a), float(b)) - _marcum_quadrature(a, b))
            worst_quad = max(worst_quad, err)
    ok = worst_identity < 1e-12 and worst_quad < 1e-9
    report(2, ok, f"identity error {worst_identity:.2e}, "
                  f"quadrature error {worst_quad:.2e}")


def test_criterion_03_delayed_choice_fringes():
    """Interferometer fringes: closed-form agreement and marker erasure."""
    p_dark = dark_click_prob(CONFIG)
    phis = np.linspace(0.0, 2.0 * math.pi, 25)
    trials = 1_000_000
    worst_z = 0.0
    vis = {}
    for theta in (0.0, math.radians(30.0), math.radians(45.0)):
        curve = []
        for phi in phis:
            spec = builtin("dc").with_params(phi=float(phi), theta=theta)
            stats = run_ensemble(spec.with_run_options(trials=trials),
                                 workers=WORKERS)
            big_p1, big_p2 = dc_single_click_probs(0.1, float(phi), theta, CONFIG)
            p_cf = big_p1 * (1.0 - big_p2)
            sigma = math.sqrt(p_cf * (1.0 - p_cf) / trials)
            worst_z = max(worst_z, abs(stats.estimate - p_cf) / sigma)
            # the dark-subtracted excess is below shot noise at this sample
            # size, so the fringe contrast is read off the verified closed
            # form rather than the noisy per-point estimates
            curve.append((float(phi), p_cf - p_dark))
        vis[theta] = visibility(curve)

    # without the recombining beam splitter the closed form loses all phase
    # dependence, bit for bit
    baseline = dc_single_click_probs(0.1, 0.0, 0.0, CONFIG, with_bs2=False)
    phase_independent = all(
        dc_single_click_probs(0.1, float(phi), 0.0, CONFIG, with_bs2=False)
        == baseline for phi in phis)

    v0, v30, v45 = (vis[t] for t in sorted(vis))
    ok = (worst_z < 4.0 and phase_independent
          and v0 > 0.9 and v45 < 0.05 and v45 < v30 < v0)
    report(3, ok, f"max |z| = {worst_z:.2f}, visibilities "
                  f"(0, 30, 45 deg) = ({v0:.3f}, {v30:.3f}, {v45:.3f}), "
                  f"no-BS2 phase independent = {phase_independent}")


def test_criterion_04_quantum_eraser():
    """Partner-conditioned fringes appear; unconditioned singles stay flat."""
    phis = np.linspace(0.0, 2.0 * math.pi, 25)
    points = [eraser_point(float(phi), trials=1_000_000, workers=WORKERS)
              for phi in phis]
    vis_heralded = visibility([(p.phi, p.p13) for p in points])
    vis_singles = visibility([(p.phi, p.p1) for p in points])
    pooled = sum(p.p1 for p in points) / len(points)
    flat = all(p.p1_ci95[0] <= pooled <= p.p1_ci95[1] for p in points)
    ok = (vis_heralded - vis_singles > 0.3 and vis_singles < 0.05 and flat)
    report(4, ok, f"heralded visibility {vis_heralded:.3f}, singles "
                  f"visibility {vis_singles:.4f}, singles flat = {flat}")


def test_criterion_05_morphing_coincidences():
    """Particle-to-wave morphing statistics and accidental levels."""
    thetas = [0.0, math.pi / 16, math.pi / 8, 3 * math.pi / 16, math.pi / 4]
    phis = np.linspace(0.0, 2.0 * math.pi, 9)
    grid = {}
    denominators = []
    for theta in thetas:
        for phi in phis:
            result = pdbs_point(theta, float(phi), workers=WORKERS)
            grid[(theta, float(phi))] = result
            denominators.append(result.denominator)
    mean_den = sum(denominators) / len(denominators)

    vis = {theta: visibility([(phi, grid[(theta, float(phi))].estimate)
                              for phi in phis]) for theta in thetas}
    wave = vis[math.pi / 4]
    particle = vis[0.0]
    mid = vis[math.pi / 8]
    theta0_probs = [grid[(0.0, float(phi))].estimate for phi in phis]
    near_half = all(0.3 < p < 0.7 for p in theta0_probs)

    # accidental floor: with the squeezing off every detector is dark-only,
    # so each exclusive coincidence channel should sit at the dark-pair level
    reference = builtin("pdbs").with_params(r=0.0)
    patterns = run_patterns(reference, workers=WORKERS)
    others = {"D1": ("D2", "D3", "D4"), "D2": ("D1", "D3", "D4"),
              "D3": ("D1", "D2", "D4"), "D4": ("D1", "D2", "D3")}
    accidentals = []
    for det, rest in others.items():
        pred = Click(det) & NoClick("D5") & Click("D6")
        for other in rest:
            pred = pred & NoClick(other)
        accidentals.append(accidental_estimate(patterns, pred,
                                               shifted=("D5", "D6")))
    # each channel is a Poisson count with mean ~5, so test the channel mean
    acc_mean = sum(accidentals) / len(accidentals)
    acc_ok = abs(acc_mean - 5.0) <= 3.0

    ok = (abs(mean_den - 125.0) <= 25.0 and wave > 0.7
          and near_half and 0.0 < particle < 0.2
          and particle < mid < wave and acc_ok)
    report(5, ok, f"mean coincidences {mean_den:.1f}, visibilities "
                  f"(0, pi/8, pi/4) = ({particle:.3f}, {mid:.3f}, {wave:.3f}), "
                  f"mean accidentals/channel {acc_mean:.1f}")


def test_criterion_06_determinant_witness_curve():
    """Closed-form determinant witness versus intensity."""
    w_ref = witness_w2(math.sqrt(1.3), CONFIG)
    curve = [witness_w2(math.sqrt(a2), CONFIG)
             for a2 in np.geomspace(0.01, 100.0, 25)]
    monotone = all(b >= a - 1e-12 for a, b in zip(curve, curve[1:]))
    ok = abs(w_ref - 0.95) <= 0.02 and monotone and curve[-1] >= 0.99
    report(6, ok, f"W2(1.3) = {w_ref:.4f}, monotone = {monotone}, "
                  f"W2(100) = {curve[-1]:.4f}")


def test_criterion_07_idw_witness_curve():
    """Closed-form I_DW witness: bound crossing and saturation."""
    crossing = brentq(
        lambda a2: witness_idw(math.sqrt(a2), CONFIG) - 3.0, 0.1, 0.6,
        xtol=1e-10)
    idw_ref = witness_idw(math.sqrt(0.58), CONFIG)
    grid = np.geomspace(0.7, 100.0, 20)
    above_classical = all(
        witness_idw(math.sqrt(a2), CONFIG) > CLASSICAL_BOUND for a2 in grid)
    idw_sat = witness_idw(10.0, CONFIG)
    rmin_consistent = all(
        r_min(witness_idw(math.sqrt(a2), CONFIG)) == pytest.approx(
            max((witness_idw(math.sqrt(a2), CONFIG) - 3.0) / 4.0, 0.0),
            abs=1e-12)
        for a2 in np.geomspace(0.01, 100.0, 10))
    ok = (abs(crossing - 0.33) <= 0.03 and abs(idw_ref - 3.82) <= 0.03
          and above_classical and abs(idw_sat - 5.0) <= 0.05
          and rmin_consistent)
    report(7, ok, f"crossing at |alpha|^2 = {crossing:.4f}, "
                  f"I_DW(0.58) = {idw_ref:.4f}, I_DW(100) = {idw_sat:.4f}, "
                  f"above classical bound beyond 0.6: {above_classical}")


def test_criterion_08_heralded_witness_vs_squeezing():
    """Simulated heralded witness crosses the classical bound with r."""
    low = herald_witness_point(0.25, trials=1_000_000, workers=WORKERS)
    mid = herald_witness_point(0.8, trials=1_000_000, workers=WORKERS)
    high = herald_witness_point(2.8, trials=1_000_000, workers=WORKERS)
    ok = (low.idw < 3.0 and abs(mid.idw - 3.445) <= 0.15
          and high.idw > CLASSICAL_BOUND)
    report(8, ok, f"I_DW(r) = {low.idw:.3f} @ 0.25, {mid.idw:.3f} @ 0.8, "
                  f"{high.idw:.3f} @ 2.8")


def test_criterion_09_heralded_conditionals_vs_quantum():
    """Heralded conditionals reproduce the two-qubit predictions at r = 1."""
    result = herald_witness_point(1.0, trials=1_000_000, workers=WORKERS)
    worst = 0.0
    for j in (3, 4):
        for x in (1, 2):
            for y in (1, 2):
                q = quantum_q_herald(j, x, y)
                worst = max(worst, abs(result.p1[(j, x, y)] - q))
    ok = worst < 0.05
    report(9, ok, f"max |p - q| over 8 bases = {worst:.4f}")


def test_criterion_10_infrastructure():
    """Unitarity, thread determinism, printer round-trip, parser robustness."""
    worst_unitarity = 0.0
    for kind in LINEAR_KINDS:
        for angle in np.linspace(0.0, math.pi, 7):
            m = element_matrix(kind, float(angle))
            eye = np.eye(m.shape[0])
            worst_unitarity = max(worst_unitarity,
                                  float(np.max(np.abs(m.conj().T @ m - eye))))

    spec = builtin("eraser").with_run_options(trials=100_000)
    runs = [run_ensemble(spec, workers=w, block_size=1 << 12) for w in (1, 4, 8)]
    deterministic = runs[0] == runs[1] == runs[2]

    round_trips = all(parse(to_text(parse(builtin_text(name))))
                      == parse(builtin_text(name)) for name in BUILTIN_NAMES)

    rng = np.random.default_rng(2024)
    alphabet = ("abcdefghijklmnopqrstuvwxyz"
                "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
                " \t\n\"'(),->=.!&|#_")
    crashes = 0
    for _ in range(10_000):
        length = int(rng.integers(0, 80))
        text = "".join(rng.choice(list(alphabet), size=length))
        try:
            parse(text)
        except DslError:
            pass
        except Exception:
            crashes += 1

    ok = (worst_unitarity <= 1e-12 and deterministic and round_trips
          and crashes == 0)
    report(10, ok, f"unitarity error {worst_unitarity:.2e}, thread "
                   f"determinism = {deterministic}, round-trips = "
                   f"{round_trips}, parser crashes = {crashes}/10000")
