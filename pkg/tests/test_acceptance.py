"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines appear even when
output is captured) or directly with ``python tests/test_acceptance.py``.
"""

import itertools
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.optimize import brentq, minimize_scalar

from hybridswap.bell import bell_optimal, horodecki_value, optimize_bell
from hybridswap.channels import FiberModel
from hybridswap.hilbert import trace_distance
from hybridswap.protocol import (
    ProtocolParams,
    analytic_probability,
    analytic_shared_state,
    loss_factor,
    run_protocol_oracle,
)
from hybridswap.sweep import Criterion, max_distance_bisect, max_distance_closed_form
from hybridswap.teleport import (
    BellOutcome,
    InputQubit,
    average_fidelity,
    average_fidelity_numeric,
    beats_classical,
    fidelity_per_outcome,
    teleport_outcome_oracle,
)
from hybridswap.hilbert import fidelity_pure

pytestmark = pytest.mark.acceptance

TSIRELSON = 2.0 * math.sqrt(2.0)
GRID = list(itertools.product((0.1, 0.3, 0.5, 0.7, 1.0), (0.1, 0.25, 0.5, 0.75, 1.0), (0.8, 0.9, 1.0)))


@pytest.fixture
def report(request):
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def emit(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}: {detail}"
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print("\n" + line, flush=True)
        else:
            print(line, flush=True)
        assert ok, line

    return emit


@pytest.fixture(scope="module")
def oracle_grid():
    start = time.perf_counter()
    results = [(ProtocolParams(a, T, e), run_protocol_oracle(ProtocolParams(a, T, e))) for a, T, e in GRID]
    return results, time.perf_counter() - start


def test_criterion_01_state_equivalence(report, oracle_grid):
    results, elapsed = oracle_grid
    worst = max(trace_distance(out.shared_state, analytic_shared_state(loss_factor(p))) for p, out in results)
    ok = worst <= 1e-8 and elapsed < 60.0
    report(1, "oracle state vs closed form", ok, f"max trace distance {worst:.2e} over {len(results)} points, {elapsed:.1f} s")


def test_criterion_02_probability_equivalence(report, oracle_grid):
    results, _ = oracle_grid
    worst = max(abs(out.probability - analytic_probability(p)) for p, out in results)
    report(2, "herald probability vs closed form", worst <= 1e-8, f"max deviation {worst:.2e}")


def test_criterion_03_horodecki_consistency(report):
    sub = list(itertools.product((0.1, 0.5, 1.0), (0.25, 1.0), (0.9, 1.0)))
    start = time.perf_counter()
    worst = 0.0
    for a, T, e in sub:
        p = ProtocolParams(a, T, e)
        expect = e**2 * 2.0 * math.sqrt(1.0 + math.exp(-8.0 * (1.0 - T * e) * a * a))
        worst = max(worst, abs(optimize_bell(p).value - expect))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 120.0
    report(3, "optimizer vs Horodecki optimum", ok, f"max deviation {worst:.2e} over {len(sub)} points, {elapsed:.1f} s")


def test_criterion_04_ideal_limit(report):
    p = ProtocolParams(0.5, 1.0, 1.0)
    shared = run_protocol_oracle(p).shared_state
    b_opt = optimize_bell(p).value
    b_state = horodecki_value(shared)
    f_num = average_fidelity_numeric(p, shared=shared)
    dev_b = max(abs(b_opt - TSIRELSON), abs(b_state - TSIRELSON))
    dev_f = max(abs(f_num - 1.0), abs(average_fidelity(p) - 1.0))
    report(4, "ideal limit", dev_b <= 1e-9 and dev_f <= 1e-12, f"|B - 2sqrt2| = {dev_b:.2e}, |F_av - 1| = {dev_f:.2e}")


def test_criterion_05_detector_headlines(report):
    b_ratio = optimize_bell(ProtocolParams(1e-4, 1.0, 0.95)).value / TSIRELSON
    f = average_fidelity_numeric(ProtocolParams(1e-4, 1.0, 0.90))
    ok = abs(b_ratio - 0.9025) <= 1e-4 and abs(f - 0.81) <= 1e-4
    report(5, "detector-inefficiency headlines", ok, f"B_meas/2sqrt2 = {b_ratio:.6f} at eta0=0.95, F_av = {f:.6f} at eta0=0.90")


def test_criterion_06_threshold_efficiency(report):
    f = lambda eta: bell_optimal(ProtocolParams(1e-6, 1.0, eta)).measurable - 2.0  # noqa: E731
    eta_star = brentq(f, 0.5, 1.0, xtol=1e-14)
    # the optimizer agrees at the crossing
    b_num = optimize_bell(ProtocolParams(1e-6, 1.0, eta_star)).value
    ok = abs(eta_star - 2 ** -0.25) <= 1e-4 and abs(b_num - 2.0) <= 1e-6
    report(6, "threshold efficiency", ok, f"crossing at eta0 = {eta_star:.6f}, optimizer there gives B = {b_num:.9f}")


def test_criterion_07_probability_peak(report):
    worst_val = worst_pos = 0.0
    for T, eta0 in ((1.0, 1.0), (0.4, 0.9), (0.1, 0.85)):
        pr = lambda a: analytic_probability(ProtocolParams(a, T, eta0))  # noqa: E731
        grid = np.linspace(0.0, 6.0, 601)
        k = int(np.argmax([pr(a) for a in grid]))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        res = minimize_scalar(lambda a: -pr(a), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        worst_val = max(worst_val, abs(-res.fun - 1.0 / (2.0 * math.e)))
        worst_pos = max(worst_pos, abs(res.x**2 - 1.0 / (2.0 * T * eta0)))
    ok = worst_val <= 1e-9 and worst_pos <= 1e-6
    report(7, "probability peak", ok, f"|max - 1/(2e)| = {worst_val:.2e}, |alpha*^2 - 1/(2T eta0)| = {worst_pos:.2e}")


def test_criterion_08_teleportation_oracle(report):
    worst_p = worst_f = 0.0
    for params in (ProtocolParams(0.5, 0.5, 0.9), ProtocolParams(1.0, 0.25, 1.0)):
        shared = run_protocol_oracle(params).shared_state
        R = loss_factor(params)
        for p in (0.0, 0.25, 0.5, 0.75, 1.0):
            for k in range(8):
                q = InputQubit(p, 2.0 * math.pi * k / 8)
                for outcome in BellOutcome:
                    prob, bob = teleport_outcome_oracle(params, q, outcome, shared=shared)
                    worst_p = max(worst_p, abs(prob - params.eta0**2 / 4.0))
                    worst_f = max(worst_f, abs(fidelity_pure(q.vector(), bob) - fidelity_per_outcome(R, q)))
    ok = worst_p <= 1e-10 and worst_f <= 1e-8
    report(8, "teleportation oracle", ok, f"max |P - eta0^2/4| = {worst_p:.2e}, max |F - F_closed| = {worst_f:.2e}")


def test_criterion_09_threshold_equivalence(report):
    mismatches = 0
    all_true = True
    for a, T in itertools.product(np.linspace(0.05, 1.5, 10), np.linspace(0.05, 1.0, 10)):
        p = ProtocolParams(float(a), float(T), 1.0)
        preds = (beats_classical(average_fidelity(p)), loss_factor(p) < 0.5, bell_optimal(p).state > 2.0)
        mismatches += len(set(preds)) != 1
        all_true &= all(preds)
    # boundary R = 1/2 reached exactly in floating point and through the state itself
    edge = ProtocolParams(30.0, 0.5, 1.0)
    boundary = analytic_shared_state(0.5)
    exact = (
        loss_factor(edge) == 0.5
        and average_fidelity(edge) == 2.0 / 3.0
        and bell_optimal(edge).state == 2.0
        and horodecki_value(boundary) == 2.0
        and abs(average_fidelity_numeric(edge, shared=boundary) - 2.0 / 3.0) <= 1e-15
    )
    ok = mismatches == 0 and all_true and exact
    report(9, "threshold equivalence", ok, f"{mismatches} predicate mismatches on 100 points, all true = {all_true}, boundary exact = {exact}")


def test_criterion_10_max_distance(report):
    fiber = FiberModel()
    L = max_distance_bisect(Criterion.BELL, 0.5, 0.95, fiber)
    ref = max_distance_closed_form(Criterion.BELL, 0.5, 0.95, fiber)
    capped = max_distance_bisect(Criterion.BELL, 0.1, 0.95, fiber, cap_km=200.0)
    ok = abs(L - ref) <= 0.05 and abs(L - 28.13) <= 0.05 and capped is None
    report(10, "max-distance curve", ok, f"bisection {L:.4f} km, inversion {ref:.4f} km, alpha=0.1 -> {'cap' if capped is None else capped}")


def test_criterion_11_determinism(report, tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        subprocess.run([sys.executable, "-m", "hybridswap", "sweep", "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    report(11, "sweep determinism", ok, f"two runs byte-identical = {outs[0] == outs[1]} ({len(outs[0])} bytes)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
