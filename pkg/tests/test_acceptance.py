"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
``acceptance`` section of the terminal summary.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from cherrypick.bounds import (
    t1_false_claim_prob,
    t3_power_threshold,
    t4_min_gap,
    t5_min_gap,
    validate_alpha_tail,
    validate_mills_ratio,
)
from cherrypick.cli import main
from cherrypick.distributions import normal_inv_survival, normal_survival
from cherrypick.experiments import SimulationConfig, run_false_claim, run_inspection, run_power

FIXTURE = Path(__file__).parent / "data" / "kappa_synthetic.csv"


def binomial_se(p, n):
    return math.sqrt(p * (1 - p) / n)


def joint_se(a, b):
    return math.hypot(a.std_error, b.std_error)


def test_01_special_functions(criterion):
    start = time.perf_counter()
    p = np.logspace(-10, np.log10(0.5), 100)
    grid = np.concatenate([p, 1 - p[::-1]])
    worst = float(np.max(np.abs(normal_survival(normal_inv_survival(grid)) - grid)))
    mills = validate_mills_ratio(np.linspace(0.01, 10, 1000))
    tail = validate_alpha_tail(np.logspace(-8, np.log10(0.49), 300))
    seconds = time.perf_counter() - start
    passed = worst <= 1e-10 and mills.satisfied and tail.satisfied and seconds < 1.0
    criterion(
        1, "special-function fidelity", passed,
        f"max round-trip error {worst:.1e} on {grid.size} points; Mill's ratio {mills.satisfied}; "
        f"alpha tail {tail.satisfied}", seconds,
    )


def test_02_single_pick_false_claim(criterion):
    start = time.perf_counter()
    cfg = SimulationConfig(n_all=20, n_publish=1, alpha=0.05, trials=100_000, seed=2)
    rate = run_false_claim(cfg).rates["standard"]
    target = t1_false_claim_prob(0.05, 20)
    se = binomial_se(target, rate.trials)
    seconds = time.perf_counter() - start
    passed = abs(rate.rate - target) <= 4 * se and seconds < 10
    criterion(2, "single-pick false claims", passed,
              f"rate {rate.rate:.4f} vs {target:.4f} (4 se = {4 * se:.4f})", seconds)


def test_03_cherry_picking_trend(criterion):
    start = time.perf_counter()
    rates = [
        run_false_claim(SimulationConfig(n_all=3 * n, n_publish=n, trials=1000, seed=3)).rates["standard"]
        for n in (5, 10, 20, 40)
    ]
    monotone = all(b.rate >= a.rate - 2 * joint_se(a, b) for a, b in zip(rates, rates[1:]))
    big = run_false_claim(SimulationConfig(n_all=90, n_publish=30, trials=1000, seed=3)).rates["standard"]
    seconds = time.perf_counter() - start
    passed = monotone and big.rate > 0.5 and seconds < 30
    shown = ", ".join(f"{r.rate:.3f}" for r in rates)
    criterion(3, "cherry-picking power", passed,
              f"rates at N_P=5,10,20,40: {shown}; N_P=30/N_A=90: {big.rate:.3f}", seconds)


def test_04_conservative_safety(criterion):
    start = time.perf_counter()
    cfg = SimulationConfig(n_all=30, n_publish=10, trials=10_000, mc_draws=10_000, seed=4)
    rate = run_false_claim(cfg, conservative=True).rates["conservative"]
    limit = 0.05 + 4 * binomial_se(0.05, rate.trials)
    seconds = time.perf_counter() - start
    passed = rate.rate <= limit and seconds < 180
    criterion(4, "conservative test under top-k", passed,
              f"rate {rate.rate:.4f} <= {limit:.4f}", seconds)


def test_05_conservative_power_loss(criterion):
    start = time.perf_counter()
    delta = 0.1
    threshold = t3_power_threshold(delta, 10, 30)
    mu = max(threshold, 0.0)
    cfg = SimulationConfig(n_all=30, n_publish=10, strategy="unbiased", trials=10_000,
                           mc_draws=10_000, seed=5)
    (result,) = run_power(cfg, [mu])
    rate = result.rates["conservative"]
    limit = delta + 4 * binomial_se(delta, rate.trials)
    seconds = time.perf_counter() - start
    criterion(5, "conservative power loss", rate.rate <= limit,
              f"threshold {threshold:.4f}, mu {mu:.4f}: rate {rate.rate:.4f} <= {limit:.4f}", seconds)


def test_06_inspector_detection(criterion):
    start = time.perf_counter()
    rates = [run_inspection(SimulationConfig(seed=seed)).rates["detection"] for seed in range(5)]
    seconds = time.perf_counter() - start
    passed = all(r.rate >= 0.87 for r in rates) and seconds < 30
    shown = ", ".join(f"{r.rate:.3f}" for r in rates)
    criterion(6, "inspector detection", passed,
              f"conditional detection over 5 seeds: {shown}; mean {np.mean([r.rate for r in rates]):.3f}",
              seconds)


def test_07_gap_guarantees(criterion):
    start = time.perf_counter()
    gap4 = t4_min_gap(0.1, 10, 30)
    claim = run_inspection(SimulationConfig(mu_gap=gap4, trials=10_000, seed=7)).rates["claim"]
    claim_ok = claim.rate <= 0.1 + 4 * binomial_se(0.1, claim.trials)

    gap5 = t5_min_gap(0.05, 0.05, 0.1, 10)
    detect = run_inspection(SimulationConfig(mu_gap=gap5, trials=100_000, seed=7)).rates["detection"]
    detect_ok = detect.trials > 0 and detect.rate >= 0.9 - 4 * binomial_se(0.9, detect.trials)

    grid_ok = all(
        t4_min_gap(level, n_publish, factor * n_publish) >= t5_min_gap(level, level, level, n_publish)
        for level in (0.01, 0.05, 0.1)
        for n_publish in range(5, 101)
        for factor in range(2, 101)
    )
    seconds = time.perf_counter() - start
    passed = claim_ok and detect_ok and grid_ok and seconds < 60
    criterion(
        7, "gap-test guarantees", passed,
        f"claim rate at gap {gap4:.2f}: {claim.rate:.4f}; detection at gap {gap5:.4f}: "
        f"{detect.rate:.4f} over {detect.trials} claims; t4 >= t5 on grid: {grid_ok}", seconds,
    )


def test_08_unknown_variance_ordering(criterion):
    start = time.perf_counter()
    base = SimulationConfig(n_all=30, n_publish=10, trials=10_000, seed=8)
    z_claim = run_false_claim(base).rates["standard"]
    t_claim = run_false_claim(base.replace(variance_mode="unknown")).rates["standard"]
    z_detect = run_inspection(base).rates["detection"]
    t_detect = run_inspection(base.replace(variance_mode="unknown")).rates["detection"]
    claim_ok = t_claim.rate >= z_claim.rate - 2 * joint_se(t_claim, z_claim)
    detect_ok = t_detect.rate <= z_detect.rate + 2 * joint_se(t_detect, z_detect)
    seconds = time.perf_counter() - start
    criterion(
        8, "unknown-variance ordering", claim_ok and detect_ok,
        f"false claims t {t_claim.rate:.4f} vs z {z_claim.rate:.4f}; "
        f"detection t {t_detect.rate:.4f} vs z {z_detect.rate:.4f}", seconds,
    )


def test_09_real_data_pipeline(criterion, capsys):
    start = time.perf_counter()
    argv = ["analyze", "real-data", "--data", str(FIXTURE), "--n-publish", "5", "--n-inspect", "5",
            "--trials", "1000", "--seed", "9", "--format", "json"]
    outputs = []
    for _ in range(2):
        code = main(argv)
        outputs.append((code, capsys.readouterr().out))
    (code, text), repeat = outputs
    row = json.loads(text)["rows"][0]
    seconds = time.perf_counter() - start
    passed = code == 0 and repeat == outputs[0] and row["reporter_p"] < 0.05 and row["rate"] > 0.8
    criterion(
        9, "real-data pipeline", passed,
        f"pool mean {row['pool_mean']:.3f}; reporter p {row['reporter_p']:.2e}; "
        f"detections {row['successes']}/{row['trials']}; deterministic {repeat == outputs[0]}", seconds,
    )


def _null_rates(level, variance_mode, seed):
    """Rejection rate of every test run at its own null, keyed by test name."""
    trials = 20_000
    common = dict(alpha=level, beta=level, trials=trials, seed=seed, variance_mode=variance_mode)
    unbiased = SimulationConfig(strategy="unbiased", **common)
    out = {}
    (at_zero,) = run_power(unbiased.replace(mc_draws=1), [0.0])
    out["one-sample" if variance_mode == "unknown" else "standard"] = at_zero.rates["standard"]
    (at_gap,) = run_power(unbiased.replace(mc_draws=1), [unbiased.mu_gap])
    out["gap"] = at_gap.rates["gap"]
    inspect = run_inspection(unbiased.replace(mu=0.4)).rates["detection_unconditional"]
    out["two-sample" if variance_mode == "unknown" else "inspector"] = inspect
    if variance_mode == "known":
        top_k = SimulationConfig(mc_draws=100_000, **common)
        out["conservative"] = run_false_claim(top_k, conservative=True).rates["conservative"]
    return out


def test_10_calibration(criterion):
    start = time.perf_counter()
    failures, checked, worst = [], 0, 0.0
    for i, level in enumerate((0.01, 0.05, 0.1)):
        for mode in ("known", "unknown"):
            for name, rate in _null_rates(level, mode, seed=100 + i).items():
                z = (rate.rate - level) / binomial_se(level, rate.trials)
                worst = max(worst, abs(z))
                checked += 1
                if abs(z) > 4:
                    failures.append(f"{name}/{mode}/{level}: {rate.rate:.4f}")
    seconds = time.perf_counter() - start
    detail = f"{checked} test/level/variance cells, largest deviation {worst:.2f} se"
    if failures:
        detail += "; off: " + ", ".join(failures)
    criterion(10, "calibration", not failures, detail, seconds)
