"""Acceptance suite: ten go/no-go checks, one summary line each.

Each test prints a single ``[PASS]``/``[FAIL]`` line describing the measured
outcome before asserting, so ``pytest tests/test_acceptance.py -v -s`` gives a
complete scoreboard (without ``-s`` pytest only shows the lines for failures).

One check is expected to fail: the blind robust fit does not match an
informed masked baseline on these synthetic spectrograms (see the test's
docstring and README for the analysis).  Everything else must be green.
"""

import time

import numpy as np
import pytest
from scipy import stats

from levynmf.engine import (
    FactorPair,
    FitConfig,
    fit_nmf,
    levy_cost,
    log_likelihood,
    mm_step_levy,
    mur_step_levy,
)
from levynmf.cli import entry_point
from levynmf.experiments import (
    gen_harmonic_spectrogram,
    run_fluor_experiment,
    run_impulsive_bench,
    run_inpaint_experiment,
)
from levynmf.separation import rank1_components, wiener_separate
from levynmf.signal_io import write_matrix_csv
from levynmf.stable import levy_cdf, sample_levy, sample_pas, scale_of_sum


def _report(num, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    return ok


def test_criterion_01_mm_cost_never_increases():
    """100 random fits, MM rule: the cost trace is monotone at every step."""
    rng = np.random.default_rng(11)
    t0 = time.perf_counter()
    worst = -np.inf
    for _ in range(100):
        F = int(rng.integers(4, 51))
        T = int(rng.integers(4, 51))
        K = int(rng.integers(1, 6))
        X = rng.uniform(0.1, 4.0, (F, T))
        config = FitConfig(model="levy", rule="mm", rank=K, iterations=200,
                           seed=int(rng.integers(2**32)))
        _, trace = fit_nmf(X, config)
        tol = 1e-10 * (1.0 + abs(float(trace.costs[0])))
        worst = max(worst, float(np.max(np.diff(trace.costs))) / tol)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1.0 and elapsed < 60.0
    _report(1, ok, f"worst rise {worst:.2e} of tolerance over 100 fits, {elapsed:.1f}s")
    assert ok


def test_criterion_02_likelihood_is_half_the_cost_drop():
    """Log-likelihood differences equal -1/2 of cost differences."""
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        F, T, K = int(rng.integers(3, 20)), int(rng.integers(3, 20)), int(rng.integers(1, 5))
        X = rng.uniform(0.2, 3.0, (F, T))
        pair_a = FactorPair(rng.uniform(0.1, 2.0, (F, K)), rng.uniform(0.1, 2.0, (K, T)))
        pair_b = FactorPair(rng.uniform(0.1, 2.0, (F, K)), rng.uniform(0.1, 2.0, (K, T)))
        dL = log_likelihood(X, pair_b) - log_likelihood(X, pair_a)
        dC = levy_cost(X, pair_b) - levy_cost(X, pair_a)
        worst = max(worst, abs(dL + 0.5 * dC) / abs(dL))
    ok = worst <= 1e-9
    _report(2, ok, f"worst relative mismatch {worst:.2e} over 50 factor pairs")
    assert ok


def test_criterion_03_sampler_distributions():
    """Draws match the closed-form CDF, the general sampler, and stability."""
    n = 10**5
    x = sample_levy(1.0, np.random.default_rng(123), n)
    ks_cdf = stats.kstest(x, lambda t: levy_cdf(t, 1.0)).statistic

    a = sample_pas(0.5, 1.0, np.random.default_rng(5), n)
    b = sample_levy(1.0, np.random.default_rng(6), n)
    ks_half = stats.ks_2samp(a, b).statistic

    # summing m iid draws must land on the single-draw law at the combined scale
    ks_closure = 0.0
    for i, alpha in enumerate((0.2, 0.5, 0.8)):
        parts = sample_pas(alpha, 1.0, np.random.default_rng(70 + i), (4, n)).sum(axis=0)
        direct = sample_pas(alpha, scale_of_sum([1.0] * 4, alpha),
                            np.random.default_rng(80 + i), n)
        ks_closure = max(ks_closure, stats.ks_2samp(parts, direct).statistic)

    ok = ks_cdf < 0.01 and ks_half < 0.015 and ks_closure < 0.02
    _report(3, ok, f"KS vs cdf {ks_cdf:.4f}, vs general sampler {ks_half:.4f}, "
                   f"closure {ks_closure:.4f}")
    assert ok


def test_criterion_04_masks_conserve_the_mixture():
    """Separated sources sum back to the input to accumulated rounding."""
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(50):
        F, T = int(rng.integers(2, 30)), int(rng.integers(2, 30))
        K = int(rng.integers(1, 8))
        factors = FactorPair(rng.uniform(0.0, 2.0, (F, K)), rng.uniform(0.0, 2.0, (K, T)))
        X = rng.uniform(0.05, 5.0, (F, T))
        parts = wiener_separate(X, rank1_components(factors))
        worst = max(worst, float(np.max(np.abs(parts.sum(axis=0) - X) / X)))
    ok = worst <= 1e-12
    _report(4, ok, f"worst relative conservation error {worst:.2e} over 50 instances")
    assert ok


def test_criterion_05_impulsive_bench_direction():
    """On heavy-tailed data the robust model estimates scales best.

    Mean dispersion error and mean KL of the robust model must be strictly
    below both the Itakura-Saito and generalized-KL baselines at every alpha.
    """
    t0 = time.perf_counter()
    rows = run_impulsive_bench(alphas=(0.1, 0.3, 0.5), size=(50, 50), rank=5,
                               iterations=200, runs=10, seed=0)
    elapsed = time.perf_counter() - t0

    def means(alg, alpha):
        sel = [r for r in rows if r.algorithm == alg and r.alpha == alpha]
        assert len(sel) == 10
        disp = sum(r.alpha_dispersion for r in sel) / 10
        kl = float(np.mean([r.kl for r in sel]))
        return disp, kl

    ok = elapsed < 300.0
    for alpha in (0.1, 0.3, 0.5):
        levy_disp, levy_kl = means("levy", alpha)
        for rival in ("is", "kl"):
            r_disp, r_kl = means(rival, alpha)
            ok = ok and levy_disp < r_disp and levy_kl < r_kl
    _report(5, ok, f"robust model below both baselines on both metrics at "
                   f"alpha 0.1/0.3/0.5, {elapsed:.1f}s")
    assert ok


def test_criterion_06_inpainting_direction():
    """Corrupted-spectrogram restoration: blind ranking and informed parity.

    Clause one: the robust fit restores better (lower log-KL vs the clean
    spectrogram) than blind IS and KL fits in at least 9/10 seeds.  Clause
    two asks the blind robust fit to match a masked IS fit that is handed
    the exact corruption mask, in at least 6/10 seeds.  Clause two fails on
    this synthetic family and we believe it is unattainable here: with the
    mask known, masked IS interpolates the low-rank gaps almost exactly,
    while any blind fit pays a floor set by its own scale bias on the
    multiplicative texture plus spare-component capacity chasing surviving
    spikes.  The gap shrinks as the spectrogram grows (+2.9 at 129x200 to
    +0.15 at 321x400 in log-KL) but converges to a positive floor, never
    through zero.  On real recordings no exact low-rank completion exists
    for the informed baseline to find, which is how comparisons of this
    kind can come out level.  See README (known limitation) for the full
    analysis.
    """
    t0 = time.perf_counter()
    wins_blind = 0
    wins_informed = 0
    for seed in range(10):
        spectrogram = gen_harmonic_spectrogram(129, 200, seed)
        result = run_inpaint_experiment(spectrogram, fraction=0.1, rank=30,
                                        iterations=200, seed=seed)
        scores = result.log_kl
        if scores["levy"] < scores["is"] and scores["levy"] < scores["kl"]:
            wins_blind += 1
        if scores["levy"] <= scores["weighted_is"]:
            wins_informed += 1
    elapsed = time.perf_counter() - t0
    ok_blind = wins_blind >= 9
    ok_informed = wins_informed >= 6
    ok = ok_blind and ok_informed and elapsed < 600.0
    _report(6, ok, f"beat blind baselines in {wins_blind}/10 seeds (need >= 9); "
                   f"matched informed masked fit in {wins_informed}/10 (need >= 6); "
                   f"{elapsed:.0f}s")
    assert ok_blind, f"robust fit beat blind baselines in only {wins_blind}/10 seeds"
    assert elapsed < 600.0
    assert ok_informed, (
        f"blind robust fit matched the informed masked baseline in only "
        f"{wins_informed}/10 seeds (need >= 6); on exactly-low-rank synthetic "
        f"spectrograms the informed baseline interpolates the corrupted cells "
        f"near-perfectly, a regime this comparison cannot win (see docstring)"
    )


def test_criterion_07_unmixing_correlations():
    """Blind unmixing tracks an informed oracle on three-source mixtures."""
    t0 = time.perf_counter()
    wins = 0
    min_corr = 1.0
    for seed in range(10):
        report = run_fluor_experiment(128, 200, seed, iterations=50)
        min_corr = min(min_corr, min(float(np.min(v)) for v in report.values()))
        if float(np.mean(report["levy"])) >= float(np.mean(report["euclidean"])):
            wins += 1
    elapsed = time.perf_counter() - t0
    ok = min_corr > 0.9 and wins >= 7 and elapsed < 120.0
    _report(7, ok, f"minimum per-source correlation {min_corr:.4f} (need > 0.9); "
                   f"robust mean >= euclidean mean in {wins}/10 seeds (need >= 7); "
                   f"{elapsed:.1f}s")
    assert ok


def test_criterion_08_exact_recovery_of_planted_factors():
    """Squared rank-2 products are recovered to the generating cost.

    Generating factors use well-separated column patterns with mild random
    jitter; the optimum is then reachable from random starts within the
    iteration budget (nearly collinear random factors can stall
    multiplicative-family updates short of it).
    """
    base_w = np.array([[2.0, 0.2], [2.0, 0.2], [1.0, 1.0], [0.2, 2.0], [0.2, 2.0]])
    base_h = np.array([[2.0, 1.5, 1.0, 0.3, 0.2], [0.2, 0.3, 1.0, 1.5, 2.0]])
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        W0 = base_w * rng.uniform(0.9, 1.1, base_w.shape)
        H0 = base_h * rng.uniform(0.9, 1.1, base_h.shape)
        X = (W0 @ H0) ** 2
        target = levy_cost(X, FactorPair(W0, H0))
        config = FitConfig(model="levy", rule="mm", rank=2, iterations=500, seed=seed)
        _, trace = fit_nmf(X, config)
        worst = max(worst, abs(float(trace.costs[-1]) - target))
    ok = worst <= 1e-6
    _report(8, ok, f"worst cost gap to generating factors {worst:.2e} over 10 instances")
    assert ok


def test_criterion_09_fixed_points_stay_fixed():
    """When the squared product already equals the data, updates are no-ops."""
    rng = np.random.default_rng(314)
    worst = 0.0
    for _ in range(10):
        F, T = int(rng.integers(3, 25)), int(rng.integers(3, 25))
        K = int(rng.integers(1, 6))
        factors = FactorPair(rng.uniform(0.2, 2.0, (F, K)), rng.uniform(0.2, 2.0, (K, T)))
        X = (factors.W @ factors.H) ** 2
        for step in (mur_step_levy, mm_step_levy):
            W2, H2 = step(X, factors)
            worst = max(worst,
                        float(np.max(np.abs(W2 - factors.W) / factors.W)),
                        float(np.max(np.abs(H2 - factors.H) / factors.H)))
    ok = worst <= 1e-12
    _report(9, ok, f"worst relative factor drift {worst:.2e} over 10 instances")
    assert ok


def test_criterion_10_cli_reruns_are_byte_identical(tmp_path):
    """Every subcommand reproduces its output files exactly under a fixed seed."""
    rng = np.random.default_rng(17)
    X = rng.uniform(0.2, 2.0, (16, 3)) @ rng.uniform(0.2, 2.0, (3, 14))
    mixture = tmp_path / "x.csv"
    write_matrix_csv(X, mixture)

    outputs = {}
    for tag in ("first", "second"):
        d = tmp_path / tag
        d.mkdir()
        codes = [
            entry_point(["fit", "--input", str(mixture), "--rule", "mm", "--rank", "2",
                         "--iters", "10", "--seed", "5", "--out-w", str(d / "w.csv"),
                         "--out-h", str(d / "h.csv"), "--trace", str(d / "trace.txt")]),
            entry_point(["separate", "--input", str(mixture), "--w", str(d / "w.csv"),
                         "--h", str(d / "h.csv"), "--out-prefix", str(d / "part")]),
            entry_point(["bench-impulsive", "--alphas", "0.3,0.5", "--size", "10,8",
                         "--rank", "2", "--iters", "4", "--runs", "2", "--seed", "4",
                         "--out", str(d / "bench.csv")]),
            entry_point(["inpaint", "--input", str(mixture), "--fraction", "0.1",
                         "--rank", "2", "--iters", "8", "--seed", "3",
                         "--out", str(d / "inpaint.csv")]),
            entry_point(["fluor", "--size", "48,16", "--iters", "4", "--seed", "2",
                         "--out", str(d / "fluor.csv")]),
        ]
        assert codes == [0, 0, 0, 0, 0]
        outputs[tag] = {p.name: p.read_bytes() for p in sorted(d.iterdir())}

    same_names = outputs["first"].keys() == outputs["second"].keys()
    diffs = [n for n in outputs["first"]
             if outputs["first"][n] != outputs["second"].get(n)]
    ok = same_names and not diffs and len(outputs["first"]) >= 9
    _report(10, ok, f"{len(outputs['first'])} output files byte-identical across reruns"
                    if ok else f"differing files: {diffs}")
    assert ok
