"""Synthetic data generators and three desk-scale benchmark pipelines.

All pipelines are deterministic functions of a single 64-bit master seed.
Sub-seeds are derived with ``numpy.random.SeedSequence(master)`` (one
uint64 per consumer, in a documented fixed order) and every generator is
numpy's default PCG64, so results are reproducible across platforms.

The three pipelines:

* ``run_impulsive_bench``: scale fields built from sparse factors drive
  heavy-tailed positive-stable observations; each factorization model is
  fit blind and judged by how well ``(W H)^{1/alpha}`` recovers the true
  scale field (dispersion and generalized KL metrics).
* ``run_inpaint_experiment``: a spectrogram is corrupted by large
  impulsive outliers; robust and classic NMF models restore it blind,
  plus a masked Itakura-Saito fit that is told where the corruption is.
* ``run_fluor_experiment``: a low-rank mixture of smooth emission-like
  spectra; blind factorizations are compared, source by source, against
  an oracle that knows the true spectra.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from . import engine, metrics
from .separation import rank1_components, wiener_separate
from .stable import sample_pas
from .validation import as_nonneg_matrix

__all__ = [
    "BENCH_ALGORITHMS",
    "INPAINT_ALGORITHMS",
    "FLUOR_ALGORITHMS",
    "BenchResult",
    "InpaintResult",
    "derive_seeds",
    "gen_sparse_factors",
    "gen_pas_observations",
    "corrupt_impulsive",
    "gen_harmonic_spectrogram",
    "gen_fluorescence_mixture",
    "align_components",
    "run_impulsive_bench",
    "run_inpaint_experiment",
    "run_fluor_experiment",
]

BENCH_ALGORITHMS = ("euclidean", "is", "kl", "levy")
INPAINT_ALGORITHMS = ("is", "kl", "levy", "weighted_is")
FLUOR_ALGORITHMS = ("euclidean", "kl", "levy")


@dataclass(frozen=True)
class BenchResult:
    """One (algorithm, alpha, run) row of the impulsive benchmark.

    ``alpha_dispersion`` is an arbitrary-range Decimal and ``kl`` an
    extended-precision scalar because small alpha raises scale fields to
    large powers; ``seed`` is the master seed that reproduces the whole
    table, not a per-row stream.
    """

    algorithm: str
    alpha: float
    run_index: int
    alpha_dispersion: Decimal
    kl: np.longdouble
    seed: int

    def __post_init__(self) -> None:
        if not self.alpha_dispersion.is_finite() or self.alpha_dispersion < 0:
            raise ValueError(f"alpha_dispersion must be finite and >= 0, got {self.alpha_dispersion}")
        if not np.isfinite(self.kl) or self.kl < 0:
            raise ValueError(f"kl must be finite and >= 0, got {self.kl}")


@dataclass(frozen=True)
class InpaintResult:
    """Restoration quality per algorithm plus the robust model's estimate."""

    log_kl: dict
    restored: np.ndarray
    fraction: float
    seed: int


def derive_seeds(master: int, count: int) -> list:
    """``count`` independent uint64 sub-seeds from one master seed."""
    state = np.random.SeedSequence(master).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def gen_sparse_factors(F: int, T: int, K: int, seed: int) -> engine.FactorPair:
    """Sparse nonnegative factors: each entry is a standard normal to the 4th power.

    The even power guarantees nonnegativity and the heavy upper tail makes
    the resulting components spiky.  W is drawn before H.
    """
    if min(F, T, K) < 1:
        raise ValueError(f"dimensions must be >= 1, got F={F}, T={T}, K={K}")
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((F, K)) ** 4
    H = rng.standard_normal((K, T)) ** 4
    return engine.FactorPair(W, H)


def gen_pas_observations(factors: engine.FactorPair, alpha: float, seed: int) -> np.ndarray:
    """Heavy-tailed observations whose scale field is set by the factors.

    Cell (f, t) is a positive alpha-stable draw with scale
    ``([W H](f, t)) ** (1/alpha)``, so the product W H lives on the
    alpha-th-power scale used by the dispersion metric.
    """
    W, H = factors
    sigma = (np.asarray(W, dtype=float) @ np.asarray(H, dtype=float)) ** (1.0 / alpha)
    return sample_pas(alpha, sigma, np.random.default_rng(seed))


def corrupt_impulsive(X, fraction: float, seed: int):
    """Replace a random cell fraction by huge positive impulses.

    ``floor(fraction * F * T)`` cells are chosen uniformly without
    replacement, then each is overwritten by ``s * u`` with ``s`` equal to
    100 times the 95th percentile of the input entries and ``u`` uniform
    on (0.5, 1.5) per cell.  Returns the corrupted matrix and a {0,1}
    mask that is 0 exactly at the corrupted cells.
    """
    X = as_nonneg_matrix(X, "X")
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    F, T = X.shape
    n_bad = int(fraction * F * T)
    rng = np.random.default_rng(seed)
    flat = rng.choice(F * T, size=n_bad, replace=False)
    scale = 100.0 * np.percentile(X, 95)
    corrupted = X.copy()
    corrupted.flat[flat] = scale * rng.uniform(0.5, 1.5, size=n_bad)
    mask = np.ones_like(X)
    mask.flat[flat] = 0.0
    return corrupted, mask


def gen_harmonic_spectrogram(F: int, T: int, seed: int) -> np.ndarray:
    """Synthetic magnitude spectrogram: 3 to 8 harmonic combs.

    Each comb has a random fundamental row, Gaussian-shaped partial ridges
    with 1/h amplitude rolloff, and a smooth Gaussian temporal envelope.
    Multiplicative log-normal speckle (interference between partials) and
    an additive textured broadband floor make the result full rank, like a
    recorded spectrogram and unlike an exact low-rank cartoon.
    """
    if F < 16 or T < 8:
        raise ValueError(f"need F >= 16 and T >= 8, got F={F}, T={T}")
    rng = np.random.default_rng(seed)
    n_combs = int(rng.integers(3, 9))
    rows = np.arange(F, dtype=float)[:, None]
    cols = np.arange(T, dtype=float)[None, :]
    X = np.zeros((F, T))
    for _ in range(n_combs):
        f0 = rng.uniform(2.0, max(3.0, F / 6.0))
        ridge_width = rng.uniform(0.6, 1.2)
        amp = rng.uniform(0.5, 2.0)
        center = rng.uniform(0.0, T - 1.0)
        env_width = rng.uniform(T / 8.0, T / 2.0)
        envelope = np.exp(-0.5 * ((cols - center) / env_width) ** 2)
        comb = np.zeros((F, 1))
        for h in range(1, int((F - 1) / f0) + 1):
            comb += np.exp(-0.5 * ((rows - h * f0) / ridge_width) ** 2) / h
        X += amp * comb * envelope
    X *= np.exp(0.4 * rng.standard_normal((F, T)))
    X += 1e-3 * X.mean() * np.abs(rng.standard_normal((F, T)))
    return X


def gen_fluorescence_mixture(F: int, T: int, K: int = 3, seed: int = 0):
    """Low-rank mixture of smooth emission-like spectra.

    Each pure spectrum is a sum of 1 to 3 Gaussian bumps: one main
    emission peak in the component's own spectral band, plus up to two
    smaller shoulder bumps inside the same band (vibronic structure).
    Distinct bands keep the pure spectra close to disjoint, which is what
    makes the mixture identifiable for every model compared here.
    Concentrations are uniform on (0, 1].  The observation adds
    heavy-tailed nonnegative detector noise, lognormal draws with unit
    median at a 1% relative amplitude, clipped at 0.  Returns
    ``(X, spectra (F, K), concentrations (K, T))``.
    """
    if F < 32 or T < 3 * K:
        raise ValueError(f"need F >= 32 and T >= 3K, got F={F}, T={T}, K={K}")
    rng = np.random.default_rng(seed)
    rows = np.arange(F, dtype=float)
    spectra = np.zeros((F, K))
    for k in range(K):
        center = (k + 0.5) * F / K + rng.uniform(-0.05, 0.05) * F
        width = rng.uniform(F / 24.0, F / 16.0)
        spectra[:, k] = rng.uniform(0.8, 1.2) * np.exp(-0.5 * ((rows - center) / width) ** 2)
        for _ in range(int(rng.integers(0, 3))):
            c2 = center + rng.uniform(-1.0, 1.0) * width
            w2 = width * rng.uniform(0.3, 0.6)
            spectra[:, k] += rng.uniform(0.05, 0.15) * np.exp(-0.5 * ((rows - c2) / w2) ** 2)
    concentrations = 1.0 - rng.random((K, T))
    clean = spectra @ concentrations
    noise = 0.01 * clean.mean() * np.exp(1.95 * rng.standard_normal((F, T)))
    return np.maximum(clean + noise, 0.0), spectra, concentrations


def run_impulsive_bench(alphas, size, rank: int, iterations: int, runs: int, seed: int):
    """Scale-recovery benchmark over an alpha grid; one row per (algorithm, alpha, run).

    For each (alpha, run) pair: sparse generating factors and stable
    observations are drawn, every algorithm fits the observations blind
    from its own seeded init (the robust model with the monotone MM rule,
    the baselines with their standard updates), and both metrics compare
    the true scale field ``(W0 H0)^(1/alpha)`` with ``(W H)^(1/alpha)``
    built from the fit, the same transform for every algorithm.  Sub-seed
    order per pair: factors, observations, then one init per algorithm in
    ``BENCH_ALGORITHMS`` order.  Rows come back sorted by
    (algorithm, alpha, run).
    """
    alphas = [float(a) for a in alphas]
    F, T = size
    per_pair = 2 + len(BENCH_ALGORITHMS)
    subseeds = derive_seeds(seed, len(alphas) * runs * per_pair)
    results = []
    pair = 0
    for alpha in alphas:
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        for run in range(runs):
            block = subseeds[pair * per_pair : (pair + 1) * per_pair]
            pair += 1
            factors = gen_sparse_factors(F, T, rank, block[0])
            X = gen_pas_observations(factors, alpha, block[1])
            # extended precision: the 1/alpha power overflows float64 once
            # a fit chases the data's heavy-tailed spikes
            power = np.longdouble(1.0 / alpha)
            sigma_true = (factors.W @ factors.H).astype(np.longdouble) ** power
            for alg, init_seed in zip(BENCH_ALGORITHMS, block[2:]):
                rule = "mm" if alg == "levy" else "mur"
                config = engine.FitConfig(model=alg, rank=rank, iterations=iterations,
                                          rule=rule, seed=init_seed)
                (W, H), _ = engine.fit_nmf(X, config)
                sigma_hat = (W @ H).astype(np.longdouble) ** power
                results.append(BenchResult(
                    algorithm=alg, alpha=alpha, run_index=run,
                    alpha_dispersion=metrics.alpha_dispersion(sigma_true, sigma_hat, alpha),
                    kl=np.maximum(metrics.gkl_divergence(sigma_true, sigma_hat), np.longdouble(0.0)),
                    seed=seed,
                ))
    results.sort(key=lambda r: (r.algorithm, r.alpha, r.run_index))
    return results


def run_inpaint_experiment(spectrogram, fraction: float, rank: int, iterations: int,
                           seed: int) -> InpaintResult:
    """Corrupt a spectrogram with impulses and score each model's restoration.

    The robust model (MM rule), the generalized-KL baseline and the
    Itakura-Saito baseline fit the corrupted matrix blind; a masked IS fit
    additionally receives the true corruption mask.  Every algorithm's
    clean-data estimate (``(W H)**2`` for the robust model, ``W H``
    otherwise) is scored by ``log_kl`` against the uncorrupted input.
    ``fraction=0`` skips corruption entirely.  Sub-seed order: corruption,
    then one init per algorithm in ``INPAINT_ALGORITHMS`` order.
    """
    X_clean = as_nonneg_matrix(spectrogram, "spectrogram")
    subseeds = derive_seeds(seed, 1 + len(INPAINT_ALGORITHMS))
    if fraction == 0.0:
        X, mask = X_clean.copy(), np.ones_like(X_clean)
    else:
        X, mask = corrupt_impulsive(X_clean, fraction, subseeds[0])
    report = {}
    restored = None
    for alg, init_seed in zip(INPAINT_ALGORITHMS, subseeds[1:]):
        rule = "mm" if alg == "levy" else "mur"
        fit_mask = mask if alg == "weighted_is" else None
        config = engine.FitConfig(model=alg, rank=rank, iterations=iterations,
                                  rule=rule, seed=init_seed, mask=fit_mask)
        (W, H), _ = engine.fit_nmf(X, config)
        estimate = (W @ H) ** 2 if alg == "levy" else W @ H
        if alg == "levy":
            restored = estimate
        report[alg] = metrics.log_kl(X_clean, estimate)
    return InpaintResult(log_kl=report, restored=restored, fraction=fraction, seed=seed)


def _corr_for_alignment(a, b) -> float:
    # tolerant Pearson: a degenerate (constant) column scores 0 instead of
    # raising, so alignment still works on collapsed components
    a = np.ravel(a) - np.mean(a)
    b = np.ravel(b) - np.mean(b)
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    return float((a * b).sum() / denom) if denom > 0 else 0.0


def align_components(W, reference) -> list:
    """Greedy permutation matching estimated columns to reference columns.

    Returns ``order`` such that estimated column ``order[j]`` corresponds
    to reference column ``j``; pairs are assigned best correlation first,
    without replacement.
    """
    W = np.asarray(W, dtype=float)
    reference = np.asarray(reference, dtype=float)
    K = reference.shape[1]
    if W.shape != reference.shape:
        raise ValueError(f"shape mismatch: estimate {W.shape} vs reference {reference.shape}")
    corr = np.array([[_corr_for_alignment(W[:, i], reference[:, j]) for j in range(K)]
                     for i in range(K)])
    order = [-1] * K
    free_est = set(range(K))
    free_ref = set(range(K))
    for _ in range(K):
        best = max(((corr[i, j], i, j) for i in free_est for j in free_ref),
                   key=lambda t: t[0])
        _, i, j = best
        order[j] = i
        free_est.remove(i)
        free_ref.remove(j)
    return order


_FLUOR_RESTARTS = 8


def _best_blind_fit(X, model: str, rank: int, iterations: int, seed: int, warm=None):
    """Best-of-restarts fit judged by the model's own final training cost.

    ``warm``, when given, adds one extra candidate continued from another
    model's solution.  For the robust model the warm factors are mapped
    entrywise by sqrt, because the sqrt of a nonnegative rank-1 term
    factors exactly and the model multiplies factors on the sqrt scale.
    """
    candidates = []
    for s in derive_seeds(seed, _FLUOR_RESTARTS):
        config = engine.FitConfig(model=model, rank=rank, iterations=iterations,
                                  rule="mur", seed=s)
        pair, trace = engine.fit_nmf(X, config)
        candidates.append((trace.costs[-1], pair))
    if warm is not None:
        W0, H0 = warm
        if model == "levy":
            W0, H0 = np.sqrt(W0), np.sqrt(H0)
        config = engine.FitConfig(model=model, rank=rank, iterations=iterations, rule="mur")
        pair, trace = engine.fit_nmf(X, config, init=(W0.copy(), H0.copy()))
        candidates.append((trace.costs[-1], pair))
    return min(candidates, key=lambda c: c[0])[1]


def run_fluor_experiment(F: int, T: int, seed: int, iterations: int = 50, rank: int = 3):
    """Spectral unmixing comparison against an oracle that knows the spectra.

    The oracle fixes W at the true spectra and learns only concentrations
    (Euclidean updates); its separated sources are the reference.  Each
    blind algorithm runs multiplicative updates from several seeded
    restarts and keeps its best fit by its own cost; the Euclidean and
    robust models also get one candidate warm-started from the
    generalized-KL solution (a standard continuation for stiff
    divergences, applied symmetrically to both sides of the comparison).
    Components are aligned to the true spectra by greedy correlation and
    the separated sources are scored by Pearson correlation against the
    oracle sources.  Returns ``{algorithm: array of per-source
    correlations}``.  Sub-seed order: mixture, oracle init, then one
    restart-stream seed per algorithm in ``FLUOR_ALGORITHMS`` order.
    """
    subseeds = derive_seeds(seed, 2 + len(FLUOR_ALGORITHMS))
    X, spectra, _ = gen_fluorescence_mixture(F, T, rank, subseeds[0])

    _, H0 = engine.init_factors(F, T, rank, seed=subseeds[1])
    oracle_config = engine.FitConfig(model="euclidean", rank=rank, iterations=iterations,
                                     update_w=False)
    (W_o, H_o), _ = engine.fit_nmf(X, oracle_config, init=(spectra, H0))
    oracle_sources = wiener_separate(X, rank1_components(engine.FactorPair(W_o, H_o)))

    kl_seed = subseeds[2 + FLUOR_ALGORITHMS.index("kl")]
    kl_pair = _best_blind_fit(X, "kl", rank, iterations, kl_seed)

    report = {}
    for alg, init_seed in zip(FLUOR_ALGORITHMS, subseeds[2:]):
        if alg == "kl":
            W, H = kl_pair
        else:
            W, H = _best_blind_fit(X, alg, rank, iterations, init_seed, warm=kl_pair)
        order = align_components(W, spectra)
        parts = rank1_components(engine.FactorPair(W[:, order], H[order, :]))
        sources = wiener_separate(X, parts)
        report[alg] = np.array([
            metrics.correlation(sources[k], oracle_sources[k]) for k in range(rank)
        ])
    return report
