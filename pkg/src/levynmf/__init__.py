"""Robust nonnegative matrix factorization under heavy-tailed noise.

The package factors a nonnegative matrix X as ``(W H)**2 ~ X`` under a
positive-stable observation model, which makes the fit insensitive to
sparse large outliers, and ships the classic Euclidean / KL /
Itakura-Saito NMF baselines, soft-mask source separation, sampling and
density primitives for the underlying distributions, and three seeded
benchmark pipelines with a CLI front end.
"""

from .engine import (DEFAULT_EPSILON, ConfigurationError, FactorPair,
                     FitConfig, FitTrace, baseline_step, fit_nmf,
                     init_factors, levy_cost, log_likelihood, mm_step_levy,
                     mur_step_levy, weighted_is_step)
from .estimators import DivergenceNMF, LevyNMF
from .metrics import (alpha_dispersion, correlation, gkl_divergence,
                      is_divergence, log_kl)
from .separation import rank1_components, wiener_separate
from .stable import (StableParams, levy_cdf, levy_log_pdf, levy_pdf,
                     sample_levy, sample_pas, scale_of_sum)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_EPSILON",
    "ConfigurationError",
    "DivergenceNMF",
    "FactorPair",
    "FitConfig",
    "FitTrace",
    "LevyNMF",
    "StableParams",
    "alpha_dispersion",
    "baseline_step",
    "correlation",
    "fit_nmf",
    "gkl_divergence",
    "init_factors",
    "is_divergence",
    "levy_cdf",
    "levy_cost",
    "levy_log_pdf",
    "levy_pdf",
    "log_kl",
    "log_likelihood",
    "mm_step_levy",
    "mur_step_levy",
    "rank1_components",
    "sample_levy",
    "sample_pas",
    "scale_of_sum",
    "weighted_is_step",
    "wiener_separate",
]
