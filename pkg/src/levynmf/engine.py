"""Cost functions and iterative factor updates for robust NMF.

Two families of models share one fit driver:

* ``"levy"`` structures the square root of the data scale, fitting
  ``(W H)**2 ~ X``.  Its maximum-likelihood cost is

      C(W, H) = sum_{f,t} (WH)(f,t)**2 / X(f,t) - 2 log (WH)(f,t),

  minimized either by plain multiplicative updates
  (``theta <- theta * a_theta``, heuristic, not monotone) or by the
  majorize-minimization variant ``theta <- theta * sqrt(a_theta)`` whose
  auxiliary-function construction guarantees a non-increasing cost.  Both use

      a_W = ((WH)^-1 H^T) / (((WH) / X) H^T),
      a_H = (W^T (WH)^-1) / (W^T ((WH) / X)),

  with W updated first and H updated against the refreshed W.

* ``"euclidean"``, ``"kl"``, ``"is"`` and ``"weighted_is"`` are the classic
  divergence NMF baselines fitting ``W H ~ X`` with their standard
  multiplicative updates; ``"weighted_is"`` multiplies every elementwise
  term by a {0,1} trust mask so untrusted cells contribute nothing.

Every divisor and log argument is floored at the configured epsilon, factor
entries are re-floored after each update, and a ratio whose numerator and
denominator both vanish is taken to be 1 so dead components stay put.  All
step functions are pure: they return fresh factor arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import metrics
from .stable import levy_log_pdf
from .validation import as_nonneg_matrix, check_binary_mask, check_positive

__all__ = [
    "ConfigurationError",
    "FactorPair",
    "FitConfig",
    "FitTrace",
    "DEFAULT_EPSILON",
    "MODELS",
    "levy_cost",
    "log_likelihood",
    "mur_step_levy",
    "mm_step_levy",
    "baseline_step",
    "weighted_is_step",
    "init_factors",
    "fit_nmf",
]

DEFAULT_EPSILON = 1e-12

MODELS = ("levy", "euclidean", "kl", "is", "weighted_is")
RULES = ("mur", "mm")
BASELINE_MODELS = ("euclidean", "kl", "is")


class ConfigurationError(ValueError):
    """Invalid model/rule/mask combination in a fit configuration."""


class FactorPair(NamedTuple):
    W: np.ndarray
    H: np.ndarray


@dataclass(frozen=True)
class FitConfig:
    """Everything the fit driver needs besides the data itself.

    ``rule="mm"`` is only defined for the Levy model, and a mask is required
    for (and only for) ``model="weighted_is"``.  ``tol`` enables an optional
    relative-cost early stop; it is off by default so traces have a
    predictable length.  ``seed=None`` draws the initialization from fresh
    OS entropy instead of a fixed stream.
    """

    model: str
    rank: int
    iterations: int
    rule: str = "mur"
    epsilon: float = DEFAULT_EPSILON
    seed: Optional[int] = 0
    mask: Optional[np.ndarray] = None
    tol: Optional[float] = None
    update_w: bool = True
    update_h: bool = True

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ConfigurationError(f"unknown model {self.model!r}, expected one of {MODELS}")
        if self.rule not in RULES:
            raise ConfigurationError(f"unknown rule {self.rule!r}, expected one of {RULES}")
        if self.rule == "mm" and self.model != "levy":
            raise ConfigurationError("the MM rule is only derived for the levy model")
        if (self.mask is not None) != (self.model == "weighted_is"):
            raise ConfigurationError("a mask is required exactly when model='weighted_is'")
        if self.rank < 1:
            raise ConfigurationError(f"rank must be >= 1, got {self.rank}")
        if self.iterations < 1:
            raise ConfigurationError(f"iterations must be >= 1, got {self.iterations}")
        if not (self.update_w or self.update_h):
            raise ConfigurationError("at least one of update_w/update_h must be enabled")
        check_positive(self.epsilon, "epsilon")


@dataclass
class FitTrace:
    """Per-iteration cost values recorded by the fit driver."""

    model: str
    rule: str
    costs: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __len__(self) -> int:
        return len(self.costs)


def _floored_ratio(num, den, epsilon):
    # 0/0 convention: an entry whose numerator and denominator both fall
    # below the floor keeps ratio 1, so the factor entry is left alone.
    ratio = num / np.maximum(den, epsilon)
    dead = (num < epsilon) & (den < epsilon)
    if np.any(dead):
        ratio = np.where(dead, 1.0, ratio)
    return ratio


def _check_fit_inputs(X, factors):
    W, H = factors
    X = np.asarray(X, dtype=float)
    W = np.asarray(W, dtype=float)
    H = np.asarray(H, dtype=float)
    if W.ndim != 2 or H.ndim != 2 or W.shape[1] != H.shape[0]:
        raise ValueError(f"inner factor dimensions disagree: W {W.shape}, H {H.shape}")
    if X.shape != (W.shape[0], H.shape[1]):
        raise ValueError(f"data shape {X.shape} does not match factors {(W.shape[0], H.shape[1])}")
    return X, W, H


def _levy_cost_from_product(X, V, epsilon):
    Vf = np.maximum(V, epsilon)
    Xf = np.maximum(X, epsilon)
    return float(np.sum(Vf * Vf / Xf - 2.0 * np.log(Vf)))


def levy_cost(X, factors, epsilon=DEFAULT_EPSILON) -> float:
    """Itakura-Saito-equivalent cost of fitting ``(W H)**2`` to ``X``."""
    X, W, H = _check_fit_inputs(X, factors)
    return _levy_cost_from_product(X, W @ H, epsilon)


def log_likelihood(X, factors, epsilon=DEFAULT_EPSILON) -> float:
    """Total Levy log-likelihood of ``X`` under scale fields ``(W H)**2``.

    Differences of this quantity across factor pairs on a fixed ``X`` equal
    ``-1/2`` times the corresponding :func:`levy_cost` differences; the
    data-only terms cancel.
    """
    X, W, H = _check_fit_inputs(X, factors)
    Vf = np.maximum(W @ H, epsilon)
    Xf = np.maximum(X, epsilon)
    return float(np.sum(levy_log_pdf(Xf, Vf * Vf)))


def _levy_step(X, factors, epsilon, exponent, update_w, update_h):
    X, W, H = _check_fit_inputs(X, factors)
    X_inv = 1.0 / np.maximum(X, epsilon)
    if update_w:
        V = W @ H
        num = (1.0 / np.maximum(V, epsilon)) @ H.T
        den = (V * X_inv) @ H.T
        W = np.maximum(W * _floored_ratio(num, den, epsilon) ** exponent, epsilon)
    if update_h:
        V = W @ H
        num = W.T @ (1.0 / np.maximum(V, epsilon))
        den = W.T @ (V * X_inv)
        H = np.maximum(H * _floored_ratio(num, den, epsilon) ** exponent, epsilon)
    return FactorPair(W, H)


def mur_step_levy(X, factors, epsilon=DEFAULT_EPSILON, update_w=True, update_h=True) -> FactorPair:
    """One heuristic multiplicative sweep (W then H) for the Levy model."""
    return _levy_step(X, factors, epsilon, 1.0, update_w, update_h)


def mm_step_levy(X, factors, epsilon=DEFAULT_EPSILON, update_w=True, update_h=True) -> FactorPair:
    """One majorize-minimization sweep for the Levy model.

    Same ratios as :func:`mur_step_levy` but applied through a square root,
    which is the exact minimizer of the convexity-based auxiliary function
    and therefore never increases :func:`levy_cost`.
    """
    return _levy_step(X, factors, epsilon, 0.5, update_w, update_h)


def baseline_step(model, X, factors, epsilon=DEFAULT_EPSILON, update_w=True, update_h=True) -> FactorPair:
    """One standard multiplicative sweep for Euclidean, KL or IS NMF."""
    if model not in BASELINE_MODELS:
        raise ConfigurationError(f"unknown baseline model {model!r}, expected one of {BASELINE_MODELS}")
    X, W, H = _check_fit_inputs(X, factors)
    if update_w:
        Vf = np.maximum(W @ H, epsilon)
        if model == "euclidean":
            num, den = X @ H.T, Vf @ H.T
        elif model == "kl":
            num, den = (X / Vf) @ H.T, H.sum(axis=1)[None, :]
        else:  # is
            num, den = (X / Vf**2) @ H.T, (1.0 / Vf) @ H.T
        W = np.maximum(W * _floored_ratio(num, den, epsilon), epsilon)
    if update_h:
        Vf = np.maximum(W @ H, epsilon)
        if model == "euclidean":
            num, den = W.T @ X, W.T @ Vf
        elif model == "kl":
            num, den = W.T @ (X / Vf), W.sum(axis=0)[:, None]
        else:
            num, den = W.T @ (X / Vf**2), W.T @ (1.0 / Vf)
        H = np.maximum(H * _floored_ratio(num, den, epsilon), epsilon)
    return FactorPair(W, H)


def weighted_is_step(X, mask, factors, epsilon=DEFAULT_EPSILON, update_w=True, update_h=True) -> FactorPair:
    """IS multiplicative sweep with every elementwise term gated by ``mask``.

    Cells where the mask is 0 contribute to neither numerator nor
    denominator; with an all-ones mask this reproduces ``baseline_step("is")``
    exactly.
    """
    X, W, H = _check_fit_inputs(X, factors)
    M = check_binary_mask(mask, X.shape)
    if update_w:
        Vf = np.maximum(W @ H, epsilon)
        num = (M * X / Vf**2) @ H.T
        den = (M / Vf) @ H.T
        W = np.maximum(W * _floored_ratio(num, den, epsilon), epsilon)
    if update_h:
        Vf = np.maximum(W @ H, epsilon)
        num = W.T @ (M * X / Vf**2)
        den = W.T @ (M / Vf)
        H = np.maximum(H * _floored_ratio(num, den, epsilon), epsilon)
    return FactorPair(W, H)


def init_factors(F, T, K, seed=0, epsilon=DEFAULT_EPSILON) -> FactorPair:
    """Seeded uniform initialization on (epsilon, 1], W drawn before H.

    Uniform draws avoid the zero-locking of multiplicative updates.
    """
    if min(F, T, K) < 1:
        raise ValueError(f"dimensions must be >= 1, got F={F}, T={T}, K={K}")
    rng = np.random.default_rng(seed)
    W = 1.0 - rng.random((F, K)) * (1.0 - epsilon)
    H = 1.0 - rng.random((K, T)) * (1.0 - epsilon)
    return FactorPair(W, H)


def _model_cost(model, X, V, epsilon, mask):
    if model == "levy":
        return _levy_cost_from_product(X, V, epsilon)
    if model == "euclidean":
        return float(np.sum((X - V) ** 2))
    if model == "kl":
        return metrics.gkl_divergence(X, V, epsilon)
    if model == "is":
        return metrics.is_divergence(X, V, epsilon)
    # weighted_is
    Af = np.maximum(X, epsilon)
    Bf = np.maximum(V, epsilon)
    return float(np.sum(mask * (Af / Bf - np.log(Af / Bf) - 1.0)))


def fit_nmf(X, config: FitConfig, init: Optional[FactorPair] = None):
    """Run the configured update rule for a fixed number of sweeps.

    Initializes with :func:`init_factors` unless explicit starting factors
    are supplied, applies one full W-then-H sweep per iteration, records the
    model's cost after each sweep, and returns ``(FactorPair, FitTrace)``.
    The Levy model fits ``(W H)**2 ~ X``; the baselines fit ``W H ~ X``.
    """
    X = as_nonneg_matrix(X)
    F, T = X.shape
    eps = config.epsilon
    mask = None
    if config.model == "weighted_is":
        mask = check_binary_mask(config.mask, X.shape)

    if init is not None:
        W = np.array(init[0], dtype=float)
        H = np.array(init[1], dtype=float)
        _check_fit_inputs(X, (W, H))
    else:
        W, H = init_factors(F, T, config.rank, config.seed, eps)

    kwargs = dict(epsilon=eps, update_w=config.update_w, update_h=config.update_h)
    costs = []
    for _ in range(config.iterations):
        if config.model == "levy":
            step = mm_step_levy if config.rule == "mm" else mur_step_levy
            W, H = step(X, (W, H), **kwargs)
        elif config.model == "weighted_is":
            W, H = weighted_is_step(X, mask, (W, H), **kwargs)
        else:
            W, H = baseline_step(config.model, X, (W, H), **kwargs)
        costs.append(_model_cost(config.model, X, W @ H, eps, mask))
        if (
            config.tol is not None
            and len(costs) >= 2
            and abs(costs[-2] - costs[-1]) <= config.tol * (1.0 + abs(costs[-2]))
        ):
            break
    return FactorPair(W, H), FitTrace(config.model, config.rule, np.asarray(costs))
