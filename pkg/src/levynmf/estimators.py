"""Scikit-learn style wrappers around the multiplicative-update engine.

These estimators follow the transformer protocol: ``fit_transform(X)``
returns the left factor W, ``components_`` holds the right factor H, and
``transform`` re-solves for W on new data while keeping ``components_``
fixed.  The functional core lives in :mod:`levynmf.engine`; these classes
only add parameter handling, fitted state and inverse mappings.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import engine
from .separation import rank1_components, wiener_separate
from .validation import as_nonneg_matrix, check_binary_mask

__all__ = ["LevyNMF", "DivergenceNMF"]


class _MultiplicativeNMF(TransformerMixin, BaseEstimator):
    """Shared fitting machinery; subclasses pin the model family."""

    def __init__(self, n_components=2, n_iter=200, epsilon=engine.DEFAULT_EPSILON,
                 random_state=0, tol=None):
        self.n_components = n_components
        self.n_iter = n_iter
        self.epsilon = epsilon
        self.random_state = random_state
        self.tol = tol

    # subclasses return an engine.FitConfig for the given mask
    def _config(self, mask, update_w=True, update_h=True):
        raise NotImplementedError

    def _expand(self, W):
        """Model approximation of the data implied by factors (W, components_)."""
        raise NotImplementedError

    def fit(self, X, y=None, **fit_params):
        self.fit_transform(X, y, **fit_params)
        return self

    def fit_transform(self, X, y=None, mask=None):
        X = as_nonneg_matrix(X, "X")
        config = self._config(mask)
        factors, trace = engine.fit_nmf(X, config)
        self.components_ = factors.H
        self.W_ = factors.W
        self.cost_trace_ = np.asarray(trace.costs)
        self.n_iter_ = len(trace)
        self.n_features_in_ = X.shape[0]
        return factors.W

    def transform(self, X):
        """Solve for a new W against the fitted ``components_``."""
        check_is_fitted(self, "components_")
        X = as_nonneg_matrix(X, "X")
        if X.shape[1] != self.components_.shape[1]:
            raise ValueError(
                f"X has {X.shape[1]} columns but components_ was fitted with "
                f"{self.components_.shape[1]}"
            )
        config = self._config(None, update_h=False)
        W0, _ = engine.init_factors(X.shape[0], X.shape[1], config.rank,
                                    seed=config.seed, epsilon=config.epsilon)
        factors, _ = engine.fit_nmf(X, config, init=(W0, self.components_.copy()))
        return factors.W

    def inverse_transform(self, W):
        check_is_fitted(self, "components_")
        W = as_nonneg_matrix(W, "W")
        if W.shape[1] != self.components_.shape[0]:
            raise ValueError(
                f"W has {W.shape[1]} columns but there are "
                f"{self.components_.shape[0]} components"
            )
        return self._expand(W)

    def _seed(self):
        return 0 if self.random_state is None else int(self.random_state)


class LevyNMF(_MultiplicativeNMF):
    """Factorization whose squared low-rank product tracks the data.

    The data matrix X is approximated by (WH)**2 under a heavy-tailed
    observation model, which makes the fit robust to sparse large outliers.
    ``rule="mur"`` is the faster heuristic update; ``rule="mm"`` halves the
    exponent and decreases the cost at every sweep.

    Parameters
    ----------
    n_components : rank K of the factorization.
    n_iter : number of full (W, H) update sweeps.
    rule : "mur" or "mm".
    epsilon : flooring constant applied to data, factors and denominators.
    random_state : seed for the uniform factor initialization.
    tol : optional relative cost-decrease threshold for early stopping.

    Attributes
    ----------
    W_ : (F, K) left factor from the last fit.
    components_ : (K, T) right factor H.
    cost_trace_ : objective value after each recorded sweep.
    n_iter_ : number of sweeps actually run.
    """

    def __init__(self, n_components=2, n_iter=200, rule="mur",
                 epsilon=engine.DEFAULT_EPSILON, random_state=0, tol=None):
        super().__init__(n_components=n_components, n_iter=n_iter,
                         epsilon=epsilon, random_state=random_state, tol=tol)
        self.rule = rule

    def _config(self, mask, update_w=True, update_h=True):
        if mask is not None:
            raise ValueError("mask is only supported by DivergenceNMF with divergence='weighted_is'")
        return engine.FitConfig(model="levy", rank=self.n_components,
                                iterations=self.n_iter, rule=self.rule,
                                epsilon=self.epsilon, seed=self._seed(),
                                tol=self.tol, update_w=update_w, update_h=update_h)

    def _expand(self, W):
        return (W @ self.components_) ** 2

    def separate(self, X):
        """Split X into per-component estimates of shape (K, F, T).

        Each estimate is X times a soft mask built from the rank-one parts
        of W @ components_; the estimates sum to X exactly.
        """
        check_is_fitted(self, "components_")
        X = as_nonneg_matrix(X, "X")
        parts = rank1_components(engine.FactorPair(self.W_, self.components_))
        if parts.shape[1:] != X.shape:
            raise ValueError(f"X has shape {X.shape} but the fit produced {parts.shape[1:]}")
        return wiener_separate(X, parts, epsilon=self.epsilon)


class DivergenceNMF(_MultiplicativeNMF):
    """Classical NMF fitting W @ H to X under a chosen divergence.

    Parameters
    ----------
    divergence : "euclidean", "kl", "is" or "weighted_is".  The weighted
        variant needs a binary ``mask`` passed to ``fit``/``fit_transform``
        and skips masked-out cells in both cost and updates.
    """

    def __init__(self, n_components=2, divergence="euclidean", n_iter=200,
                 epsilon=engine.DEFAULT_EPSILON, random_state=0, tol=None):
        super().__init__(n_components=n_components, n_iter=n_iter,
                         epsilon=epsilon, random_state=random_state, tol=tol)
        self.divergence = divergence

    def _config(self, mask, update_w=True, update_h=True):
        if self.divergence not in ("euclidean", "kl", "is", "weighted_is"):
            raise ValueError(f"unknown divergence {self.divergence!r}")
        if self.divergence == "weighted_is" and mask is None and update_h:
            raise ValueError("divergence='weighted_is' requires a mask at fit time")
        if mask is not None and self.divergence != "weighted_is":
            raise ValueError(f"mask is not supported with divergence={self.divergence!r}")
        if not update_h and self.divergence == "weighted_is":
            # transform on new data has no mask; treat every cell as observed
            mask = None
            model = "is"
        else:
            model = self.divergence
        return engine.FitConfig(model=model, rank=self.n_components,
                                iterations=self.n_iter, epsilon=self.epsilon,
                                seed=self._seed(), mask=mask, tol=self.tol,
                                update_w=update_w, update_h=update_h)

    def fit_transform(self, X, y=None, mask=None):
        if mask is not None:
            X = as_nonneg_matrix(X, "X")
            mask = check_binary_mask(mask, X.shape, "mask")
        return super().fit_transform(X, y, mask=mask)

    def _expand(self, W):
        return W @ self.components_
