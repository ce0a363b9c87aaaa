"""Posterior-expectation source estimation by generalized Wiener masking.

For nonnegative stable mixtures the conditional expectation of source k
given the mixture is a soft mask applied to the data,

    X_hat_k = parts_k / (sum_l parts_l) * X,

where ``parts_k`` holds the per-source scale fields raised to the shape
power (for the Levy model at alpha = 1/2 these are the rank-1 slices
``W[:, k] H[k, :]`` of the factorization).  Callers supply the fields
already on the right power scale, so one code path serves every shape.
"""

from __future__ import annotations

import numpy as np

from .validation import as_nonneg_matrix

__all__ = ["rank1_components", "wiener_separate"]


def rank1_components(factors) -> np.ndarray:
    """Stack the K rank-1 terms of a factorization as a (K, F, T) array.

    The slices sum to ``W @ H`` up to floating rounding.
    """
    W, H = factors
    W = np.asarray(W, dtype=float)
    H = np.asarray(H, dtype=float)
    if W.ndim != 2 or H.ndim != 2 or W.shape[1] != H.shape[0]:
        raise ValueError(f"inner factor dimensions disagree: W {W.shape}, H {H.shape}")
    return np.einsum("fk,kt->kft", W, H)


def wiener_separate(X, components, epsilon=1e-12) -> np.ndarray:
    """Split the mixture ``X`` across sources by their share of total scale.

    ``components`` is a sequence of K nonnegative (F, T) scale fields (or an
    equivalent (K, F, T) array).  Where the total scale falls below
    ``epsilon`` the mass is split uniformly (mask 1/K each) so that the
    estimates always sum back to ``X``.
    """
    X = as_nonneg_matrix(X)
    parts = np.asarray(components, dtype=float)
    if parts.ndim != 3 or parts.shape[0] < 1:
        raise ValueError(f"components must stack as (K, F, T), got shape {parts.shape}")
    if parts.shape[1:] != X.shape:
        raise ValueError(f"component shape {parts.shape[1:]} does not match data shape {X.shape}")
    if np.any(parts < 0):
        raise ValueError("components must be nonnegative")
    total = parts.sum(axis=0)
    masks = np.where(total < epsilon, 1.0 / parts.shape[0], parts / np.maximum(total, epsilon))
    return masks * X
