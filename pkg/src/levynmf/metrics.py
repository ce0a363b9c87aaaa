"""Evaluation measures for factorization quality and source similarity.

Scale-field metrics here may be fed values far beyond float64 range (a
scale field at stability exponent ``alpha`` carries a ``1/alpha`` power),
so the divergences preserve extended-precision inputs and the dispersion
metric returns an arbitrary-range :class:`decimal.Decimal`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext

import numpy as np

from .validation import check_same_shape

__all__ = [
    "MetricReport",
    "gkl_divergence",
    "is_divergence",
    "alpha_dispersion",
    "log_kl",
    "correlation",
]


@dataclass(frozen=True)
class MetricReport:
    """A named metric value with the real-valued parameters it depends on."""

    name: str
    value: float
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not np.isfinite(self.value):
            raise ValueError(f"metric {self.name!r} has non-finite value {self.value}")


def gkl_divergence(A, B, epsilon=1e-12):
    """Generalized Kullback-Leibler divergence between nonnegative matrices.

    ``sum A * log(max(A, eps) / max(B, eps)) - A + B`` with the convention
    ``0 * log 0 = 0``.  Zero exactly when A equals B.  Extended-precision
    inputs are not narrowed: float64 arguments give a plain float, wider
    arguments give a numpy scalar of the same width.
    """
    dtype = np.promote_types(np.result_type(np.asarray(A), np.asarray(B)), np.float64)
    A = np.asarray(A, dtype=dtype)
    B = np.asarray(B, dtype=dtype)
    check_same_shape(A, B, "gkl_divergence arguments")
    Af = np.maximum(A, epsilon)
    Bf = np.maximum(B, epsilon)
    total = np.sum(A * (np.log(Af) - np.log(Bf)) - A + B)
    return float(total) if dtype == np.float64 else total


def is_divergence(A, B, epsilon=1e-12) -> float:
    """Itakura-Saito divergence ``sum A/B - log(A/B) - 1``, floored at eps."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    check_same_shape(A, B, "is_divergence arguments")
    ratio = np.maximum(A, epsilon) / np.maximum(B, epsilon)
    return float(np.sum(ratio - np.log(ratio) - 1.0))


def alpha_dispersion(sigma, sigma_hat, alpha) -> Decimal:
    """Dispersion error ``sum |sigma - sigma_hat|**(1/alpha)`` as a Decimal.

    At small alpha the per-cell terms overflow every hardware float (scale
    fields already carry a 1/alpha power, and the metric raises their
    difference to 1/alpha again), so the result is an arbitrary-range
    ``decimal.Decimal``: it compares against ints/floats and other
    Decimals directly.  When every term fits in ``np.longdouble`` the sum
    is taken there; otherwise only the terms within 45 decimal orders of
    the largest are accumulated in log space (the rest cannot move the
    first 30 significant digits).
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    sigma = np.asarray(sigma, dtype=np.longdouble)
    sigma_hat = np.asarray(sigma_hat, dtype=np.longdouble)
    check_same_shape(sigma, sigma_hat, "alpha_dispersion arguments")
    diff = np.abs(sigma - sigma_hat).ravel()
    diff = diff[diff > 0]
    if diff.size == 0:
        return Decimal(0)
    power = np.longdouble(1.0 / alpha)
    log10_terms = np.log10(diff) * power
    with localcontext() as ctx:
        ctx.prec = 30
        ctx.Emax = 10**9
        ctx.Emin = -(10**9)
        if log10_terms.max() < 4900.0:  # longdouble tops out near 1e4932
            total = (diff**power).sum()
            mantissa, exponent = np.frexp(total)
            return +(Decimal(float(mantissa)) * Decimal(2) ** int(exponent))
        top = log10_terms.max()
        total = Decimal(0)
        for e in log10_terms[log10_terms > top - 45.0]:
            total += Decimal(10) ** Decimal(str(e))
        return +total


def log_kl(A, B, epsilon=1e-12) -> float:
    """Natural log of the generalized KL divergence, floored at eps."""
    return float(np.log(max(gkl_divergence(A, B, epsilon), epsilon)))


def correlation(a, b) -> float:
    """Pearson correlation of two equally sized samples (matrices are flattened)."""
    a = np.ravel(np.asarray(a, dtype=float))
    b = np.ravel(np.asarray(b, dtype=float))
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("correlation requires at least two samples")
    da = a - a.mean()
    db = b - b.mean()
    na = np.sqrt(np.sum(da * da))
    nb = np.sqrt(np.sum(db * db))
    if na == 0.0 or nb == 0.0:
        raise ValueError("correlation is undefined for a zero-variance argument")
    return float(np.clip(np.sum(da * db) / (na * nb), -1.0, 1.0))
