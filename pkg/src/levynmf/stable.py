"""Levy distribution primitives and positive alpha-stable sampling.

The positive alpha-stable laws are the totally skewed stable distributions
S(alpha, mu=0, sigma, beta=1) with shape 0 < alpha < 1, whose support is the
nonnegative half line.  Their scale parameters add under independent sums,

    sigma_sum**alpha = sum_k sigma_k**alpha,

which is the algebra :func:`scale_of_sum` implements.  The only member with a
closed-form density is the Levy law at alpha = 1/2,

    p(x | sigma) = sqrt(sigma / (2 pi)) * x**(-3/2) * exp(-sigma / (2 x))

for x > 0 and 0 otherwise.  All functions broadcast over numpy arrays and
return Python floats for scalar input.

Sampling uses Kanter's two-uniform representation of the one-sided stable
law, rescaled so that ``sample_pas(0.5, sigma)`` is exactly Levy(sigma); see
:func:`sample_pas` for the formula.  Random streams are explicit ``Generator``
arguments, never module state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .validation import check_positive

__all__ = [
    "StableParams",
    "levy_pdf",
    "levy_log_pdf",
    "levy_cdf",
    "sample_levy",
    "sample_pas",
    "scale_of_sum",
]

# Guards against probability-zero draws that would hit sin(0) or divide by
# zero under floating point.
_UNIFORM_CLIP = 1e-12
_EXP_FLOOR = 1e-300


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1) for positive support, got {alpha}")
    return alpha


def _check_sigma(sigma) -> np.ndarray:
    arr = np.asarray(sigma, dtype=float)
    if arr.size == 0 or not np.all(arr > 0) or not np.all(np.isfinite(arr)):
        raise ValueError("sigma must be positive and finite")
    return arr


@dataclass(frozen=True)
class StableParams:
    """Shape and scale of a positive alpha-stable law (mu=0, beta=1 fixed).

    Parameters
    ----------
    alpha : float
        Tail shape, restricted to (0, 1) so the support is nonnegative.
    sigma : float
        Scale (dispersion around the mode), strictly positive.
    """

    alpha: float
    sigma: float

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        check_positive(self.sigma, "sigma")

    def sample(self, rng: np.random.Generator, size=None):
        """Draw from this law; see :func:`sample_pas`."""
        return sample_pas(self.alpha, self.sigma, rng, size=size)


def levy_pdf(x, sigma):
    """Density of the Levy distribution with scale ``sigma``.

    Evaluates ``sqrt(sigma/(2 pi)) * x**-1.5 * exp(-sigma/(2 x))`` for
    ``x > 0`` and returns exactly 0 elsewhere.  Underflows to 0 for
    ``x >> sigma``; use :func:`levy_log_pdf` in likelihood computations.
    """
    sig = _check_sigma(sigma)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0 and sig.ndim == 0
    x, sig = np.broadcast_arrays(np.atleast_1d(x), np.atleast_1d(sig))
    out = np.zeros(x.shape)
    pos = x > 0
    xp = x[pos]
    sp = sig[pos]
    out[pos] = np.sqrt(sp / (2.0 * np.pi)) * xp ** (-1.5) * np.exp(-sp / (2.0 * xp))
    return float(out[0]) if scalar else out


def levy_log_pdf(x, sigma):
    """Log-density of the Levy distribution, stable where the pdf underflows.

    Requires ``x > 0``; the log-density is -inf on the rest of the support
    boundary and callers are expected to guard for it.
    """
    sig = _check_sigma(sigma)
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0):
        raise ValueError("levy_log_pdf requires x > 0")
    out = (
        0.5 * np.log(sig)
        - 0.5 * np.log(2.0 * np.pi)
        - 1.5 * np.log(x)
        - sig / (2.0 * x)
    )
    return float(out) if np.ndim(out) == 0 else out


def levy_cdf(x, sigma):
    """Distribution function ``erfc(sqrt(sigma/(2 x)))`` of the Levy law."""
    sig = _check_sigma(sigma)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0 and sig.ndim == 0
    x, sig = np.broadcast_arrays(np.atleast_1d(x), np.atleast_1d(sig))
    out = np.zeros(x.shape)
    pos = x > 0
    out[pos] = special.erfc(np.sqrt(sig[pos] / (2.0 * x[pos])))
    return float(out[0]) if scalar else out


def sample_levy(sigma, rng: np.random.Generator, size=None):
    """Draw Levy(sigma) variates as ``sigma / Z**2`` with Z standard normal.

    ``size=None`` draws one variate per entry of ``sigma`` (a single scalar
    draw for scalar ``sigma``).  Scale equivariant: the draw at scale
    ``sigma`` is ``sigma`` times the draw at scale 1 from the same stream.
    """
    sig = _check_sigma(sigma)
    if size is None:
        size = sig.shape
    z = rng.standard_normal(size)
    out = sig / np.maximum(z * z, _EXP_FLOOR)
    return float(out) if np.ndim(out) == 0 else out


def sample_pas(alpha, sigma, rng: np.random.Generator, size=None):
    """Draw positive alpha-stable variates by Kanter's method.

    One variate consumes one uniform U and one unit exponential E (in that
    order) from ``rng`` and is computed as::

        a(U) = sin((1-alpha) pi U) * sin(alpha pi U)**(alpha/(1-alpha))
               / sin(pi U)**(1/(1-alpha))
        X = sigma * cos(pi alpha / 2)**(-1/alpha) * (a(U) / E)**((1-alpha)/alpha)

    The cosine factor converts Kanter's unit-Laplace-transform normalization
    (E[exp(-t X)] = exp(-t**alpha)) to the stable scale convention in which
    sigma adds via :func:`scale_of_sum`; it makes alpha = 1/2 coincide with
    the closed-form Levy(sigma) law, which the tests check against
    :func:`levy_cdf`.

    U is clipped to [1e-12, 1 - 1e-12] and E floored at 1e-300 so that
    probability-zero corner draws cannot produce sin(0) or an overflowing
    division.
    """
    alpha = _check_alpha(alpha)
    sig = _check_sigma(sigma)
    if size is None:
        size = sig.shape
    u = np.clip(rng.random(size), _UNIFORM_CLIP, 1.0 - _UNIFORM_CLIP)
    e = np.maximum(rng.standard_exponential(size), _EXP_FLOOR)
    ratio = alpha / (1.0 - alpha)
    a = (
        np.sin((1.0 - alpha) * np.pi * u)
        * np.sin(alpha * np.pi * u) ** ratio
        / np.sin(np.pi * u) ** (1.0 / (1.0 - alpha))
    )
    unit = (a / e) ** ((1.0 - alpha) / alpha)
    out = sig * np.cos(np.pi * alpha / 2.0) ** (-1.0 / alpha) * unit
    return float(out) if np.ndim(out) == 0 else out


def scale_of_sum(sigmas, alpha) -> float:
    """Scale of a sum of independent stable variables with common ``alpha``.

    Returns ``(sum_k sigma_k**alpha)**(1/alpha)``.
    """
    alpha = _check_alpha(alpha)
    arr = np.asarray(sigmas, dtype=float)
    if arr.size == 0:
        raise ValueError("scale_of_sum requires at least one scale")
    _check_sigma(arr)
    return float(np.sum(arr**alpha) ** (1.0 / alpha))
