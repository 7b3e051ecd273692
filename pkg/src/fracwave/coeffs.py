"""Difference coefficients for the fractional Laplacian and Riesz derivatives.

Two families of weights are generated here, both defined as Fourier
coefficients of trigonometric symbols on the unit cell:

* 1D Riesz fractional-derivative weights

      a_k = (-1)^k Gamma(alpha+1) / (Gamma(alpha/2 - k + 1) Gamma(alpha/2 + k + 1)),

  the Fourier coefficients of (4 sin^2(eta/2))^{alpha/2}. The centered
  difference h^{-alpha} sum_k a_k u(x + k h) is a second-order approximation
  of the 1D Riesz derivative.

* 2D fractional-Laplacian weights a_ij, the Fourier coefficients of

      f(eta, xi) = (4 sin^2(eta/2) + 4 sin^2(xi/2))^{alpha/2},

  so that h^{-alpha} sum_ij a_ij u(x + i h, y + j h) approximates
  (-Delta)^{alpha/2} to second order. This symbol is not a product of 1D
  symbols, which is why the weights need their own transform-based
  construction instead of a tensor product.

All grid functions vanish identically outside the interior node set, so a
solver on N interior nodes per direction needs offsets 0 .. N-1 only; larger
offsets multiply zeros and truncation of the coefficient family introduces
no error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _fft
from .errors import ValidationError

__all__ = [
    "Coeffs1D",
    "Coeffs2D",
    "QuadratureError",
    "validate_alpha",
    "riesz_coeffs_1d",
    "laplacian_coeffs_2d",
    "riesz_sum_coeffs_2d",
    "coeff_quadrature_oracle",
]


class QuadratureError(RuntimeError):
    """The coefficient quadrature oracle failed to reach its tolerance."""

# Upper bound on the symbol sampling grid M (per dimension). M = 16384 keeps
# the sample array around 0.5 GB transient, well inside a small container.
DEFAULT_MAX_SAMPLES = 16384


def validate_alpha(alpha: float, allow_classical: bool = False) -> float:
    """Check that alpha lies in (1, 2), or (1, 2] when the classical
    endpoint is permitted (alpha = 2 reproduces the ordinary Laplacian and
    is useful as a sanity case)."""
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValidationError(f"alpha must be finite, got {alpha!r}")
    upper_ok = alpha <= 2.0 if allow_classical else alpha < 2.0
    if not (1.0 < alpha and upper_ok):
        rng = "(1, 2]" if allow_classical else "(1, 2)"
        raise ValidationError(f"alpha must lie in {rng}, got {alpha}")
    return alpha


@dataclass(frozen=True)
class Coeffs1D:
    """Riesz difference weights a_0 .. a_{L-1}; negative offsets by symmetry
    a_{-k} = a_k. Sign pattern: a_0 > 0, a_k < 0 for k >= 1."""

    alpha: float
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))

    @property
    def count(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class Coeffs2D:
    """One symmetry quadrant of 2D difference weights: quadrant[i, j] = a_ij
    for i, j >= 0; the other quadrants follow from a_{|i|,|j|} = a_ij.
    The quadrant is symmetric (a_ij = a_ji)."""

    alpha: float
    quadrant: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "quadrant", np.asarray(self.quadrant, dtype=float))

    @property
    def count(self) -> int:
        return self.quadrant.shape[0]


def riesz_coeffs_1d(alpha: float, count: int) -> Coeffs1D:
    """Generate the first ``count`` 1D Riesz difference weights.

    Uses the recurrence

        a_0 = Gamma(alpha+1) / Gamma(alpha/2 + 1)^2,
        a_{k+1} = a_k (k - alpha/2) / (k + 1 + alpha/2),

    which is algebraically identical to the Gamma-ratio closed form but
    avoids overflow and never evaluates Gamma at a pole (for alpha = 2 the
    closed form hits Gamma(0) at k = 2; the recurrence yields the exact
    zero instead).
    """
    alpha = validate_alpha(alpha, allow_classical=True)
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    half = alpha / 2.0
    w = np.empty(count)
    w[0] = math.gamma(alpha + 1.0) / math.gamma(half + 1.0) ** 2
    for k in range(count - 1):
        w[k + 1] = w[k] * (k - half) / (k + 1.0 + half)
    return Coeffs1D(alpha, w)


def _sampling_size(count: int, oversampling: int, max_samples: int) -> int:
    m = 1
    while m < oversampling * count:
        m *= 2
    if m > max_samples:
        raise ValidationError(
            f"symbol sampling grid M={m} exceeds the budget {max_samples}; "
            f"reduce count ({count}) or oversampling ({oversampling})"
        )
    return m


def laplacian_coeffs_2d(
    alpha: float,
    count: int,
    oversampling: int = 8,
    max_samples: int = DEFAULT_MAX_SAMPLES,
) -> Coeffs2D:
    """Generate the quadrant a_ij, 0 <= i, j < count, of 2D weights.

    The weights are the discrete Fourier coefficients of the symbol sampled
    on an M x M uniform grid over the periodic cell, M = smallest power of
    two >= oversampling * count. Because the symbol is real and even in each
    variable, the full-cell inverse FFT collapses to a type-I cosine
    transform of the (M/2 + 1)^2 samples on [0, pi]^2, which is what is
    computed here (identical values, a quarter of the memory). Sampling
    instead of integrating makes this an aliased version of the exact
    coefficients; the alias terms are coefficients at offsets >= M - count,
    which decay like |offset|^{-2-alpha}, so the error shrinks rapidly as
    ``oversampling`` grows. Agreement with direct quadrature is pinned in
    the test suite.
    """
    alpha = validate_alpha(alpha, allow_classical=True)
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    if oversampling < 2:
        raise ValidationError(f"oversampling must be >= 2, got {oversampling}")
    m = _sampling_size(count, oversampling, max_samples)
    k = m // 2
    theta = np.pi * np.arange(k + 1) / k
    s = 4.0 * np.sin(theta / 2.0) ** 2
    samples = (s[:, None] + s[None, :]) ** (alpha / 2.0)
    quad = _fft.dctn_type1(samples)[:count, :count] / (4.0 * k * k)
    return Coeffs2D(alpha, quad)


def riesz_sum_coeffs_2d(alpha: float, count: int) -> Coeffs2D:
    """Quadrant of the cross-shaped weights of the separable operator
    (1D Riesz in x) + (1D Riesz in y): entry (0,0) is 2 a_0, the two axes
    carry the 1D weights, and everything off the axes is exactly zero."""
    one_d = riesz_coeffs_1d(alpha, count)
    quad = np.zeros((count, count))
    quad[0, :] = one_d.weights
    quad[:, 0] = one_d.weights
    quad[0, 0] = 2.0 * one_d.weights[0]
    return Coeffs2D(alpha, quad)


def coeff_quadrature_oracle(alpha: float, i: int, j: int, tol: float = 1e-10) -> float:
    """Evaluate a single 2D weight a_ij by adaptive quadrature of its
    defining integral (test oracle; slow, intended for small |i|, |j|).

    a_ij = (1/4 pi^2) * integral over the periodic cell of
           (4 sin^2(eta/2) + 4 sin^2(xi/2))^{alpha/2} * exp(-i (i eta + j xi)).

    Evenness kills the sine part and folds the cell onto [0, pi]^2 with a
    factor 4, leaving a cosine-weighted integral evaluated with absolute
    tolerance ``tol``. The integrand has a mild (continuous) cusp at the
    origin only, so no singularity handling is needed for alpha > 1.
    """
    alpha = validate_alpha(alpha, allow_classical=True)
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    i = abs(int(i))
    j = abs(int(j))
    half = alpha / 2.0

    def integrand(eta: float, xi: float) -> float:
        sym = (4.0 * math.sin(eta / 2.0) ** 2 + 4.0 * math.sin(xi / 2.0) ** 2) ** half
        return sym * math.cos(i * eta) * math.cos(j * xi)

    value, estimate = integrate.dblquad(
        integrand, 0.0, math.pi, 0.0, math.pi, epsabs=tol * math.pi**2 / 2.0,
        epsrel=1e-13,
    )
    if estimate > tol * math.pi**2:
        raise QuadratureError(
            f"quadrature for a_({i},{j}) did not reach tol={tol:g} "
            f"(error estimate {estimate:.2e})"
        )
    return value / math.pi**2
