"""Counting statistics built on the moment corrections.

The balanced detector's signal ``S`` is shot-noise dominated: its
distribution is a Gaussian of variance ``N`` (the probe photon number)
carrying small non-Gaussian corrections controlled by the normally-ordered
moments.  This module turns :class:`~eosim.moments.MomentBreakdown` values
into distribution curves, quadrature variance contours and a Gaussian
reconstruction of the sampled THz field.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ReconstructionError, ValidityWarning
from .medium import MODE_NORMALIZED, chi2_classical
from .moments import MomentBreakdown
from .probe import mean_detected_frequency, quadrature_phase
from .windows import Context

__all__ = [
    "DistributionCurve",
    "ContourCurve",
    "ReconstructionResult",
    "distribution",
    "hermite_series",
    "variance_contour",
    "field_normalization_scale",
    "reconstruct_thz",
]


@dataclass(frozen=True)
class DistributionCurve:
    """Sampled probability density of the balanced-detection signal."""

    s_grid: np.ndarray
    density: np.ndarray
    shot_noise: float
    gamma: float
    theta: float | None = None


def _gaussian(s: np.ndarray, variance: float) -> np.ndarray:
    return np.exp(-0.5 * s**2 / variance) / np.sqrt(2.0 * np.pi * variance)


def distribution(
    breakdown: MomentBreakdown,
    *,
    n_points: int = 4001,
    span_sigmas: float = 8.0,
) -> DistributionCurve:
    """Signal distribution with the leading variance correction.

    Implements the closed form
    ``P(S) = exp(-S^2/2N)/sqrt(2 pi N) * (1 + (S^2 - N) Gamma / (2 N^2))``,
    which is the two-term Hermite expansion around the shot-noise Gaussian.
    The curve is reported as computed; validity issues only warn.
    """
    n = breakdown.shot_noise
    gamma = breakdown.gamma_total
    if not n > 0.0:
        raise DomainError("shot noise must be positive")
    if abs(gamma) >= n:
        warnings.warn(
            f"variance correction |{gamma:.3e}| is not small against shot noise "
            f"{n:.3e}; the perturbative distribution is unreliable",
            ValidityWarning,
            stacklevel=2,
        )
    half_width = span_sigmas * np.sqrt(n)
    s = np.linspace(-half_width, half_width, n_points)
    density = _gaussian(s, n) * (1.0 + (s**2 - n) * gamma / (2.0 * n**2))
    if np.any(density < 0.0):
        warnings.warn(
            "distribution dips negative inside the sampled window; the "
            "perturbative expansion is being pushed beyond its validity",
            ValidityWarning,
            stacklevel=2,
        )
    return DistributionCurve(
        s_grid=s,
        density=density,
        shot_noise=n,
        gamma=gamma,
        theta=breakdown.theta,
    )


def hermite_series(
    normally_ordered_moments: Sequence[float],
    s_grid: np.ndarray,
    shot_noise: float,
) -> np.ndarray:
    """Density from a Hermite expansion around the shot-noise Gaussian.

    ``normally_ordered_moments[k-1]`` holds the k-th normally-ordered signal
    moment; the density is
    ``gauss(S; N) * (1 + sum_k m_k H_k(S / sqrt(2N)) / ((2N)^(k/2) k!))``
    with physicists' Hermite polynomials generated by their three-term
    recurrence.  A single second moment ``Gamma`` reproduces the closed form
    used by :func:`distribution`.
    """
    if not shot_noise > 0.0:
        raise DomainError("shot noise must be positive")
    s = np.asarray(s_grid, dtype=float)
    x = s / np.sqrt(2.0 * shot_noise)
    correction = np.zeros_like(x)
    h_prev = np.ones_like(x)
    h_curr = 2.0 * x
    root = np.sqrt(2.0 * shot_noise)
    factorial = 1.0
    for k, moment in enumerate(normally_ordered_moments, start=1):
        factorial *= k
        correction += moment / (root**k * factorial) * h_curr
        h_next = 2.0 * x * h_curr - 2.0 * k * h_prev
        h_prev, h_curr = h_curr, h_next
    return _gaussian(s, shot_noise) * (1.0 + correction)


@dataclass(frozen=True)
class ContourCurve:
    """Quadrature-plane standard-deviation contour over a phase sweep."""

    phi: np.ndarray
    radius_full: np.ndarray
    radius_classical: np.ndarray
    radius_shot: np.ndarray


def variance_contour(breakdowns: Sequence[MomentBreakdown]) -> ContourCurve:
    """Standard-deviation contour of the detected quadrature.

    Each waveplate phase measures the quadrature at angle ``phi(theta)``; the
    radius is the signal standard deviation there, shown for the full
    variance, the classical-window-only variance and bare shot noise.  The
    sweep is mirrored to ``phi + pi`` since opposite quadrature directions
    share their variance.
    """
    if len(breakdowns) == 0:
        raise DomainError("contour needs at least one moment breakdown")
    phi = np.array([quadrature_phase(b.theta) for b in breakdowns])
    full = np.array([b.shot_noise + b.gamma_total for b in breakdowns])
    classical = np.array([b.shot_noise + b.gamma_i for b in breakdowns])
    shot = np.array([b.shot_noise for b in breakdowns], dtype=float)
    if np.any(full < 0.0) or np.any(classical < 0.0):
        raise DomainError("total variance became negative; corrections exceed shot noise")
    return ContourCurve(
        phi=np.concatenate([phi, phi + np.pi]),
        radius_full=np.sqrt(np.concatenate([full, full])),
        radius_classical=np.sqrt(np.concatenate([classical, classical])),
        radius_shot=np.sqrt(np.concatenate([shot, shot])),
    )


def field_normalization_scale(ctx: Context, scale: float = 1.0) -> float:
    """Field unit E_norm mapping detected counts to THz field amplitude.

    Uses the static limit of the classical sampling response:
    ``E_norm = c0 / (L * omega_p * |chi2(0, 0)|)``.  In normalized-coupling
    mode the susceptibility carries the square root of the variance
    ``scale``, so E_norm shrinks accordingly.
    """
    chi0 = chi2_classical(ctx.scheme, ctx.consts, 0.0, 0.0)
    if ctx.consts.mode == MODE_NORMALIZED:
        chi0 *= np.sqrt(scale)
    if chi0 == 0.0:
        raise ReconstructionError("static sampling susceptibility vanishes")
    omega_p = mean_detected_frequency(ctx.probe)
    return ctx.consts.c0 / (ctx.consts.length * omega_p * abs(chi0))


@dataclass(frozen=True)
class ReconstructionResult:
    """Gaussian estimate of the sampled THz field distribution."""

    field_grid: np.ndarray
    density: np.ndarray
    variance_signal_units: float
    field_variance: float
    e_norm: float
    theta: float


def reconstruct_thz(
    ctx: Context,
    breakdown: MomentBreakdown,
    *,
    guard: float = 0.05,
    n_points: int = 4001,
    span_sigmas: float = 8.0,
) -> ReconstructionResult:
    """Infer the sampled THz field variance from a measured signal variance.

    Valid only when the classical window dominates: the quantum and
    cascading corrections must stay below ``guard`` relative to ``gamma_i``,
    otherwise the linear-sampling inversion is biased and the call refuses
    with :class:`ReconstructionError`.  The field axis is expressed in units
    of E_norm (see :func:`field_normalization_scale`).
    """
    if breakdown.gamma_i <= 0.0:
        raise ReconstructionError(
            "classical variance correction is not positive; nothing to invert"
        )
    bias = abs(breakdown.gamma_ii + breakdown.gamma_iii) / breakdown.gamma_i
    if bias > guard:
        raise ReconstructionError(
            f"quantum and cascading corrections bias the inversion by "
            f"{bias:.3f} (> {guard:.3f}); reconstruction is unreliable here"
        )
    n = breakdown.shot_noise
    e_norm = field_normalization_scale(ctx, breakdown.scale)
    field_variance = breakdown.gamma_i / n**2
    sigma = np.sqrt(field_variance)
    grid = np.linspace(-span_sigmas * sigma, span_sigmas * sigma, n_points)
    density = _gaussian(grid, field_variance)
    return ReconstructionResult(
        field_grid=grid,
        density=density,
        variance_signal_units=breakdown.gamma_i,
        field_variance=field_variance,
        e_norm=e_norm,
        theta=breakdown.theta,
    )
