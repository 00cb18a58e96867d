"""Probe spectrum and balanced-ellipsometry transfer quantities.

The sampling probe enters all detection integrals only through the normalized
spectral overlaps

    f_pm(w, W, theta) = P(theta) * conj(E(w)) * E(w +/- W) / int |E|^2 dw,

and the detected quadrature through the waveplate phase ``theta`` via

    P(theta) = sqrt(-cos(theta)) + i * sqrt(1 + cos(theta)),

defined for theta in [pi/2, 3*pi/2] where a balancing waveplate angle exists.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .medium import PhysicalConstants
from .quadrature import IntegrationSpec, integrate

__all__ = [
    "ProbeSpectrum",
    "EllipsometryState",
    "phase_factor",
    "balanced_waveplate_angle",
    "quadrature_phase",
    "envelope",
    "overlap_f",
    "squared_norm",
    "photon_number",
    "mean_detected_frequency",
    "with_photon_number",
]

SHAPE_RECTANGULAR = "rectangular"
SHAPE_GAUSSIAN = "gaussian"

_THETA_TOL = 1e-9
# Gaussian envelopes are treated as compactly supported once |E|^2 has fallen
# below ~1e-31 of its peak, twelve standard deviations out.
_GAUSSIAN_SUPPORT_SIGMAS = 12.0


def _clamped_cos(theta: float) -> float:
    """cos(theta) clipped into [-1, 0], raising outside the allowed branch."""
    if not (np.pi / 2 - _THETA_TOL <= theta <= 3 * np.pi / 2 + _THETA_TOL):
        raise DomainError(
            f"waveplate phase {theta!r} outside [pi/2, 3*pi/2]; no balanced configuration exists"
        )
    return float(np.clip(np.cos(theta), -1.0, 0.0))


def phase_factor(theta: float) -> complex:
    """Unit-modulus quadrature selector P(theta) = sqrt(-cos t) + i sqrt(1 + cos t)."""
    c = _clamped_cos(theta)
    return complex(np.sqrt(-c), np.sqrt(1.0 + c))


def balanced_waveplate_angle(theta: float) -> float:
    """Waveplate angle alpha = arccos(-cot^2(theta/2)) / 4 that balances the detector arms."""
    _clamped_cos(theta)
    half = 0.5 * theta
    cot2 = (np.cos(half) / np.sin(half)) ** 2
    return float(np.arccos(np.clip(-cot2, -1.0, 1.0)) / 4.0)


def quadrature_phase(theta: float) -> float:
    """Detected quadrature phase phi = arccos(sqrt(-cos theta)), in [0, pi/2]."""
    c = _clamped_cos(theta)
    return float(np.arccos(np.clip(np.sqrt(-c), 0.0, 1.0)))


@dataclass(frozen=True)
class EllipsometryState:
    """Waveplate phase with its derived balance angle, phase factor and quadrature phase."""

    theta: float
    alpha: float
    phase: complex
    phi: float

    @classmethod
    def from_theta(cls, theta: float) -> "EllipsometryState":
        return cls(
            theta=theta,
            alpha=balanced_waveplate_angle(theta),
            phase=phase_factor(theta),
            phi=quadrature_phase(theta),
        )


@dataclass(frozen=True)
class ProbeSpectrum:
    """Spectral envelope of the probe field.

    ``omega_c`` is the center and ``delta_omega`` the width parameter, both
    angular frequencies: the full support width for ``rectangular``, the
    standard deviation of |E|^2 for ``gaussian``.  ``amplitude`` carries the
    spectral field units.
    """

    shape: str
    omega_c: float
    delta_omega: float
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.shape not in (SHAPE_RECTANGULAR, SHAPE_GAUSSIAN):
            raise ValidationError(f"unknown probe shape {self.shape!r}")
        if not (self.omega_c > 0.0 and self.delta_omega > 0.0):
            raise ValidationError("probe center and width must be positive")
        if not self.amplitude > 0.0:
            raise ValidationError("probe amplitude must be positive")
        if self.shape == SHAPE_RECTANGULAR and self.omega_c <= self.delta_omega / 2.0:
            raise ValidationError("rectangular probe support must stay at positive frequencies")

    @property
    def support(self) -> tuple[float, float]:
        """Interval outside which the envelope is (numerically) zero."""
        if self.shape == SHAPE_RECTANGULAR:
            half = 0.5 * self.delta_omega
            return (self.omega_c - half, self.omega_c + half)
        reach = _GAUSSIAN_SUPPORT_SIGMAS * self.delta_omega
        return (max(self.omega_c - reach, 1e-12 * self.omega_c), self.omega_c + reach)

    @property
    def max_thz_frequency(self) -> float:
        """Largest W for which the overlaps f_pm can be nonzero."""
        lo, hi = self.support
        return hi - lo


def envelope(probe: ProbeSpectrum, omega):
    """Spectral amplitude E(w); real-valued, vectorized over ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if probe.shape == SHAPE_RECTANGULAR:
        lo, hi = probe.support
        value = np.where((omega >= lo) & (omega <= hi), probe.amplitude, 0.0)
    else:
        # |E|^2 is Gaussian with standard deviation delta_omega
        arg = (omega - probe.omega_c) / probe.delta_omega
        value = probe.amplitude * np.exp(-0.25 * arg * arg)
    return float(value) if np.ndim(value) == 0 else value


def squared_norm(probe: ProbeSpectrum) -> float:
    """Closed-form int |E(w)|^2 dw for the supported envelope shapes."""
    if probe.shape == SHAPE_RECTANGULAR:
        return probe.amplitude**2 * probe.delta_omega
    return probe.amplitude**2 * probe.delta_omega * np.sqrt(2.0 * np.pi)


def overlap_f(probe: ProbeSpectrum, omega, thz_omega: float, theta: float, sign: int):
    """Normalized spectral overlap f_pm(w, W, theta) for ``sign`` = +1 or -1."""
    if sign not in (1, -1):
        raise DomainError(f"overlap sign must be +1 or -1, got {sign!r}")
    if thz_omega < 0.0:
        raise DomainError("THz frequency must be non-negative")
    p = phase_factor(theta)
    omega = np.asarray(omega, dtype=float)
    value = p * envelope(probe, omega) * envelope(probe, omega + sign * thz_omega) / squared_norm(probe)
    return complex(value) if np.ndim(value) == 0 else value


@functools.lru_cache(maxsize=64)
def _inverse_frequency_integral(probe: ProbeSpectrum) -> float:
    """int |E(w)|^2 / w dw over the envelope support, by adaptive quadrature."""
    lo, hi = probe.support
    spec = IntegrationSpec(a=lo, b=hi, rel_tol=1e-12)
    result = integrate(lambda w: (envelope(probe, w) ** 2 / w).astype(complex), spec)
    return float(np.real(result.value))


def photon_number(probe: ProbeSpectrum, consts: PhysicalConstants) -> float:
    """Detected probe photon number N = (C/hbar) * int |E|^2/w dw.

    Balanced detection makes the shot-noise variance of the signal equal N.
    """
    return consts.field_normalization / consts.hbar * _inverse_frequency_integral(probe)


def mean_detected_frequency(probe: ProbeSpectrum) -> float:
    """Photon-flux-weighted mean frequency w_p = int|E|^2 dw / int(|E|^2/w) dw."""
    return squared_norm(probe) / _inverse_frequency_integral(probe)


def with_photon_number(
    probe: ProbeSpectrum, consts: PhysicalConstants, n_photons: float
) -> ProbeSpectrum:
    """Return a copy of ``probe`` whose amplitude gives the requested shot noise."""
    if not n_photons > 0.0:
        raise ValidationError("target photon number must be positive")
    unit = ProbeSpectrum(
        shape=probe.shape, omega_c=probe.omega_c, delta_omega=probe.delta_omega, amplitude=1.0
    )
    scale = np.sqrt(n_photons / photon_number(unit, consts))
    return ProbeSpectrum(
        shape=probe.shape,
        omega_c=probe.omega_c,
        delta_omega=probe.delta_omega,
        amplitude=float(scale),
    )
