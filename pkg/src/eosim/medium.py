"""Three-level medium model and its closed-form second-order response.

The medium couples a ground state ``g`` to two excited states ``gp`` and ``f``
through real transition dipoles.  Every response function used elsewhere in the
package reduces to products of complex single-pole propagators

    I_ab(w) = 1 / (w - w_ab + i * gamma_ab),

summed over the excited-level pairs with dipole weights.  The two-sided
(superoperator) susceptibility carries a pair of Liouville-side indices
``r, s`` that only flip signs of individual terms and rescale the prefactor,
so all index combinations share one evaluation core (:func:`term_sums`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import constants as _const

from .errors import ValidationError

__all__ = [
    "SuperopIndex",
    "PLUS",
    "MINUS",
    "LevelScheme",
    "PhysicalConstants",
    "propagator",
    "term_sums",
    "susceptibility_prefactor",
    "chi2",
    "chi2_classical",
]

LEVELS = ("g", "gp", "f")


class SuperopIndex(enum.IntEnum):
    """Liouville-side index of one frequency slot; the integer value is its sign."""

    PLUS = 1
    MINUS = -1

    @property
    def sgn(self) -> int:
        return int(self)


PLUS = SuperopIndex.PLUS
MINUS = SuperopIndex.MINUS


@dataclass(frozen=True)
class LevelScheme:
    """Transition frequencies, linewidths and dipole moments of the medium.

    All frequencies are angular (rad/s).  ``gamma_*`` are half-widths at half
    maximum of the corresponding pole.  Linewidths of the level populations
    (``gamma_gp_gp``, ``gamma_f_f``, ``gamma_g_g``) default to the linewidth of
    the transition connecting that level to the ground state.  Diagonal dipole
    moments default to zero, which removes the same-level terms from the
    susceptibility sum unless they are set explicitly.
    """

    omega_gp_g: float
    omega_f_g: float
    gamma_gp_g: float
    gamma_f_g: float
    gamma_f_gp: float
    mu_g_gp: float
    mu_g_f: float
    mu_gp_f: float
    gamma_gp_gp: float | None = None
    gamma_f_f: float | None = None
    gamma_g_g: float | None = None
    mu_gp_gp: float = 0.0
    mu_f_f: float = 0.0

    def __post_init__(self) -> None:
        if not (self.omega_gp_g > 0.0 and self.omega_f_g > 0.0):
            raise ValidationError("transition frequencies must be positive")
        if self.omega_f_g <= self.omega_gp_g:
            raise ValidationError("level f must lie above level gp (omega_f_g > omega_gp_g)")
        for name in ("gamma_gp_g", "gamma_f_g", "gamma_f_gp"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"{name} must be positive")
        for name in ("gamma_gp_gp", "gamma_f_f", "gamma_g_g"):
            value = getattr(self, name)
            if value is not None and not value > 0.0:
                raise ValidationError(f"{name} must be positive when given")

    def level_frequency(self, a: str) -> float:
        if a == "g":
            return 0.0
        if a == "gp":
            return self.omega_gp_g
        if a == "f":
            return self.omega_f_g
        raise ValidationError(f"unknown level {a!r}")

    def omega_ab(self, a: str, b: str) -> float:
        """Transition frequency w_ab = w_a - w_b (antisymmetric, zero on the diagonal)."""
        return self.level_frequency(a) - self.level_frequency(b)

    def gamma_ab(self, a: str, b: str) -> float:
        """Symmetric linewidth lookup with the documented diagonal defaults."""
        pair = frozenset((a, b))
        if pair == frozenset(("g", "gp")):
            return self.gamma_gp_g
        if pair == frozenset(("g", "f")):
            return self.gamma_f_g
        if pair == frozenset(("gp", "f")):
            return self.gamma_f_gp
        if pair == frozenset(("gp",)):
            return self.gamma_gp_gp if self.gamma_gp_gp is not None else self.gamma_gp_g
        if pair == frozenset(("f",)):
            return self.gamma_f_f if self.gamma_f_f is not None else self.gamma_f_g
        if pair == frozenset(("g",)):
            return self.gamma_g_g if self.gamma_g_g is not None else self.gamma_gp_g
        raise ValidationError(f"unknown level pair ({a!r}, {b!r})")

    def mu_ab(self, a: str, b: str) -> float:
        """Symmetric dipole lookup; diagonal entries default to zero."""
        pair = frozenset((a, b))
        if pair == frozenset(("g", "gp")):
            return self.mu_g_gp
        if pair == frozenset(("g", "f")):
            return self.mu_g_f
        if pair == frozenset(("gp", "f")):
            return self.mu_gp_f
        if pair == frozenset(("gp",)):
            return self.mu_gp_gp
        if pair == frozenset(("f",)):
            return self.mu_f_f
        if pair == frozenset(("g",)):
            return 0.0
        raise ValidationError(f"unknown level pair ({a!r}, {b!r})")

    def resonances(self) -> list[tuple[float, float]]:
        """Pole positions (frequency, linewidth) that can appear in any propagator argument."""
        out = [
            (self.omega_gp_g, self.gamma_gp_g),
            (self.omega_f_g, self.gamma_f_g),
            (self.omega_f_g - self.omega_gp_g, self.gamma_f_gp),
        ]
        if self.mu_gp_gp != 0.0 or self.mu_f_f != 0.0:
            out.append((0.0, min(self.gamma_ab("gp", "gp"), self.gamma_ab("f", "f"))))
        return out


MODE_SI = "si"
MODE_NORMALIZED = "normalized"


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants plus the beam geometry entering the detection model.

    ``mode`` selects how the susceptibility is dimensioned: ``"si"`` keeps the
    1/(eps0*hbar^2) prefactor (dipoles in C*m), ``"normalized"`` replaces it by
    the dimensionless ``coupling`` so that only the spectral structure of the
    response survives and overall noise scales are set downstream.
    """

    area: float
    length: float
    mode: str = MODE_SI
    coupling: float = 1.0
    hbar: float = _const.hbar
    c0: float = _const.c
    eps0: float = _const.epsilon_0
    k_boltzmann: float = _const.k

    def __post_init__(self) -> None:
        if self.mode not in (MODE_SI, MODE_NORMALIZED):
            raise ValidationError(f"mode must be 'si' or 'normalized', got {self.mode!r}")
        if not (self.area > 0.0 and self.length > 0.0):
            raise ValidationError("beam area and medium length must be positive")

    @property
    def field_normalization(self) -> float:
        """C = 4*pi*eps0*A*c0, the vacuum-field normalization constant."""
        return 4.0 * np.pi * self.eps0 * self.area * self.c0

    @classmethod
    def si(cls, area: float, length: float) -> "PhysicalConstants":
        return cls(area=area, length=length, mode=MODE_SI)

    @classmethod
    def normalized(cls, area: float, length: float, coupling: float = 1.0) -> "PhysicalConstants":
        return cls(area=area, length=length, mode=MODE_NORMALIZED, coupling=coupling)


def propagator(scheme: LevelScheme, a: str, b: str, omega):
    """Single-pole propagator I_ab(w) = 1/(w - w_ab + i*gamma_ab).

    ``omega`` may be a scalar or an ndarray; the return matches its shape.
    """
    value = 1.0 / (np.asarray(omega, dtype=np.complex128) - self_energy(scheme, a, b))
    return complex(value) if np.ndim(value) == 0 else value


def self_energy(scheme: LevelScheme, a: str, b: str) -> complex:
    """Complex pole position w_ab - i*gamma_ab of the (a, b) propagator."""
    return scheme.omega_ab(a, b) - 1j * scheme.gamma_ab(a, b)


_EXCITED_PAIRS = (("gp", "gp"), ("gp", "f"), ("f", "gp"), ("f", "f"))


def term_sums(scheme: LevelScheme, sigma, omega1):
    """Dipole-weighted propagator products shared by all superoperator index choices.

    For ``sigma = omega2 + omega1`` this returns the four sums over excited-level
    pairs (a, b):

        S1 = sum mu_gb*mu_ba*mu_ag * I_bg(sigma) * I_ag(omega1)
        S2 = sum mu_gb*mu_ba*mu_ag * I_ab(sigma) * I_gb(omega1)
        S3 = sum mu_gb*mu_ba*mu_ag * I_ga(sigma) * I_gb(omega1)
        S4 = sum mu_gb*mu_ba*mu_ag * I_ab(sigma) * I_ag(omega1)

    Pairs whose dipole product vanishes are skipped.
    """
    sigma = np.asarray(sigma, dtype=np.complex128)
    omega1 = np.asarray(omega1, dtype=np.complex128)
    shape = np.broadcast_shapes(sigma.shape, omega1.shape)
    sums = [np.zeros(shape, dtype=np.complex128) for _ in range(4)]
    for a, b in _EXCITED_PAIRS:
        weight = scheme.mu_ab("g", b) * scheme.mu_ab(b, a) * scheme.mu_ab(a, "g")
        if weight == 0.0:
            continue
        i_bg_s = 1.0 / (sigma - self_energy(scheme, b, "g"))
        i_ab_s = 1.0 / (sigma - self_energy(scheme, a, b))
        i_ga_s = 1.0 / (sigma - self_energy(scheme, "g", a))
        i_ag_1 = 1.0 / (omega1 - self_energy(scheme, a, "g"))
        i_gb_1 = 1.0 / (omega1 - self_energy(scheme, "g", b))
        sums[0] += weight * i_bg_s * i_ag_1
        sums[1] += weight * i_ab_s * i_gb_1
        sums[2] += weight * i_ga_s * i_gb_1
        sums[3] += weight * i_ab_s * i_ag_1
    return tuple(sums)


def susceptibility_prefactor(r: SuperopIndex, s: SuperopIndex) -> float:
    """Index-dependent prefactor 2**(-1 - (sgn r + sgn s)/2)."""
    return 2.0 ** (-1 - (int(r) + int(s)) // 2)


def chi2(
    scheme: LevelScheme,
    consts: PhysicalConstants,
    r: SuperopIndex,
    s: SuperopIndex,
    omega2,
    omega1,
):
    """Two-sided second-order susceptibility chi(2)_{+rs}(-(w2+w1); w2, w1).

    The output frequency slot is fixed by the two inputs; ``r`` and ``s`` are
    the Liouville-side indices of the ``omega2`` and ``omega1`` slots.  Scalars
    broadcast against ndarray inputs.
    """
    r = SuperopIndex(r)
    s = SuperopIndex(s)
    sigma = np.asarray(omega2, dtype=np.complex128) + np.asarray(omega1, dtype=np.complex128)
    s1, s2, s3, s4 = term_sums(scheme, sigma, omega1)
    combo = s1 + int(s) * s2 + int(r) * int(s) * s3 + int(r) * s4
    value = susceptibility_prefactor(r, s) * _dimensional_factor(consts) * combo
    return complex(value) if np.ndim(value) == 0 else value


def chi2_classical(scheme: LevelScheme, consts: PhysicalConstants, omega2, omega1):
    """Classical-response alias: both input slots on the MINUS side."""
    return chi2(scheme, consts, MINUS, MINUS, omega2, omega1)


def _dimensional_factor(consts: PhysicalConstants) -> float:
    if consts.mode == MODE_NORMALIZED:
        return consts.coupling
    return 1.0 / (consts.eps0 * consts.hbar**2)
