"""Signal moments of the electro-optic sampling statistics.

The detected quadrature variance splits into shot noise ``N`` plus three
field-induced corrections, each a THz-frequency integral over the detection
windows of :mod:`eosim.windows`:

* ``gamma_i``   -- classical sampling term, weighted by the THz occupancy,
* ``gamma_ii``  -- quantum-susceptibility correction (state independent),
* ``gamma_iii`` -- cascading correction (state independent).

All three share the prefactor ``K**2`` with ``K = N * omega_p * L / c0``
built from the probe photon number, its mean detected frequency and the
propagation length.  The two quantum corrections each contain a macroscopic
(propagation) piece weighted by ``hbar*W/C`` and a boundary piece weighted by
``2*hbar*c0/(C*L)``; the latter can be switched off to isolate the
length-scaling contribution.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, QuadratureError, ValidationError
from .medium import MODE_NORMALIZED, PhysicalConstants
from .probe import mean_detected_frequency, photon_number
from .quadrature import IntegrationSpec, integrate
from .windows import (
    WEIGHT_MINUS,
    WEIGHT_PLUS_CONJ,
    WINDOW_KINDS,
    Context,
    PartsTable,
    eval_window_parts,
    thz_split_points,
)

__all__ = [
    "ThzState",
    "MomentBreakdown",
    "occupancy",
    "gamma_parts",
    "gamma_i",
    "gamma_ii",
    "gamma_iii",
    "gamma_total",
    "mean_signal",
    "sweep_theta",
    "normalized_scale",
    "gamma_spectral_cut",
    "spectral_cut_bounds",
    "check_interpolation",
]


class StateKind(str, enum.Enum):
    VACUUM = "vacuum"
    THERMAL = "thermal"
    OCCUPANCY_TABLE = "occupancy-table"


@dataclass(frozen=True)
class ThzState:
    """Stationary Gaussian state of the THz field, described by its occupancy."""

    kind: StateKind
    temperature: float = 0.0
    table_omega: tuple[float, ...] | None = None
    table_occupancy: tuple[float, ...] | None = None

    @classmethod
    def vacuum(cls) -> "ThzState":
        return cls(kind=StateKind.VACUUM)

    @classmethod
    def thermal(cls, temperature: float) -> "ThzState":
        if temperature < 0.0:
            raise ValidationError("temperature must be non-negative")
        if temperature == 0.0:
            return cls.vacuum()
        return cls(kind=StateKind.THERMAL, temperature=float(temperature))

    @classmethod
    def from_occupancy(
        cls, omega: Sequence[float], occupancy: Sequence[float]
    ) -> "ThzState":
        om = np.asarray(omega, dtype=float)
        nbar = np.asarray(occupancy, dtype=float)
        if om.ndim != 1 or om.shape != nbar.shape or om.size < 2:
            raise ValidationError("occupancy table needs matching 1-D arrays, length >= 2")
        if np.any(np.diff(om) <= 0.0):
            raise ValidationError("occupancy table frequencies must be strictly increasing")
        if np.any(nbar < 0.0):
            raise ValidationError("occupancies must be non-negative")
        return cls(
            kind=StateKind.OCCUPANCY_TABLE,
            table_omega=tuple(om.tolist()),
            table_occupancy=tuple(nbar.tolist()),
        )


def occupancy(state: ThzState, omega, consts: PhysicalConstants):
    """Mean photon occupancy of the THz mode at angular frequency ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if state.kind is StateKind.VACUUM:
        return np.zeros_like(omega)
    if state.kind is StateKind.THERMAL:
        x = consts.hbar * omega / (consts.k_boltzmann * state.temperature)
        return 1.0 / np.expm1(x)
    return np.interp(omega, state.table_omega, state.table_occupancy)


@dataclass(frozen=True)
class MomentBreakdown:
    """Variance corrections at one waveplate phase, in signal (photon-count) units."""

    theta: float
    gamma_i: float
    gamma_ii: float
    gamma_iii: float
    shot_noise: float
    scale: float = 1.0
    info: dict = field(default_factory=dict)

    @property
    def gamma_total(self) -> float:
        return self.gamma_i + self.gamma_ii + self.gamma_iii

    @property
    def ratio_quantum(self) -> float:
        """Share of the quantum-susceptibility term among all three corrections."""
        denom = abs(self.gamma_i) + abs(self.gamma_ii) + abs(self.gamma_iii)
        if denom == 0.0:
            return 0.0
        return abs(self.gamma_ii) / denom


def _signal_prefactor(ctx: Context) -> float:
    n = photon_number(ctx.probe, ctx.consts)
    omega_p = mean_detected_frequency(ctx.probe)
    return n * omega_p * ctx.consts.length / ctx.consts.c0


def _moment_integrand(
    ctx: Context,
    table: PartsTable,
    theta: float,
    state: ThzState,
    macroscopic_only: bool,
) -> Callable:
    funcs = table.window_functions(theta)
    consts = ctx.consts
    w_boundary = 2.0 * consts.hbar * consts.c0 / (consts.field_normalization * consts.length)

    def integrand(om):
        om = np.asarray(om, dtype=float)
        d = funcs["classical"](om)
        d_q = funcs["quantum"](om)
        d_c = funcs["cascading"](om)
        kernel = 2.0 * occupancy(state, om, consts) + 1.0
        w_prop = consts.hbar * om / consts.field_normalization
        f_i = w_prop * np.abs(d) ** 2 * kernel
        f_ii = w_prop * np.real(d * d_q)
        f_iii = w_prop * np.real(d * d_c)
        if not macroscopic_only:
            f_ii = f_ii - w_boundary * np.imag(d * d_q)
            f_iii = f_iii - w_boundary * np.imag(d * d_c)
        return np.stack([f_i, f_ii, f_iii], axis=-1)

    return integrand


def _integrate_moments(
    ctx: Context,
    table: PartsTable,
    theta: float,
    state: ThzState,
    macroscopic_only: bool,
) -> np.ndarray:
    lo = float(table.omega_grid[0])
    hi = float(table.omega_grid[-1])
    spec = IntegrationSpec(
        a=lo,
        b=hi,
        split_points=thz_split_points(ctx.scheme, lo, hi),
        rel_tol=ctx.rel_tol,
        abs_tol=ctx.abs_tol,
        max_depth=ctx.max_depth,
    )
    integrand = _moment_integrand(ctx, table, theta, state, macroscopic_only)
    try:
        result = integrate(integrand, spec)
    except QuadratureError as exc:
        raise QuadratureError(
            f"moment integrals did not converge at theta={theta:.6g} rad: {exc}"
        ) from exc
    return np.real(np.atleast_1d(result.value))


def gamma_parts(
    ctx: Context,
    theta: float,
    state: ThzState,
    *,
    table: PartsTable | None = None,
    scale: float = 1.0,
    macroscopic_only: bool = False,
) -> MomentBreakdown:
    """All three variance corrections at one waveplate phase."""
    if table is None:
        table = ctx.parts_table()
    k = _signal_prefactor(ctx)
    raw = _integrate_moments(ctx, table, theta, state, macroscopic_only)
    values = scale * k**2 * raw
    return MomentBreakdown(
        theta=float(theta),
        gamma_i=float(values[0]),
        gamma_ii=float(values[1]),
        gamma_iii=float(values[2]),
        shot_noise=photon_number(ctx.probe, ctx.consts),
        scale=float(scale),
        info={
            "state": state.kind.value,
            "macroscopic_only": macroscopic_only,
            "band": table.band,
        },
    )


def gamma_i(ctx: Context, theta: float, state: ThzState, **kwargs) -> float:
    return gamma_parts(ctx, theta, state, **kwargs).gamma_i


def gamma_ii(ctx: Context, theta: float, state: ThzState, **kwargs) -> float:
    return gamma_parts(ctx, theta, state, **kwargs).gamma_ii


def gamma_iii(ctx: Context, theta: float, state: ThzState, **kwargs) -> float:
    return gamma_parts(ctx, theta, state, **kwargs).gamma_iii


def gamma_total(ctx: Context, theta: float, state: ThzState, **kwargs) -> float:
    return gamma_parts(ctx, theta, state, **kwargs).gamma_total


def mean_signal(
    ctx: Context,
    amplitude_fn: Callable,
    theta: float,
    *,
    table: PartsTable | None = None,
    scale: float = 1.0,
) -> float:
    """Mean detected signal for a coherent THz spectral amplitude.

    ``amplitude_fn`` maps THz angular frequency to the (complex) coherent
    amplitude; the result is linear in the field, hence scales with the
    square root of a variance ``scale``.
    """
    if table is None:
        table = ctx.parts_table()
    funcs = table.window_functions(theta)
    lo = float(table.omega_grid[0])
    hi = float(table.omega_grid[-1])
    spec = IntegrationSpec(
        a=lo,
        b=hi,
        split_points=thz_split_points(ctx.scheme, lo, hi),
        rel_tol=ctx.rel_tol,
        abs_tol=ctx.abs_tol,
        max_depth=ctx.max_depth,
    )

    def integrand(om):
        om = np.asarray(om, dtype=float)
        amp = np.asarray(amplitude_fn(om), dtype=complex)
        return 2.0 * np.real(amp * funcs["classical"](om))

    result = integrate(integrand, spec)
    return float(np.sqrt(scale) * _signal_prefactor(ctx) * np.real(result.value))


def sweep_theta(
    ctx: Context,
    thetas: Sequence[float] | np.ndarray,
    state: ThzState,
    *,
    table: PartsTable | None = None,
    scale: float = 1.0,
    macroscopic_only: bool = False,
) -> list[MomentBreakdown]:
    """Moment breakdowns over a waveplate-phase sweep (shared window table)."""
    if table is None:
        table = ctx.parts_table()
    return [
        gamma_parts(
            ctx,
            float(theta),
            state,
            table=table,
            scale=scale,
            macroscopic_only=macroscopic_only,
        )
        for theta in np.asarray(thetas, dtype=float)
    ]


def normalized_scale(
    ctx: Context,
    state: ThzState,
    *,
    target: float = 0.2,
    thetas: Sequence[float] | np.ndarray | None = None,
    table: PartsTable | None = None,
) -> float:
    """Rescaling of the variance corrections used in normalized-coupling mode.

    Picks the factor that maps the largest ``|gamma_total|`` over the phase
    sweep onto ``target`` times the shot noise.  Returns 1 in physical-units
    mode or when every correction vanishes.
    """
    if ctx.consts.mode != MODE_NORMALIZED:
        return 1.0
    if thetas is None:
        thetas = np.linspace(0.5 * np.pi, 1.5 * np.pi, 181)
    sweep = sweep_theta(ctx, thetas, state, table=table, scale=1.0)
    peak = max(abs(row.gamma_total) for row in sweep)
    if peak == 0.0:
        return 1.0
    return target * photon_number(ctx.probe, ctx.consts) / peak


def spectral_cut_bounds(ctx: Context) -> tuple[float, float]:
    """Allowed center frequencies of the quarter-band detection cut."""
    lo, hi = ctx.probe.support
    omega_c = 0.5 * (lo + hi)
    quarter = 0.25 * (hi - lo)
    return (omega_c - quarter, omega_c + quarter)


def gamma_spectral_cut(
    ctx: Context,
    omega_tilde: float,
    state: ThzState,
    *,
    scale: float = 1.0,
    macroscopic_only: bool = False,
    n_points: int | None = None,
) -> MomentBreakdown:
    """Variance corrections with detection restricted to a quarter-band window.

    The detected probe frequencies are limited to ``omega_tilde +- bw/4``
    (``bw`` the full probe bandwidth) while the probe pulse itself, and hence
    the photon number and mean frequency in the prefactors, stay untouched.
    Evaluated at the amplitude-quadrature phase ``theta = pi/2``.
    """
    lo_c, hi_c = spectral_cut_bounds(ctx)
    if not (lo_c <= omega_tilde <= hi_c):
        raise DomainError(
            "cut center must keep the quarter band inside the probe support: "
            f"{omega_tilde:.6g} outside [{lo_c:.6g}, {hi_c:.6g}] rad/s"
        )
    lo, hi = ctx.probe.support
    quarter = 0.25 * (hi - lo)
    band = (omega_tilde - quarter, omega_tilde + quarter)
    table = ctx.parts_table(n_points, band=band)
    return gamma_parts(
        ctx,
        0.5 * np.pi,
        state,
        table=table,
        scale=scale,
        macroscopic_only=macroscopic_only,
    )


def check_interpolation(
    ctx: Context, table: PartsTable, n_points: int = 16, seed: int = 0
) -> float:
    """Compare spline-interpolated window parts against direct integration.

    Samples log-uniform THz frequencies inside the tabulated range, returns
    the worst relative deviation (scaled per part by its tabulated maximum)
    and raises if it exceeds the context's interpolation tolerance.
    """
    rng = np.random.default_rng(seed)
    lo = float(table.omega_grid[0])
    hi = float(table.omega_grid[-1])
    samples = np.exp(rng.uniform(np.log(lo), np.log(hi), size=n_points))
    worst = 0.0
    for om in samples:
        exact = eval_window_parts(ctx, float(om), band=table.band)
        for family, data in ((WEIGHT_MINUS, exact.minus), (WEIGHT_PLUS_CONJ, exact.plus)):
            stored = table.minus if family == WEIGHT_MINUS else table.plus
            for kind in WINDOW_KINDS:
                ref = np.max(np.abs(stored[kind]))
                if ref == 0.0:
                    continue
                dev = abs(table.spline(family, kind)(om) - data[kind]) / ref
                worst = max(worst, float(dev))
    if worst > ctx.interp_check_rel:
        raise ValidationError(
            f"window interpolation error {worst:.3e} exceeds tolerance "
            f"{ctx.interp_check_rel:.3e}; increase the table resolution"
        )
    return worst
