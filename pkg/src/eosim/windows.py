"""Spectral detection windows of the electro-optic sampling signal.

Three windows weight the THz field, its commutator corrections and the
cascaded (medium-radiated) field in the detected quadrature:

* ``classical``  -- linear transfer D(W, theta) of the sampled THz amplitude,
* ``quantum``    -- quantum-susceptibility window D_q(W, theta),
* ``cascading``  -- cascaded-field window D_casc(W, theta).

Each window is a probe-band integral over products of the spectral overlaps
``f_pm`` with second-order susceptibilities evaluated at frequency arguments
that are affine in the integration variable ``w`` and the THz frequency ``W``.
The full argument bookkeeping lives in the declarative tables
:data:`WINDOW_TERMS`; the evaluators only walk those tables.

Because the probe envelope is real, the waveplate dependence factors exactly:
every term carries either ``P(theta)`` (terms weighted by ``f_-``) or
``conj(P(theta))`` (terms weighted by ``conj(f_+)``).  All integrals are
therefore computed once with ``P = 1`` ("parts") and recombined per theta,
which is also what makes dense theta sweeps cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, QuadratureError, ValidationError
from .medium import (
    MINUS,
    PLUS,
    LevelScheme,
    PhysicalConstants,
    SuperopIndex,
    susceptibility_prefactor,
    term_sums,
)
from .medium import _dimensional_factor
from .probe import ProbeSpectrum, envelope, phase_factor, squared_norm
from .quadrature import (
    GAUSS_WEIGHTS,
    GK_NODES,
    GK_WEIGHTS,
    IntegrationSpec,
    integrate,
)

__all__ = [
    "ChiCall",
    "WindowTerm",
    "WINDOW_TERMS",
    "WINDOW_KINDS",
    "Context",
    "WindowParts",
    "PartsTable",
    "DetectionWindowTable",
    "eval_window_parts",
    "tabulate_window_parts",
    "tabulate_windows",
    "window_classical",
    "window_quantum",
    "window_cascading",
    "default_omega_grid",
    "thz_split_points",
]

WEIGHT_MINUS = "minus"  # integrand weighted by f_-; carries P(theta)
WEIGHT_PLUS_CONJ = "plus_conj"  # integrand weighted by conj(f_+); carries conj(P(theta))

WINDOW_KINDS = ("classical", "quantum", "cascading")


@dataclass(frozen=True)
class ChiCall:
    """One susceptibility evaluation chi(2)_{+rs}(-(w2+w1); w2, w1).

    ``omega2`` and ``omega1`` hold affine coefficients ``(c_w, c_W)`` so the
    argument is ``c_w * w + c_W * W`` in the probe frequency ``w`` and THz
    frequency ``W``.  ``conjugate`` applies complex conjugation to the result.
    """

    r: SuperopIndex
    s: SuperopIndex
    conjugate: bool
    omega2: tuple[int, int]
    omega1: tuple[int, int]

    @property
    def output_slot(self) -> tuple[int, int]:
        """Affine coefficients of the output frequency -(w2 + w1)."""
        return (
            -(self.omega2[0] + self.omega1[0]),
            -(self.omega2[1] + self.omega1[1]),
        )


@dataclass(frozen=True)
class WindowTerm:
    """One probe-band integral: prefactor * int weight * sum of chi calls."""

    weight: str
    prefactor: float
    calls: tuple[ChiCall, ...]


WINDOW_TERMS: dict[str, tuple[WindowTerm, ...]] = {
    "classical": (
        WindowTerm(
            WEIGHT_MINUS,
            0.5,
            (
                ChiCall(MINUS, MINUS, False, (0, 1), (1, -1)),
                ChiCall(MINUS, MINUS, False, (1, -1), (0, 1)),
            ),
        ),
        WindowTerm(
            WEIGHT_PLUS_CONJ,
            -0.5,
            (
                ChiCall(MINUS, MINUS, True, (0, -1), (1, 1)),
                ChiCall(MINUS, MINUS, True, (1, 1), (0, -1)),
            ),
        ),
    ),
    "quantum": (
        WindowTerm(
            WEIGHT_PLUS_CONJ,
            1.0,
            (
                ChiCall(PLUS, MINUS, True, (-1, 0), (1, 1)),
                ChiCall(MINUS, PLUS, True, (1, 1), (-1, 0)),
            ),
        ),
        WindowTerm(
            WEIGHT_PLUS_CONJ,
            1.0,
            (
                ChiCall(PLUS, MINUS, True, (0, -1), (1, 1)),
                ChiCall(MINUS, PLUS, True, (1, 1), (0, -1)),
            ),
        ),
        WindowTerm(
            WEIGHT_MINUS,
            1.0,
            (
                ChiCall(PLUS, MINUS, False, (-1, 0), (1, -1)),
                ChiCall(MINUS, PLUS, False, (1, -1), (-1, 0)),
            ),
        ),
        WindowTerm(
            WEIGHT_MINUS,
            1.0,
            (
                ChiCall(PLUS, MINUS, False, (0, 1), (1, -1)),
                ChiCall(MINUS, PLUS, False, (1, -1), (0, 1)),
            ),
        ),
    ),
    "cascading": (
        WindowTerm(
            WEIGHT_PLUS_CONJ,
            0.5,
            (
                ChiCall(MINUS, MINUS, True, (-1, 0), (1, 1)),
                ChiCall(MINUS, MINUS, True, (1, 1), (-1, 0)),
            ),
        ),
        WindowTerm(
            WEIGHT_MINUS,
            0.5,
            (
                ChiCall(MINUS, MINUS, False, (-1, 0), (1, -1)),
                ChiCall(MINUS, MINUS, False, (1, -1), (-1, 0)),
            ),
        ),
    ),
}


@dataclass
class Context:
    """Medium, probe, constants and numerical settings shared by all evaluators."""

    scheme: LevelScheme
    probe: ProbeSpectrum
    consts: PhysicalConstants
    rel_tol: float = 1e-8
    abs_tol: float = 0.0
    max_depth: int = 48
    omega_points: int = 512
    interp_check_rel: float = 1e-3
    _tables: dict = field(default_factory=dict, repr=False, compare=False)

    def parts_table(
        self, n_points: int | None = None, band: tuple[float, float] | None = None
    ) -> "PartsTable":
        """Tabulated window parts on the default grid, cached per (size, band)."""
        n = int(n_points or self.omega_points)
        key = (n, None if band is None else (float(band[0]), float(band[1])))
        if key not in self._tables:
            grid = default_omega_grid(self.scheme, self.probe, n)
            self._tables[key] = tabulate_window_parts(self, grid, band=band)
        return self._tables[key]


def _compiled_family(family: str):
    compiled = []
    for kind_index, kind in enumerate(WINDOW_KINDS):
        for term in WINDOW_TERMS[kind]:
            if term.weight != family:
                continue
            for call in term.calls:
                compiled.append((kind_index, term.prefactor, call))
    return compiled


_COMPILED = {w: _compiled_family(w) for w in (WEIGHT_MINUS, WEIGHT_PLUS_CONJ)}


def _family_affines(family: str) -> tuple[tuple[int, int], ...]:
    """Distinct w-dependent affine argument patterns appearing in this family."""
    seen = set()
    for _, _, call in _COMPILED[family]:
        sigma = (call.omega2[0] + call.omega1[0], call.omega2[1] + call.omega1[1])
        for aff in (call.omega2, call.omega1, sigma):
            if aff[0] != 0:
                seen.add(aff)
    return tuple(sorted(seen))


_FAMILY_AFFINES = {w: _family_affines(w) for w in (WEIGHT_MINUS, WEIGHT_PLUS_CONJ)}


def _family_values(
    scheme: LevelScheme,
    probe: ProbeSpectrum,
    consts: PhysicalConstants,
    family: str,
    w,
    thz_omega,
):
    """Integrand values of all three window kinds for one weight family.

    ``w`` may be any ndarray shape; ``thz_omega`` must broadcast against it.
    Returns an array of shape ``w.shape + (3,)`` ordered as WINDOW_KINDS.
    """
    w = np.asarray(w, dtype=float)
    dim = _dimensional_factor(consts)
    cache: dict[tuple, tuple] = {}
    acc = [0.0, 0.0, 0.0]
    for kind_index, prefactor, call in _COMPILED[family]:
        key = (call.omega2, call.omega1)
        if key not in cache:
            omega2 = call.omega2[0] * w + call.omega2[1] * thz_omega
            omega1 = call.omega1[0] * w + call.omega1[1] * thz_omega
            cache[key] = term_sums(scheme, omega2 + omega1, omega1)
        s1, s2, s3, s4 = cache[key]
        r = int(call.r)
        s = int(call.s)
        value = susceptibility_prefactor(call.r, call.s) * dim * (
            s1 + s * s2 + r * s * s3 + r * s4
        )
        if call.conjugate:
            value = np.conj(value)
        acc[kind_index] = acc[kind_index] + prefactor * value
    sign = -1 if family == WEIGHT_MINUS else 1
    weight = envelope(probe, w) * envelope(probe, w + sign * thz_omega) / squared_norm(probe)
    return np.stack([a * weight for a in acc], axis=-1)


def _family_domain(
    probe: ProbeSpectrum,
    family: str,
    thz_omega: float,
    band: tuple[float, float] | None,
) -> tuple[float, float]:
    lo, hi = probe.support
    if family == WEIGHT_MINUS:
        dom = (lo + thz_omega, hi)
    else:
        dom = (lo, hi - thz_omega)
    if band is not None:
        dom = (max(dom[0], band[0]), min(dom[1], band[1]))
    if dom[0] >= dom[1]:
        return (hi, hi)  # empty
    return dom


def _omega_split_points(
    scheme: LevelScheme, family: str, thz_omega: float, lo: float, hi: float
) -> tuple[float, ...]:
    """Probe frequencies where any propagator argument crosses a pole."""
    pts = []
    for c_w, c_thz in _FAMILY_AFFINES[family]:
        for res, gamma in scheme.resonances():
            for target in (res, -res):
                w_star = (target - c_thz * thz_omega) / c_w
                for p in (w_star - 10.0 * gamma, w_star, w_star + 10.0 * gamma):
                    if lo < p < hi:
                        pts.append(p)
    return tuple(sorted(pts))


@dataclass(frozen=True)
class WindowParts:
    """Theta-independent window integrals at a single THz frequency.

    ``minus[kind]`` multiplies ``P(theta)`` and ``plus[kind]`` multiplies
    ``conj(P(theta))`` in the assembled window of that kind.
    """

    thz_omega: float
    minus: Mapping[str, complex]
    plus: Mapping[str, complex]

    def window(self, kind: str, theta: float) -> complex:
        p = phase_factor(theta)
        return p * self.minus[kind] + np.conj(p) * self.plus[kind]


def eval_window_parts(
    ctx: Context, thz_omega: float, band: tuple[float, float] | None = None
) -> WindowParts:
    """Adaptively integrate all window parts at one THz frequency."""
    if thz_omega < 0.0:
        raise DomainError("THz frequency must be non-negative")
    sides = {}
    for family in (WEIGHT_MINUS, WEIGHT_PLUS_CONJ):
        lo, hi = _family_domain(ctx.probe, family, thz_omega, band)
        if hi <= lo:
            sides[family] = {kind: 0.0 + 0.0j for kind in WINDOW_KINDS}
            continue
        spec = IntegrationSpec(
            a=lo,
            b=hi,
            split_points=_omega_split_points(ctx.scheme, family, thz_omega, lo, hi),
            rel_tol=ctx.rel_tol,
            abs_tol=ctx.abs_tol,
            max_depth=ctx.max_depth,
        )
        integrand = lambda w, fam=family: _family_values(
            ctx.scheme, ctx.probe, ctx.consts, fam, w, thz_omega
        )
        try:
            result = integrate(integrand, spec)
        except QuadratureError as exc:
            raise QuadratureError(
                f"window integrals did not converge at Omega={thz_omega:.6g} rad/s: {exc}"
            ) from exc
        value = np.atleast_1d(result.value)
        sides[family] = {kind: complex(value[i]) for i, kind in enumerate(WINDOW_KINDS)}
    return WindowParts(thz_omega=thz_omega, minus=sides[WEIGHT_MINUS], plus=sides[WEIGHT_PLUS_CONJ])


class _ComplexSpline:
    """Cubic interpolation of a complex-valued sample set."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        self._re = CubicSpline(x, np.real(y))
        self._im = CubicSpline(x, np.imag(y))

    def __call__(self, x):
        return self._re(x) + 1j * self._im(x)


@dataclass
class PartsTable:
    """Window parts tabulated over a THz frequency grid."""

    omega_grid: np.ndarray
    minus: dict[str, np.ndarray]
    plus: dict[str, np.ndarray]
    provenance: dict
    band: tuple[float, float] | None = None
    _splines: dict = field(default_factory=dict, repr=False, compare=False)

    def spline(self, family: str, kind: str) -> _ComplexSpline:
        key = (family, kind)
        if key not in self._splines:
            data = self.minus if family == WEIGHT_MINUS else self.plus
            self._splines[key] = _ComplexSpline(self.omega_grid, data[kind])
        return self._splines[key]

    def window_arrays(self, theta: float) -> dict[str, np.ndarray]:
        p = phase_factor(theta)
        return {
            kind: p * self.minus[kind] + np.conj(p) * self.plus[kind]
            for kind in WINDOW_KINDS
        }

    def window_functions(self, theta: float) -> dict[str, Callable]:
        """Interpolated windows as callables of the THz frequency."""
        p = phase_factor(theta)
        funcs = {}
        for kind in WINDOW_KINDS:
            sm = self.spline(WEIGHT_MINUS, kind)
            sp = self.spline(WEIGHT_PLUS_CONJ, kind)
            funcs[kind] = lambda x, p=p, sm=sm, sp=sp: p * sm(x) + np.conj(p) * sp(x)
        return funcs


@dataclass(frozen=True)
class DetectionWindowTable:
    """Assembled windows on a THz grid at a fixed waveplate phase."""

    omega_grid: np.ndarray
    d: np.ndarray
    d_q: np.ndarray
    d_casc: np.ndarray
    theta: float
    provenance: dict


def default_omega_grid(scheme: LevelScheme, probe: ProbeSpectrum, n: int = 512) -> np.ndarray:
    """Logarithmically clustered THz grid on (0, W_max], refined around medium poles."""
    if n < 16:
        raise ValidationError("THz grid needs at least 16 points")
    w_max = probe.max_thz_frequency
    w_min = 3e-5 * w_max
    cluster = []
    for res, gamma in scheme.resonances():
        if not (w_min < res < w_max):
            continue
        offsets = gamma * np.geomspace(0.02, 40.0, 12)
        local = np.concatenate([res - offsets[::-1], [res], res + offsets])
        cluster.extend(local[(local > w_min) & (local < w_max)])
    n_base = max(n - len(cluster), n // 2)
    base = np.geomspace(w_min, w_max, n_base)
    grid = np.unique(np.concatenate([base, np.asarray(cluster, dtype=float), [w_max]]))
    return grid[(grid > 0.0) & (grid <= w_max)]


def thz_split_points(scheme: LevelScheme, lo: float, hi: float) -> tuple[float, ...]:
    """THz frequencies where the tabulated windows have resonant structure."""
    pts = []
    for res, gamma in scheme.resonances():
        for p in (res - 10.0 * gamma, res, res + 10.0 * gamma):
            if lo < p < hi:
                pts.append(p)
    return tuple(sorted(pts))


def _panel_edges(
    lo: float, hi: float, splits: Iterable[float], base_panels: int
) -> np.ndarray:
    """Panel boundaries covering [lo, hi], honoring forced splits."""
    pts = sorted({lo, hi, *(s for s in splits if lo < s < hi)})
    max_width = (hi - lo) / base_panels
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        pieces = max(1, int(np.ceil((b - a) / max_width)))
        out.extend(np.linspace(a, b, pieces + 1)[1:])
    return np.asarray(out)


def tabulate_window_parts(
    ctx: Context,
    omega_grid: Sequence[float] | np.ndarray,
    band: tuple[float, float] | None = None,
    base_panels: int = 10,
) -> PartsTable:
    """Evaluate window parts over a whole THz grid with batched panel quadrature.

    All grid rows of one weight family are evaluated in a single vectorized
    pass over fixed Gauss-Kronrod panels; rows whose embedded error estimate
    misses the context tolerance fall back to fully adaptive integration.
    """
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("THz grid must be a non-empty 1-D array")
    if np.any(np.diff(grid) <= 0.0):
        raise ValidationError("THz grid must be strictly increasing")
    w_max = ctx.probe.max_thz_frequency
    if grid[0] <= 0.0 or grid[-1] > w_max * (1.0 + 1e-12):
        raise ValidationError("THz grid must lie in (0, W_max]")

    n = grid.size
    parts = {
        WEIGHT_MINUS: {kind: np.zeros(n, dtype=np.complex128) for kind in WINDOW_KINDS},
        WEIGHT_PLUS_CONJ: {kind: np.zeros(n, dtype=np.complex128) for kind in WINDOW_KINDS},
    }
    fallback_rows: set[int] = set()

    for family in (WEIGHT_MINUS, WEIGHT_PLUS_CONJ):
        edges_per_row = []
        for i in range(n):
            lo, hi = _family_domain(ctx.probe, family, grid[i], band)
            if hi <= lo:
                edges_per_row.append(np.array([hi, hi]))
                continue
            splits = _omega_split_points(ctx.scheme, family, grid[i], lo, hi)
            edges_per_row.append(_panel_edges(lo, hi, splits, base_panels))
        n_panels = max(e.size - 1 for e in edges_per_row)
        lows = np.empty((n, n_panels))
        highs = np.empty((n, n_panels))
        for i, e in enumerate(edges_per_row):
            k = e.size - 1
            lows[i, :k] = e[:-1]
            highs[i, :k] = e[1:]
            lows[i, k:] = e[-1]
            highs[i, k:] = e[-1]

        mid = 0.5 * (lows + highs)
        half = 0.5 * (highs - lows)
        nodes = mid[:, :, None] + half[:, :, None] * GK_NODES[None, None, :]
        values = _family_values(
            ctx.scheme, ctx.probe, ctx.consts, family, nodes, grid[:, None, None]
        )
        wk = GK_WEIGHTS[None, None, :, None]
        wg = GAUSS_WEIGHTS[None, None, :, None]
        h = half[:, :, None, None]
        kron = np.sum(h * wk * values, axis=2)
        gauss = np.sum(h * wg * values, axis=2)
        resabs = np.sum(h * wk * np.abs(values), axis=2)
        row_values = np.sum(kron, axis=1)
        row_err = np.sum(np.max(np.abs(kron - gauss), axis=2), axis=1)
        row_resabs = np.sum(np.max(np.real(resabs), axis=2), axis=1)
        tol = np.maximum(
            ctx.abs_tol,
            np.maximum(
                ctx.rel_tol * np.max(np.abs(row_values), axis=1),
                100.0 * np.finfo(float).eps * row_resabs,
            ),
        )
        bad = row_err > tol
        fallback_rows.update(np.nonzero(bad)[0].tolist())
        for j, kind in enumerate(WINDOW_KINDS):
            parts[family][kind][:] = row_values[:, j]

    for i in sorted(fallback_rows):
        exact = eval_window_parts(ctx, float(grid[i]), band=band)
        for kind in WINDOW_KINDS:
            parts[WEIGHT_MINUS][kind][i] = exact.minus[kind]
            parts[WEIGHT_PLUS_CONJ][kind][i] = exact.plus[kind]

    provenance = {
        "rel_tol": ctx.rel_tol,
        "abs_tol": ctx.abs_tol,
        "max_depth": ctx.max_depth,
        "method": "batched-gk15(+adaptive-fallback)",
        "n_fallback_rows": len(fallback_rows),
        "band": None if band is None else (float(band[0]), float(band[1])),
    }
    return PartsTable(
        omega_grid=grid,
        minus=parts[WEIGHT_MINUS],
        plus=parts[WEIGHT_PLUS_CONJ],
        provenance=provenance,
        band=band,
    )


def tabulate_windows(
    ctx: Context,
    theta: float,
    grid: int | Sequence[float] | np.ndarray | None = None,
    band: tuple[float, float] | None = None,
) -> DetectionWindowTable:
    """Assemble all three windows on a THz grid at one waveplate phase."""
    if grid is None or isinstance(grid, int):
        table = ctx.parts_table(grid, band=band)
    else:
        table = tabulate_window_parts(ctx, np.asarray(grid, dtype=float), band=band)
    assembled = table.window_arrays(theta)
    return DetectionWindowTable(
        omega_grid=table.omega_grid,
        d=assembled["classical"],
        d_q=assembled["quantum"],
        d_casc=assembled["cascading"],
        theta=theta,
        provenance=dict(table.provenance),
    )


def window_classical(
    ctx: Context, thz_omega: float, theta: float, band: tuple[float, float] | None = None
) -> complex:
    """Classical sampling window D(W, theta) at a single THz frequency."""
    return eval_window_parts(ctx, thz_omega, band=band).window("classical", theta)


def window_quantum(
    ctx: Context, thz_omega: float, theta: float, band: tuple[float, float] | None = None
) -> complex:
    """Quantum-susceptibility window D_q(W, theta) at a single THz frequency."""
    return eval_window_parts(ctx, thz_omega, band=band).window("quantum", theta)


def window_cascading(
    ctx: Context, thz_omega: float, theta: float, band: tuple[float, float] | None = None
) -> complex:
    """Cascaded-field window D_casc(W, theta) at a single THz frequency."""
    return eval_window_parts(ctx, thz_omega, band=band).window("cascading", theta)
