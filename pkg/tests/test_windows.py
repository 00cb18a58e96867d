import numpy as np
import pytest

from eosim import (
    MINUS,
    PLUS,
    Context,
    LevelScheme,
    QuadratureError,
    ValidationError,
    chi2,
    chi2_classical,
    default_omega_grid,
    eval_window_parts,
    overlap_f,
    tabulate_window_parts,
    tabulate_windows,
    thz_to_angular,
    window_cascading,
    window_classical,
    window_quantum,
)
from eosim.windows import WINDOW_KINDS, WINDOW_TERMS

from conftest import make_probe, make_resonant_scheme


def make_extreme_offresonant_scheme() -> LevelScheme:
    """Transitions so far out that chi2 is constant over the probe band to ~1e-8."""
    return LevelScheme(
        omega_gp_g=thz_to_angular(1e10),
        omega_f_g=thz_to_angular(2e10),
        gamma_gp_g=thz_to_angular(1e3),
        gamma_f_g=thz_to_angular(1e3),
        gamma_f_gp=thz_to_angular(1e3),
        mu_g_gp=1.0,
        mu_g_f=1.0,
        mu_gp_f=1.0,
    )


@pytest.fixture(scope="module")
def extreme_ctx(normalized_consts) -> Context:
    return Context(
        scheme=make_extreme_offresonant_scheme(),
        probe=make_probe(normalized_consts),
        consts=normalized_consts,
    )


def oracle_windows(ctx, thz_omega: float, theta: float, n: int = (1 << 18) + 1):
    """Dense-trapezoid evaluation of all three windows, straight from the
    spectral-overlap formulas, with the waveplate factor kept inside f_pm."""
    probe, sch, consts = ctx.probe, ctx.scheme, ctx.consts
    lo, hi = probe.support
    w = thz_omega

    def trapz_minus(calls):
        if lo + w >= hi:
            return 0.0
        grid = np.linspace(lo + w, hi, n)
        f = overlap_f(probe, grid, w, theta, -1)
        total = sum(c(grid) for c in calls)
        return np.trapezoid(f * total, grid)

    def trapz_plus_conj(calls):
        if hi - w <= lo:
            return 0.0
        grid = np.linspace(lo, hi - w, n)
        f = np.conj(overlap_f(probe, grid, w, theta, +1))
        total = sum(c(grid) for c in calls)
        return np.trapezoid(f * total, grid)

    def x(r, s, w2_fn, w1_fn, conj=False):
        def call(grid):
            value = chi2(sch, consts, r, s, w2_fn(grid), w1_fn(grid))
            return np.conj(value) if conj else value

        return call

    d = 0.5 * trapz_minus(
        [
            x(MINUS, MINUS, lambda g: w, lambda g: g - w),
            x(MINUS, MINUS, lambda g: g - w, lambda g: w),
        ]
    ) - 0.5 * trapz_plus_conj(
        [
            x(MINUS, MINUS, lambda g: -w, lambda g: g + w, conj=True),
            x(MINUS, MINUS, lambda g: g + w, lambda g: -w, conj=True),
        ]
    )

    d_q = (
        trapz_plus_conj(
            [
                x(PLUS, MINUS, lambda g: -g, lambda g: g + w, conj=True),
                x(MINUS, PLUS, lambda g: g + w, lambda g: -g, conj=True),
            ]
        )
        + trapz_plus_conj(
            [
                x(PLUS, MINUS, lambda g: -w, lambda g: g + w, conj=True),
                x(MINUS, PLUS, lambda g: g + w, lambda g: -w, conj=True),
            ]
        )
        + trapz_minus(
            [
                x(PLUS, MINUS, lambda g: -g, lambda g: g - w),
                x(MINUS, PLUS, lambda g: g - w, lambda g: -g),
            ]
        )
        + trapz_minus(
            [
                x(PLUS, MINUS, lambda g: w, lambda g: g - w),
                x(MINUS, PLUS, lambda g: g - w, lambda g: w),
            ]
        )
    )

    d_casc = 0.5 * trapz_plus_conj(
        [
            x(MINUS, MINUS, lambda g: -g, lambda g: g + w, conj=True),
            x(MINUS, MINUS, lambda g: g + w, lambda g: -g, conj=True),
        ]
    ) + 0.5 * trapz_minus(
        [
            x(MINUS, MINUS, lambda g: -g, lambda g: g - w),
            x(MINUS, MINUS, lambda g: g - w, lambda g: -g),
        ]
    )

    return d, d_q, d_casc


@pytest.mark.parametrize("thz_freq_thz", [12.0, 31.0, 77.0])
def test_windows_match_dense_oracle_resonant(resonant_ctx, thz_freq_thz):
    theta = 0.77 * np.pi
    thz_omega = thz_to_angular(thz_freq_thz)
    d_ref, dq_ref, dc_ref = oracle_windows(resonant_ctx, thz_omega, theta)
    d = window_classical(resonant_ctx, thz_omega, theta)
    d_q = window_quantum(resonant_ctx, thz_omega, theta)
    d_c = window_cascading(resonant_ctx, thz_omega, theta)
    scale = max(abs(d_ref), abs(dq_ref), abs(dc_ref))
    assert abs(d - d_ref) < 5e-7 * scale
    assert abs(d_q - dq_ref) < 5e-7 * scale
    assert abs(d_c - dc_ref) < 5e-7 * scale


def test_windows_match_dense_oracle_offresonant(offres_ctx):
    theta = 1.21 * np.pi
    thz_omega = thz_to_angular(49.0)
    d_ref, dq_ref, dc_ref = oracle_windows(offres_ctx, thz_omega, theta)
    scale = abs(d_ref)
    assert abs(window_classical(offres_ctx, thz_omega, theta) - d_ref) < 1e-7 * scale
    assert abs(window_quantum(offres_ctx, thz_omega, theta) - dq_ref) < 1e-7 * scale
    assert abs(window_cascading(offres_ctx, thz_omega, theta) - dc_ref) < 1e-7 * scale


def test_constant_susceptibility_closed_forms(extreme_ctx):
    probe = extreme_ctx.probe
    chi0 = chi2_classical(extreme_ctx.scheme, extreme_ctx.consts, 0.0, 0.0)
    for frac in (0.1, 0.45, 0.8):
        thz_omega = frac * probe.delta_omega
        weight = (probe.delta_omega - thz_omega) / probe.delta_omega
        parts = eval_window_parts(extreme_ctx, thz_omega)
        assert parts.minus["classical"] == pytest.approx(chi0 * weight, rel=1e-6)
        assert parts.plus["classical"] == pytest.approx(-np.conj(chi0) * weight, rel=1e-6)
        d_amp = parts.window("classical", np.pi / 2)
        assert d_amp == pytest.approx(2j * np.real(chi0) * weight, rel=1e-6)


def test_window_vanishes_beyond_band_edge(extreme_ctx):
    delta = extreme_ctx.probe.delta_omega
    for thz_omega in (delta, 1.2 * delta):
        parts = eval_window_parts(extreme_ctx, thz_omega)
        for kind in WINDOW_KINDS:
            assert parts.minus[kind] == 0.0
            assert parts.plus[kind] == 0.0


def test_dark_phase_suppresses_classical_window(extreme_ctx):
    thz_omega = thz_to_angular(40.0)
    bright = window_classical(extreme_ctx, thz_omega, np.pi / 2)
    dark = window_classical(extreme_ctx, thz_omega, np.pi)
    assert abs(dark) < 1e-6 * abs(bright)


def test_cascading_parts_coincide(resonant_ctx):
    for thz_freq in (8.0, 30.0, 95.0):
        parts = eval_window_parts(resonant_ctx, thz_to_angular(thz_freq))
        c_minus = parts.minus["cascading"]
        c_plus = parts.plus["cascading"]
        assert c_plus == pytest.approx(c_minus, rel=1e-6)


def test_negative_thz_frequency_rejected(offres_ctx):
    from eosim import DomainError

    with pytest.raises(DomainError):
        eval_window_parts(offres_ctx, -1.0)


def test_term_table_structure():
    classical = WINDOW_TERMS["classical"]
    assert {term.prefactor for term in classical} == {0.5, -0.5}
    for term in classical:
        for call in term.calls:
            assert (call.r, call.s) == (MINUS, MINUS)
            assert call.output_slot == (-1, 0)
            assert call.conjugate == (term.weight == "plus_conj")

    quantum = WINDOW_TERMS["quantum"]
    assert all(term.prefactor == 1.0 for term in quantum)
    slots = set()
    for term in quantum:
        first, second = term.calls
        assert (first.r, first.s) == (PLUS, MINUS)
        assert (second.r, second.s) == (MINUS, PLUS)
        assert first.omega2 == second.omega1
        assert first.omega1 == second.omega2
        for call in term.calls:
            assert call.conjugate == (term.weight == "plus_conj")
            slots.add(call.output_slot)
    assert slots == {(-1, 0), (0, -1), (0, 1)}

    cascading = WINDOW_TERMS["cascading"]
    assert all(term.prefactor == 0.5 for term in cascading)
    for term in cascading:
        for call in term.calls:
            assert (call.r, call.s) == (MINUS, MINUS)
            expected = (0, -1) if term.weight == "plus_conj" else (0, 1)
            assert call.output_slot == expected

    for kind in WINDOW_KINDS:
        for term in WINDOW_TERMS[kind]:
            for call in term.calls:
                assert set(call.omega2) <= {-1, 0, 1}
                assert set(call.omega1) <= {-1, 0, 1}


def test_tabulation_matches_scalar_evaluation(resonant_ctx):
    grid = default_omega_grid(resonant_ctx.scheme, resonant_ctx.probe, 48)
    table = tabulate_window_parts(resonant_ctx, grid)
    rng = np.random.default_rng(99)
    for i in rng.choice(grid.size, size=6, replace=False):
        exact = eval_window_parts(resonant_ctx, float(grid[i]))
        for kind in WINDOW_KINDS:
            assert table.minus[kind][i] == pytest.approx(exact.minus[kind], rel=1e-7, abs=1e-60)
            assert table.plus[kind][i] == pytest.approx(exact.plus[kind], rel=1e-7, abs=1e-60)


def test_band_covering_support_changes_nothing(offres_ctx):
    thz_omega = thz_to_angular(33.0)
    full = eval_window_parts(offres_ctx, thz_omega)
    banded = eval_window_parts(offres_ctx, thz_omega, band=offres_ctx.probe.support)
    for kind in WINDOW_KINDS:
        assert banded.minus[kind] == pytest.approx(full.minus[kind], rel=1e-12)
        assert banded.plus[kind] == pytest.approx(full.plus[kind], rel=1e-12)


def test_disjoint_band_gives_zero_windows(offres_ctx):
    lo, hi = offres_ctx.probe.support
    parts = eval_window_parts(offres_ctx, thz_to_angular(20.0), band=(hi + 1.0, hi + 2.0))
    assert all(parts.minus[kind] == 0.0 for kind in WINDOW_KINDS)
    assert all(parts.plus[kind] == 0.0 for kind in WINDOW_KINDS)


def test_band_halves_add_up(offres_ctx):
    thz_omega = thz_to_angular(41.0)
    lo, hi = offres_ctx.probe.support
    mid = 0.5 * (lo + hi)
    full = eval_window_parts(offres_ctx, thz_omega)
    lower = eval_window_parts(offres_ctx, thz_omega, band=(lo, mid))
    upper = eval_window_parts(offres_ctx, thz_omega, band=(mid, hi))
    for kind in WINDOW_KINDS:
        assert lower.minus[kind] + upper.minus[kind] == pytest.approx(
            full.minus[kind], rel=1e-7
        )
        assert lower.plus[kind] + upper.plus[kind] == pytest.approx(
            full.plus[kind], rel=1e-7
        )


def test_default_grid_properties(resonant_ctx):
    grid = default_omega_grid(resonant_ctx.scheme, resonant_ctx.probe, 512)
    assert np.all(np.diff(grid) > 0.0)
    assert grid[0] > 0.0
    assert grid[-1] == pytest.approx(resonant_ctx.probe.max_thz_frequency)
    for res, gamma in resonant_ctx.scheme.resonances():
        if grid[0] < res < grid[-1]:
            assert np.min(np.abs(grid - res)) < gamma


def test_grid_validation(offres_ctx):
    with pytest.raises(ValidationError):
        tabulate_window_parts(offres_ctx, np.array([2.0, 1.0]))
    with pytest.raises(ValidationError):
        tabulate_window_parts(offres_ctx, np.array([0.0, 1.0]))
    with pytest.raises(ValidationError):
        tabulate_window_parts(
            offres_ctx, np.array([1.0, 2.0 * offres_ctx.probe.max_thz_frequency])
        )
    with pytest.raises(ValidationError):
        tabulate_window_parts(offres_ctx, np.empty(0))


def test_assembled_table_combines_parts(resonant_ctx):
    theta = 0.66 * np.pi
    table = tabulate_windows(resonant_ctx, theta, grid=48)
    parts = resonant_ctx.parts_table(48)
    from eosim.probe import phase_factor

    p = phase_factor(theta)
    expected = p * parts.minus["classical"] + np.conj(p) * parts.plus["classical"]
    assert np.allclose(table.d, expected, rtol=1e-13)
    assert table.theta == theta
    assert table.provenance["rel_tol"] == resonant_ctx.rel_tol


def test_quadrature_failure_is_wrapped(normalized_consts):
    # A razor-thin resonance inside the probe band cannot be resolved with a
    # single bisection level, so the adaptive pass must give up loudly.
    harsh = LevelScheme(
        omega_gp_g=thz_to_angular(200.0),
        omega_f_g=thz_to_angular(500.0),
        gamma_gp_g=thz_to_angular(1e-3),
        gamma_f_g=thz_to_angular(5.0),
        gamma_f_gp=thz_to_angular(5.0),
        mu_g_gp=1.0,
        mu_g_f=1.0,
        mu_gp_f=1.0,
    )
    ctx = Context(
        scheme=harsh,
        probe=make_probe(normalized_consts),
        consts=normalized_consts,
        rel_tol=1e-15,
        max_depth=1,
    )
    with pytest.raises(QuadratureError, match="Omega"):
        eval_window_parts(ctx, thz_to_angular(30.0))
