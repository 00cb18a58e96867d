import numpy as np
import pytest

from eosim import (
    DomainError,
    EllipsometryState,
    PhysicalConstants,
    ProbeSpectrum,
    ValidationError,
    balanced_waveplate_angle,
    envelope,
    mean_detected_frequency,
    overlap_f,
    phase_factor,
    photon_number,
    quadrature_phase,
    thz_to_angular,
    with_photon_number,
)


def test_phase_factor_is_unimodular_across_branch():
    thetas = np.linspace(np.pi / 2, 3 * np.pi / 2, 1001)
    mags = [abs(phase_factor(t)) for t in thetas]
    assert np.allclose(mags, 1.0, atol=1e-12)


def test_phase_factor_special_points():
    assert phase_factor(np.pi / 2) == pytest.approx(1j)
    assert phase_factor(np.pi) == pytest.approx(1.0 + 0.0j)
    assert phase_factor(3 * np.pi / 2) == pytest.approx(1j)


def test_phase_factor_rejects_outside_branch():
    for theta in (0.0, np.pi / 2 - 1e-3, 3 * np.pi / 2 + 1e-3, 2 * np.pi):
        with pytest.raises(DomainError):
            phase_factor(theta)


def test_waveplate_angle_inverts_cotangent_relation():
    thetas = np.linspace(np.pi / 2 + 1e-6, 3 * np.pi / 2 - 1e-6, 257)
    for theta in thetas:
        alpha = balanced_waveplate_angle(theta)
        half = 0.5 * theta
        cot2 = (np.cos(half) / np.sin(half)) ** 2
        assert np.cos(4.0 * alpha) == pytest.approx(-cot2, abs=1e-9)


def test_quadrature_phase_is_argument_of_phase_factor():
    thetas = np.linspace(np.pi / 2, 3 * np.pi / 2, 513)
    for theta in thetas:
        phi = quadrature_phase(theta)
        assert phi == pytest.approx(np.angle(phase_factor(theta)), abs=1e-12)
    assert quadrature_phase(np.pi / 2) == pytest.approx(np.pi / 2)
    assert quadrature_phase(np.pi) == pytest.approx(0.0, abs=1e-12)


def test_ellipsometry_state_bundles_derived_values():
    state = EllipsometryState.from_theta(0.8 * np.pi)
    assert state.alpha == balanced_waveplate_angle(0.8 * np.pi)
    assert state.phase == phase_factor(0.8 * np.pi)
    assert state.phi == quadrature_phase(0.8 * np.pi)


def rect_probe(amplitude: float = 1.0) -> ProbeSpectrum:
    return ProbeSpectrum(
        shape="rectangular",
        omega_c=thz_to_angular(255.0),
        delta_omega=thz_to_angular(150.0),
        amplitude=amplitude,
    )


def gauss_probe(amplitude: float = 2.0) -> ProbeSpectrum:
    return ProbeSpectrum(
        shape="gaussian",
        omega_c=thz_to_angular(255.0),
        delta_omega=thz_to_angular(40.0),
        amplitude=amplitude,
    )


def test_probe_validation():
    with pytest.raises(ValidationError):
        ProbeSpectrum(shape="triangular", omega_c=1.0, delta_omega=0.5)
    with pytest.raises(ValidationError):
        ProbeSpectrum(shape="rectangular", omega_c=1.0, delta_omega=3.0)
    with pytest.raises(ValidationError):
        ProbeSpectrum(shape="rectangular", omega_c=1.0, delta_omega=-0.5)


def test_squared_norm_matches_dense_quadrature():
    from eosim.probe import squared_norm

    for probe in (rect_probe(1.3), gauss_probe(0.7)):
        lo, hi = probe.support
        grid = np.linspace(lo, hi, 1 << 20)
        dense = np.trapezoid(envelope(probe, grid) ** 2, grid)
        assert squared_norm(probe) == pytest.approx(dense, rel=1e-9)


def test_rectangular_support_and_max_thz():
    probe = rect_probe()
    lo, hi = probe.support
    assert lo == pytest.approx(thz_to_angular(180.0))
    assert hi == pytest.approx(thz_to_angular(330.0))
    assert probe.max_thz_frequency == pytest.approx(thz_to_angular(150.0))


def test_gaussian_support_stays_positive():
    probe = ProbeSpectrum(shape="gaussian", omega_c=thz_to_angular(100.0), delta_omega=thz_to_angular(30.0))
    lo, hi = probe.support
    assert lo > 0.0
    assert hi == pytest.approx(thz_to_angular(100.0 + 12 * 30.0))


def test_overlap_shift_identity():
    probe = rect_probe()
    theta = 0.9 * np.pi
    thz = thz_to_angular(55.0)
    omegas = thz_to_angular(np.linspace(181.0, 270.0, 64))
    plus = overlap_f(probe, omegas, thz, theta, +1)
    minus_shifted = overlap_f(probe, omegas + thz, thz, theta, -1)
    assert np.allclose(plus, minus_shifted, rtol=0.0, atol=1e-18)


def test_overlap_rejects_bad_arguments():
    probe = rect_probe()
    with pytest.raises(DomainError):
        overlap_f(probe, thz_to_angular(250.0), thz_to_angular(10.0), np.pi, 2)
    with pytest.raises(DomainError):
        overlap_f(probe, thz_to_angular(250.0), -1.0, np.pi, 1)


def test_photon_number_rectangular_closed_form():
    consts = PhysicalConstants.si(area=100e-12, length=10e-6)
    probe = rect_probe(amplitude=3.0)
    lo, hi = probe.support
    expected = consts.field_normalization / consts.hbar * probe.amplitude**2 * np.log(hi / lo)
    assert photon_number(probe, consts) == pytest.approx(expected, rel=1e-10)


def test_mean_detected_frequency_rectangular_closed_form():
    probe = rect_probe()
    lo, hi = probe.support
    expected = probe.delta_omega / np.log(hi / lo)
    assert mean_detected_frequency(probe) == pytest.approx(expected, rel=1e-10)
    assert lo < mean_detected_frequency(probe) < hi


def test_with_photon_number_round_trip():
    consts = PhysicalConstants.normalized(area=100e-12, length=10e-6)
    for probe in (rect_probe(), gauss_probe()):
        tuned = with_photon_number(probe, consts, 2.5e7)
        assert photon_number(tuned, consts) == pytest.approx(2.5e7, rel=1e-12)
    with pytest.raises(ValidationError):
        with_photon_number(rect_probe(), consts, 0.0)
