import pytest

from eosim import (
    Context,
    LevelScheme,
    PhysicalConstants,
    ProbeSpectrum,
    thz_to_angular,
    with_photon_number,
)


def make_offresonant_scheme() -> LevelScheme:
    """Both transitions far above the probe band; chi2 is nearly flat in-band."""
    return LevelScheme(
        omega_gp_g=thz_to_angular(3e5),
        omega_f_g=thz_to_angular(5e5),
        gamma_gp_g=thz_to_angular(300.0),
        gamma_f_g=thz_to_angular(300.0),
        gamma_f_gp=thz_to_angular(300.0),
        mu_g_gp=1.0,
        mu_g_f=1.0,
        mu_gp_f=1.0,
    )


def make_resonant_scheme() -> LevelScheme:
    """Lower transition inside the THz band, upper reachable by sum frequencies."""
    return LevelScheme(
        omega_gp_g=thz_to_angular(30.0),
        omega_f_g=thz_to_angular(500.0),
        gamma_gp_g=thz_to_angular(1.0),
        gamma_f_g=thz_to_angular(5.0),
        gamma_f_gp=thz_to_angular(5.0),
        mu_g_gp=1.0,
        mu_g_f=1.0,
        mu_gp_f=1.0,
    )


def make_probe(consts: PhysicalConstants, n_photons: float = 1e8) -> ProbeSpectrum:
    probe = ProbeSpectrum(
        shape="rectangular",
        omega_c=thz_to_angular(255.0),
        delta_omega=thz_to_angular(150.0),
    )
    return with_photon_number(probe, consts, n_photons)


@pytest.fixture(scope="session")
def normalized_consts() -> PhysicalConstants:
    return PhysicalConstants.normalized(area=100e-12, length=10e-6)


@pytest.fixture(scope="session")
def offres_ctx(normalized_consts) -> Context:
    return Context(
        scheme=make_offresonant_scheme(),
        probe=make_probe(normalized_consts),
        consts=normalized_consts,
        omega_points=96,
    )


@pytest.fixture(scope="session")
def resonant_ctx(normalized_consts) -> Context:
    return Context(
        scheme=make_resonant_scheme(),
        probe=make_probe(normalized_consts),
        consts=normalized_consts,
        omega_points=160,
    )


