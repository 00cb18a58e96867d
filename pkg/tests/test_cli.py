import filecmp

import numpy as np
import pytest

from eosim.cli import main

FAST_OFFRES = """
[scenario]
name = fast-offres

[levels]
nu_gp_g_thz = 3.0e5
nu_f_g_thz = 5.0e5
gamma_gp_g_thz = 300.0
gamma_f_g_thz = 300.0
gamma_f_gp_thz = 300.0
mu_g_gp = 1.0
mu_g_f = 1.0
mu_gp_f = 1.0

[probe]
shape = rectangular
nu_c_thz = 255.0
delta_nu_thz = 150.0
n_photons = 1.0e8

[geometry]
l_um = 10.0
a_um2 = 100.0

[mode]
kind = normalized

[sweep]
theta_points = 7
omega_points = 48
omega_tilde_points = 5
contour_theta_points = 5
distribution_points = 101
"""

HARSH = """
[scenario]
name = harsh

[levels]
nu_gp_g_thz = 200.0
nu_f_g_thz = 500.0
gamma_gp_g_thz = 1.0e-3
gamma_f_g_thz = 5.0
gamma_f_gp_thz = 5.0
mu_g_gp = 1.0
mu_g_f = 1.0
mu_gp_f = 1.0

[probe]
shape = rectangular
nu_c_thz = 255.0
delta_nu_thz = 150.0
n_photons = 1.0e8

[geometry]
l_um = 10.0
a_um2 = 100.0

[mode]
kind = normalized

[sweep]
omega_points = 32

[tolerances]
quadrature_rel = 1e-15
max_depth = 1
"""


@pytest.fixture(scope="module")
def fast_ini(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "fast.ini"
    path.write_text(FAST_OFFRES)
    return path


def read_csv(path):
    header = []
    columns = None
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            header.append(line)
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append([float(v) for v in line.split(",")])
    return header, columns, np.array(rows)


def run(argv):
    return main([str(a) for a in argv])


def test_sweep_theta_writes_csv(fast_ini, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert run(["sweep-theta", "--config", fast_ini, "--out", out]) == 0
    assert f"wrote {out}" in capsys.readouterr().out
    header, columns, rows = read_csv(out)
    assert columns == ["theta_rad", "gammaI", "gammaII", "gammaIII", "gamma_total", "ratio_II"]
    assert rows.shape == (7, 6)
    assert rows[0, 0] == pytest.approx(0.5 * np.pi)
    assert rows[-1, 0] == pytest.approx(1.5 * np.pi)
    assert np.all(rows[:, 1] >= 0.0)
    assert np.allclose(rows[:, 4], rows[:, 1:4].sum(axis=1), rtol=1e-12)
    assert any(line.startswith("# scenario fast-offres") for line in header)
    assert any(line.startswith("# config-sha256 ") for line in header)
    assert any(line.startswith("# scale ") for line in header)


def test_sweep_theta_is_deterministic_and_thread_safe(fast_ini, tmp_path):
    outs = [tmp_path / f"sweep{i}.csv" for i in range(3)]
    assert run(["sweep-theta", "--config", fast_ini, "--out", outs[0]]) == 0
    assert run(["sweep-theta", "--config", fast_ini, "--out", outs[1]]) == 0
    assert run(["sweep-theta", "--config", fast_ini, "--out", outs[2], "--threads", "2"]) == 0
    assert filecmp.cmp(outs[0], outs[1], shallow=False)
    assert filecmp.cmp(outs[0], outs[2], shallow=False)


def test_spectral_filter_endpoints(fast_ini, tmp_path):
    out = tmp_path / "cut.csv"
    assert run(["spectral-filter", "--config", fast_ini, "--out", out]) == 0
    _, columns, rows = read_csv(out)
    assert columns == ["omega_tilde_THz", "gamma_classical", "gamma_full"]
    assert rows.shape == (5, 3)
    assert rows[0, 0] == pytest.approx(217.5)
    assert rows[-1, 0] == pytest.approx(292.5)


def test_distribution_curve(fast_ini, tmp_path):
    out = tmp_path / "dist.csv"
    assert run(["distribution", "--config", fast_ini, "--out", out]) == 0
    header, columns, rows = read_csv(out)
    assert columns == ["S", "density"]
    assert rows.shape == (101, 2)
    assert np.all(rows[:, 1] >= 0.0)
    assert any(line.startswith("# gamma ") for line in header)


def test_contour_mirrors(fast_ini, tmp_path):
    out = tmp_path / "contour.csv"
    assert run(["contour", "--config", fast_ini, "--out", out]) == 0
    _, columns, rows = read_csv(out)
    assert columns == ["phi_rad", "radius_full", "radius_classical", "radius_shot"]
    assert rows.shape == (10, 4)
    assert np.allclose(rows[5:, 0], rows[:5, 0] + np.pi)
    assert np.allclose(rows[5:, 1], rows[:5, 1])
    assert np.allclose(rows[:, 3], 1.0e4)


def test_reconstruct_succeeds_at_crossed_polarizers(fast_ini, tmp_path):
    out = tmp_path / "rec.csv"
    assert run(["reconstruct", "--config", fast_ini, "--out", out]) == 0
    header, columns, rows = read_csv(out)
    assert columns == ["E_over_Enorm", "density"]
    norm = np.trapezoid(rows[:, 1], rows[:, 0])
    assert norm == pytest.approx(1.0, rel=1e-3)
    assert any(line.startswith("# field_variance ") for line in header)
    assert any(line.startswith("# e_norm ") for line in header)


def test_chi2_table_columns(fast_ini, tmp_path):
    out = tmp_path / "chi2.csv"
    assert run(["chi2-table", "--config", fast_ini, "--out", out]) == 0
    _, columns, rows = read_csv(out)
    assert columns[0] == "Omega_THz"
    assert columns[1:] == [
        "Re_chi_mm",
        "Im_chi_mm",
        "Re_chi_pm",
        "Im_chi_pm",
        "Re_chi_mp",
        "Im_chi_mp",
        "Re_chi_pp",
        "Im_chi_pp",
    ]
    assert rows.shape[1] == 9
    assert np.all(np.diff(rows[:, 0]) > 0.0)


def test_windows_table_columns(fast_ini, tmp_path):
    out = tmp_path / "win.csv"
    assert run(["windows-table", "--config", fast_ini, "--out", out]) == 0
    header, columns, rows = read_csv(out)
    assert columns == ["Omega_THz", "ReD", "ImD", "ReDq", "ImDq", "ReDcasc", "ImDcasc"]
    assert rows.shape[1] == 7
    assert rows[-1, 0] == pytest.approx(150.0)
    assert any(line.startswith("# theta_rad ") for line in header)


def test_default_out_path_uses_config_dir(fast_ini, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["chi2-table", "--config", fast_ini]) == 0
    assert (tmp_path / "out" / "chi2-table.csv").is_file()


def test_bad_inputs_exit_2(fast_ini, tmp_path, capsys):
    assert run(["sweep-theta", "--config", tmp_path / "missing.ini"]) == 2
    assert "eosim:" in capsys.readouterr().err
    assert run(["sweep-theta", "--config", fast_ini, "--tolerance", "-1"]) == 2
    assert run(["sweep-theta", "--config", fast_ini, "--threads", "0"]) == 2


def test_quadrature_failure_exits_3(tmp_path, capsys):
    path = tmp_path / "harsh.ini"
    path.write_text(HARSH)
    assert run(["windows-table", "--config", path, "--out", tmp_path / "w.csv"]) == 3
    assert "did not converge" in capsys.readouterr().err


def test_biased_reconstruction_exits_4(fast_ini, tmp_path, capsys):
    text = FAST_OFFRES + "\nreconstruct_theta_pi = 0.75\n"
    path = tmp_path / "biased.ini"
    path.write_text(text)
    assert run(["reconstruct", "--config", path, "--out", tmp_path / "r.csv"]) == 4
    assert "bias" in capsys.readouterr().err
