"""Scenario configuration: INI files, packaged presets and env overrides.

A scenario bundles the medium, probe, geometry, THz state and all numerical
settings.  Configurations are strict: unknown sections or keys are hard
errors, required keys must be present, and every value is type checked.
Environment variables of the form ``EOSIM_<SECTION>_<KEY>`` override file
values, so e.g. ``EOSIM_PROBE_N_PHOTONS=1e9`` rescales the probe without
touching the file.
"""

from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .medium import (
    MODE_NORMALIZED,
    MODE_SI,
    LevelScheme,
    PhysicalConstants,
)
from .moments import ThzState
from .probe import SHAPE_GAUSSIAN, SHAPE_RECTANGULAR, ProbeSpectrum, with_photon_number
from .windows import Context

__all__ = ["ScenarioConfig", "load_config", "preset_names", "thz_to_angular"]

_TWO_PI_THZ = 2.0e12 * np.pi  # THz (ordinary frequency) -> rad/s


def thz_to_angular(nu_thz: float) -> float:
    """Convert a frequency quoted in THz to angular frequency in rad/s."""
    return _TWO_PI_THZ * nu_thz


def angular_to_thz(omega: float) -> float:
    return omega / _TWO_PI_THZ


_REQUIRED = object()


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ParseError(f"expected a number, got {text!r}") from exc


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ParseError(f"expected an integer, got {text!r}") from exc


def _choice(*allowed: str):
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in allowed:
            raise ParseError(f"expected one of {sorted(allowed)}, got {text!r}")
        return value

    return parse


def _optional_float(text: str) -> float | None:
    if text.strip() == "":
        return None
    return _float(text)


# section -> key -> (parser, default); _REQUIRED marks keys without defaults.
_SCHEMA: dict[str, dict[str, tuple]] = {
    "scenario": {
        "name": (str, "scenario"),
        "state": (_choice("vacuum", "thermal"), "vacuum"),
        "temperature_k": (_float, 0.0),
    },
    "levels": {
        "nu_gp_g_thz": (_float, _REQUIRED),
        "nu_f_g_thz": (_float, _REQUIRED),
        "gamma_gp_g_thz": (_float, _REQUIRED),
        "gamma_f_g_thz": (_float, _REQUIRED),
        "gamma_f_gp_thz": (_float, _REQUIRED),
        "mu_g_gp": (_float, _REQUIRED),
        "mu_g_f": (_float, _REQUIRED),
        "mu_gp_f": (_float, _REQUIRED),
        "mu_gp_gp": (_float, 0.0),
        "mu_f_f": (_float, 0.0),
        "gamma_gp_gp_thz": (_optional_float, None),
        "gamma_f_f_thz": (_optional_float, None),
        "gamma_g_g_thz": (_optional_float, None),
    },
    "probe": {
        "shape": (_choice(SHAPE_RECTANGULAR, SHAPE_GAUSSIAN), _REQUIRED),
        "nu_c_thz": (_float, _REQUIRED),
        "delta_nu_thz": (_float, _REQUIRED),
        "n_photons": (_float, _REQUIRED),
    },
    "geometry": {
        "l_um": (_float, _REQUIRED),
        "a_um2": (_float, _REQUIRED),
    },
    "mode": {
        "kind": (_choice(MODE_SI, MODE_NORMALIZED), _REQUIRED),
        "coupling": (_float, 1.0),
        "max_correction_ratio": (_float, 0.2),
    },
    "sweep": {
        "theta_points": (_int, 181),
        "theta_min_pi": (_float, 0.5),
        "theta_max_pi": (_float, 1.5),
        "omega_points": (_int, 512),
        "omega_tilde_points": (_int, 61),
        "contour_theta_points": (_int, 181),
        "distribution_points": (_int, 4001),
        "distribution_span_sigmas": (_float, 8.0),
        "distribution_theta_pi": (_float, 0.5),
        "reconstruct_theta_pi": (_float, 0.5),
    },
    "tolerances": {
        "quadrature_rel": (_float, 1e-8),
        "quadrature_abs": (_float, 0.0),
        "max_depth": (_int, 48),
        "interp_check_rel": (_float, 1e-3),
        "reconstruction_guard": (_float, 0.05),
    },
    "output": {
        "dir": (str, "out"),
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully typed scenario settings, one attribute per configuration key."""

    name: str
    state: str
    temperature_k: float
    nu_gp_g_thz: float
    nu_f_g_thz: float
    gamma_gp_g_thz: float
    gamma_f_g_thz: float
    gamma_f_gp_thz: float
    mu_g_gp: float
    mu_g_f: float
    mu_gp_f: float
    mu_gp_gp: float
    mu_f_f: float
    gamma_gp_gp_thz: float | None
    gamma_f_f_thz: float | None
    gamma_g_g_thz: float | None
    shape: str
    nu_c_thz: float
    delta_nu_thz: float
    n_photons: float
    l_um: float
    a_um2: float
    kind: str
    coupling: float
    max_correction_ratio: float
    theta_points: int
    theta_min_pi: float
    theta_max_pi: float
    omega_points: int
    omega_tilde_points: int
    contour_theta_points: int
    distribution_points: int
    distribution_span_sigmas: float
    distribution_theta_pi: float
    reconstruct_theta_pi: float
    quadrature_rel: float
    quadrature_abs: float
    max_depth: int
    interp_check_rel: float
    reconstruction_guard: float
    dir: str
    config_hash: str

    def scheme(self) -> LevelScheme:
        optional = {}
        for src, dst in (
            ("gamma_gp_gp_thz", "gamma_gp_gp"),
            ("gamma_f_f_thz", "gamma_f_f"),
            ("gamma_g_g_thz", "gamma_g_g"),
        ):
            value = getattr(self, src)
            if value is not None:
                optional[dst] = thz_to_angular(value)
        return LevelScheme(
            omega_gp_g=thz_to_angular(self.nu_gp_g_thz),
            omega_f_g=thz_to_angular(self.nu_f_g_thz),
            gamma_gp_g=thz_to_angular(self.gamma_gp_g_thz),
            gamma_f_g=thz_to_angular(self.gamma_f_g_thz),
            gamma_f_gp=thz_to_angular(self.gamma_f_gp_thz),
            mu_g_gp=self.mu_g_gp,
            mu_g_f=self.mu_g_f,
            mu_gp_f=self.mu_gp_f,
            mu_gp_gp=self.mu_gp_gp,
            mu_f_f=self.mu_f_f,
            **optional,
        )

    def consts(self) -> PhysicalConstants:
        area = self.a_um2 * 1e-12
        length = self.l_um * 1e-6
        if self.kind == MODE_NORMALIZED:
            return PhysicalConstants.normalized(area=area, length=length, coupling=self.coupling)
        return PhysicalConstants.si(area=area, length=length)

    def probe(self, consts: PhysicalConstants | None = None) -> ProbeSpectrum:
        if consts is None:
            consts = self.consts()
        bare = ProbeSpectrum(
            shape=self.shape,
            omega_c=thz_to_angular(self.nu_c_thz),
            delta_omega=thz_to_angular(self.delta_nu_thz),
        )
        return with_photon_number(bare, consts, self.n_photons)

    def thz_state(self) -> ThzState:
        if self.state == "thermal":
            return ThzState.thermal(self.temperature_k)
        return ThzState.vacuum()

    def context(self, rel_tol: float | None = None) -> Context:
        consts = self.consts()
        return Context(
            scheme=self.scheme(),
            probe=self.probe(consts),
            consts=consts,
            rel_tol=self.quadrature_rel if rel_tol is None else rel_tol,
            abs_tol=self.quadrature_abs,
            max_depth=self.max_depth,
            omega_points=self.omega_points,
            interp_check_rel=self.interp_check_rel,
        )

    def theta_grid(self) -> np.ndarray:
        return np.pi * np.linspace(self.theta_min_pi, self.theta_max_pi, self.theta_points)


def _validate_cross(values: dict[str, dict]) -> None:
    problems = []
    if values["scenario"]["state"] == "thermal" and not values["scenario"]["temperature_k"] > 0.0:
        problems.append("scenario.temperature_k must be positive for a thermal state")
    for key in ("nu_gp_g_thz", "nu_f_g_thz", "gamma_gp_g_thz", "gamma_f_g_thz", "gamma_f_gp_thz"):
        if not values["levels"][key] > 0.0:
            problems.append(f"levels.{key} must be positive")
    for section, key in (
        ("probe", "nu_c_thz"),
        ("probe", "delta_nu_thz"),
        ("probe", "n_photons"),
        ("geometry", "l_um"),
        ("geometry", "a_um2"),
        ("mode", "coupling"),
        ("mode", "max_correction_ratio"),
        ("tolerances", "quadrature_rel"),
    ):
        if not values[section][key] > 0.0:
            problems.append(f"{section}.{key} must be positive")
    if values["tolerances"]["quadrature_abs"] < 0.0:
        problems.append("tolerances.quadrature_abs must be non-negative")
    for key in ("theta_points", "omega_tilde_points", "contour_theta_points"):
        if values["sweep"][key] < 2:
            problems.append(f"sweep.{key} must be at least 2")
    if values["sweep"]["omega_points"] < 16:
        problems.append("sweep.omega_points must be at least 16")
    if values["sweep"]["distribution_points"] < 3:
        problems.append("sweep.distribution_points must be at least 3")
    for key in ("theta_min_pi", "theta_max_pi", "distribution_theta_pi", "reconstruct_theta_pi"):
        if not 0.5 <= values["sweep"][key] <= 1.5:
            problems.append(f"sweep.{key} must lie in [0.5, 1.5] (units of pi)")
    if not values["sweep"]["theta_min_pi"] < values["sweep"]["theta_max_pi"]:
        problems.append("sweep.theta_min_pi must be below sweep.theta_max_pi")
    if values["tolerances"]["max_depth"] < 1:
        problems.append("tolerances.max_depth must be at least 1")
    if problems:
        raise ValidationError("invalid configuration:\n  " + "\n  ".join(problems))


def _required_key_listing() -> str:
    lines = []
    for section, keys in _SCHEMA.items():
        needed = [k for k, (_, default) in keys.items() if default is _REQUIRED]
        if needed:
            lines.append(f"[{section}] " + ", ".join(needed))
    return "\n  ".join(lines)


def _env_overrides() -> dict[tuple[str, str], str]:
    overrides = {}
    for var, raw in os.environ.items():
        if not var.startswith("EOSIM_"):
            continue
        rest = var[len("EOSIM_") :]
        if "_" not in rest:
            raise ValidationError(f"malformed override {var}: expected EOSIM_<SECTION>_<KEY>")
        section, key = rest.split("_", 1)
        section = section.lower()
        key = key.lower()
        if section not in _SCHEMA:
            raise ValidationError(f"override {var} names unknown section [{section}]")
        if key not in _SCHEMA[section]:
            allowed = ", ".join(sorted(_SCHEMA[section]))
            raise ValidationError(
                f"override {var} names unknown key {key!r} in [{section}] (allowed: {allowed})"
            )
        overrides[(section, key)] = raw
    return overrides


def preset_names() -> list[str]:
    """Names of the configuration presets shipped with the package."""
    root = resources.files("eosim") / "presets"
    return sorted(p.name[: -len(".ini")] for p in root.iterdir() if p.name.endswith(".ini"))


def _read_ini(text: str, origin: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ParseError(f"cannot parse {origin}: {exc}") from exc
    return parser


def load_config(
    path: str | os.PathLike | None = None,
    preset: str | None = None,
    apply_env: bool = True,
) -> ScenarioConfig:
    """Load and validate a scenario from a file or a packaged preset."""
    if (path is None) == (preset is None):
        raise ValidationError("exactly one of a config path or a preset name is required")
    if preset is not None:
        names = preset_names()
        if preset not in names:
            raise ValidationError(f"unknown preset {preset!r} (available: {', '.join(names)})")
        text = (resources.files("eosim") / "presets" / f"{preset}.ini").read_text()
        origin = f"preset:{preset}"
    else:
        file_path = Path(path)
        if not file_path.is_file():
            raise ValidationError(f"config file not found: {file_path}")
        text = file_path.read_text()
        origin = str(file_path)

    parser = _read_ini(text, origin)

    problems = []
    for section in parser.sections():
        if section not in _SCHEMA:
            problems.append(f"unknown section [{section}] (allowed: {', '.join(_SCHEMA)})")
            continue
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                allowed = ", ".join(sorted(_SCHEMA[section]))
                problems.append(f"unknown key {key!r} in [{section}] (allowed: {allowed})")
    if problems:
        raise ValidationError(f"invalid configuration {origin}:\n  " + "\n  ".join(problems))

    raw: dict[tuple[str, str], str] = {}
    for section in parser.sections():
        for key, value in parser[section].items():
            raw[(section, key)] = value
    if apply_env:
        raw.update(_env_overrides())

    if not raw:
        raise ValidationError(
            f"configuration {origin} is empty; required keys:\n  " + _required_key_listing()
        )

    values: dict[str, dict] = {}
    missing = []
    for section, keys in _SCHEMA.items():
        values[section] = {}
        for key, (parse, default) in keys.items():
            if (section, key) in raw:
                try:
                    values[section][key] = parse(raw[(section, key)])
                except ParseError as exc:
                    raise ParseError(f"{origin}: [{section}] {key}: {exc}") from exc
            elif default is _REQUIRED:
                missing.append(f"{section}.{key}")
            else:
                values[section][key] = default
    if missing:
        raise ValidationError(f"configuration {origin} is missing required keys: " + ", ".join(missing))

    _validate_cross(values)

    digest = hashlib.sha256()
    for section in sorted(values):
        for key in sorted(values[section]):
            digest.update(f"{section}.{key}={values[section][key]!r}\n".encode())

    flat: dict[str, object] = {}
    for section in values:
        flat.update(values[section])
    flat["config_hash"] = digest.hexdigest()

    field_names = {f.name for f in fields(ScenarioConfig)}
    assert field_names == set(flat), "configuration schema out of sync"
    return ScenarioConfig(**flat)
