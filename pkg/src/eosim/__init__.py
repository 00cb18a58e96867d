"""Quantum statistics of electro-optic sampling in a three-level medium.

The package models a femtosecond probe reading out THz-band field
fluctuations through the second-order response of a three-level medium.  It
separates the detected variance into the classical sampling term and the
quantum-susceptibility and cascading corrections, and turns those moments
into distributions, quadrature contours and field reconstructions.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    ParseError,
    QuadratureError,
    ReconstructionError,
    ValidationError,
    ValidityWarning,
)
from .medium import (
    MINUS,
    MODE_NORMALIZED,
    MODE_SI,
    PLUS,
    LevelScheme,
    PhysicalConstants,
    SuperopIndex,
    chi2,
    chi2_classical,
    propagator,
    susceptibility_prefactor,
    term_sums,
)
from .probe import (
    SHAPE_GAUSSIAN,
    SHAPE_RECTANGULAR,
    EllipsometryState,
    ProbeSpectrum,
    balanced_waveplate_angle,
    envelope,
    mean_detected_frequency,
    overlap_f,
    phase_factor,
    photon_number,
    quadrature_phase,
    with_photon_number,
)
from .quadrature import IntegrationResult, IntegrationSpec, integrate
from .windows import (
    Context,
    DetectionWindowTable,
    PartsTable,
    WindowParts,
    default_omega_grid,
    eval_window_parts,
    tabulate_window_parts,
    tabulate_windows,
    window_cascading,
    window_classical,
    window_quantum,
)
from .moments import (
    MomentBreakdown,
    ThzState,
    check_interpolation,
    gamma_i,
    gamma_ii,
    gamma_iii,
    gamma_parts,
    gamma_spectral_cut,
    gamma_total,
    mean_signal,
    normalized_scale,
    occupancy,
    spectral_cut_bounds,
    sweep_theta,
)
from .statistics import (
    ContourCurve,
    DistributionCurve,
    ReconstructionResult,
    distribution,
    field_normalization_scale,
    hermite_series,
    reconstruct_thz,
    variance_contour,
)
from .config import ScenarioConfig, load_config, preset_names, thz_to_angular

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "ParseError",
    "QuadratureError",
    "ReconstructionError",
    "ValidationError",
    "ValidityWarning",
    "MINUS",
    "PLUS",
    "MODE_NORMALIZED",
    "MODE_SI",
    "LevelScheme",
    "PhysicalConstants",
    "SuperopIndex",
    "chi2",
    "chi2_classical",
    "propagator",
    "susceptibility_prefactor",
    "term_sums",
    "SHAPE_GAUSSIAN",
    "SHAPE_RECTANGULAR",
    "EllipsometryState",
    "ProbeSpectrum",
    "balanced_waveplate_angle",
    "envelope",
    "mean_detected_frequency",
    "overlap_f",
    "phase_factor",
    "photon_number",
    "quadrature_phase",
    "with_photon_number",
    "IntegrationResult",
    "IntegrationSpec",
    "integrate",
    "Context",
    "DetectionWindowTable",
    "PartsTable",
    "WindowParts",
    "default_omega_grid",
    "eval_window_parts",
    "tabulate_window_parts",
    "tabulate_windows",
    "window_cascading",
    "window_classical",
    "window_quantum",
    "MomentBreakdown",
    "ThzState",
    "check_interpolation",
    "gamma_i",
    "gamma_ii",
    "gamma_iii",
    "gamma_parts",
    "gamma_spectral_cut",
    "gamma_total",
    "mean_signal",
    "normalized_scale",
    "occupancy",
    "spectral_cut_bounds",
    "sweep_theta",
    "DistributionCurve",
    "ContourCurve",
    "ReconstructionResult",
    "distribution",
    "field_normalization_scale",
    "hermite_series",
    "reconstruct_thz",
    "variance_contour",
    "ScenarioConfig",
    "load_config",
    "preset_names",
    "thz_to_angular",
    "__version__",
]
