"""Command-line interface producing deterministic CSV data sets.

Every subcommand loads one scenario (from ``--config`` or ``--preset``),
computes one figure-ready data set and writes it as CSV with 17 significant
digits, a configuration fingerprint in the header and LF line endings, so
repeated runs are byte-identical.

Exit codes: 0 success, 2 configuration or validation problems, 3 quadrature
convergence failures, 4 refused THz-field reconstructions.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import ScenarioConfig, angular_to_thz, load_config, preset_names
from .errors import (
    DomainError,
    ParseError,
    QuadratureError,
    ReconstructionError,
    ValidationError,
)
from .medium import MINUS, PLUS, MODE_NORMALIZED, chi2
from .moments import (
    MomentBreakdown,
    ThzState,
    gamma_parts,
    gamma_spectral_cut,
    normalized_scale,
    spectral_cut_bounds,
    sweep_theta,
)
from .statistics import distribution, reconstruct_thz, variance_contour
from .windows import Context, default_omega_grid, tabulate_windows

__all__ = ["main"]

_WINDOW_TABLE_THETA = 0.75 * np.pi


def _parallel_map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _write_csv(
    out_path: Path,
    command: str,
    cfg: ScenarioConfig,
    rel_tol: float,
    columns: Sequence[str],
    rows: Iterable[Sequence[float]],
    extra_header: Sequence[str] = (),
) -> None:
    lines = [
        f"# eosim {command}",
        f"# scenario {cfg.name}",
        f"# config-sha256 {cfg.config_hash}",
        f"# quadrature rel_tol={rel_tol:g} abs_tol={cfg.quadrature_abs:g}",
    ]
    lines.extend(f"# {item}" for item in extra_header)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join("%.17g" % float(v) for v in row))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


def _scenario_scale(cfg: ScenarioConfig, ctx: Context, state: ThzState) -> float:
    """Variance rescaling for normalized-coupling scenarios (1 in SI mode)."""
    if cfg.kind != MODE_NORMALIZED:
        return 1.0
    return normalized_scale(
        ctx, state, target=cfg.max_correction_ratio, thetas=cfg.theta_grid()
    )


def _cmd_sweep_theta(cfg: ScenarioConfig, ctx: Context, args) -> None:
    state = cfg.thz_state()
    scale = _scenario_scale(cfg, ctx, state)
    table = ctx.parts_table()
    thetas = cfg.theta_grid()

    def one(theta: float) -> MomentBreakdown:
        return gamma_parts(ctx, theta, state, table=table, scale=scale)

    rows = []
    for b in _parallel_map(one, list(thetas), args.threads):
        rows.append(
            (b.theta, b.gamma_i, b.gamma_ii, b.gamma_iii, b.gamma_total, b.ratio_quantum)
        )
    _write_csv(
        args.out,
        "sweep-theta",
        cfg,
        ctx.rel_tol,
        ("theta_rad", "gammaI", "gammaII", "gammaIII", "gamma_total", "ratio_II"),
        rows,
        extra_header=(f"state {state.kind.value}", f"scale %.17g" % scale),
    )


def _cmd_spectral_filter(cfg: ScenarioConfig, ctx: Context, args) -> None:
    state = cfg.thz_state()
    scale = _scenario_scale(cfg, ctx, state)
    lo, hi = spectral_cut_bounds(ctx)
    centers = np.linspace(lo, hi, cfg.omega_tilde_points)

    def one(omega_tilde: float) -> MomentBreakdown:
        return gamma_spectral_cut(ctx, omega_tilde, state, scale=scale)

    rows = []
    for center, b in zip(centers, _parallel_map(one, list(centers), args.threads)):
        rows.append((angular_to_thz(center), b.gamma_i, b.gamma_total))
    _write_csv(
        args.out,
        "spectral-filter",
        cfg,
        ctx.rel_tol,
        ("omega_tilde_THz", "gamma_classical", "gamma_full"),
        rows,
        extra_header=(f"state {state.kind.value}", f"scale %.17g" % scale),
    )


def _cmd_distribution(cfg: ScenarioConfig, ctx: Context, args) -> None:
    state = cfg.thz_state()
    scale = _scenario_scale(cfg, ctx, state)
    theta = cfg.distribution_theta_pi * np.pi
    breakdown = gamma_parts(ctx, theta, state, scale=scale)
    curve = distribution(
        breakdown,
        n_points=cfg.distribution_points,
        span_sigmas=cfg.distribution_span_sigmas,
    )
    rows = list(zip(curve.s_grid, curve.density))
    _write_csv(
        args.out,
        "distribution",
        cfg,
        ctx.rel_tol,
        ("S", "density"),
        rows,
        extra_header=(
            f"theta_rad %.17g" % theta,
            f"shot_noise %.17g" % curve.shot_noise,
            f"gamma %.17g" % curve.gamma,
        ),
    )


def _cmd_contour(cfg: ScenarioConfig, ctx: Context, args) -> None:
    state = cfg.thz_state()
    scale = _scenario_scale(cfg, ctx, state)
    table = ctx.parts_table()
    thetas = np.pi * np.linspace(0.5, 1.5, cfg.contour_theta_points)

    def one(theta: float) -> MomentBreakdown:
        return gamma_parts(ctx, theta, state, table=table, scale=scale)

    contour = variance_contour(_parallel_map(one, list(thetas), args.threads))
    rows = list(
        zip(contour.phi, contour.radius_full, contour.radius_classical, contour.radius_shot)
    )
    _write_csv(
        args.out,
        "contour",
        cfg,
        ctx.rel_tol,
        ("phi_rad", "radius_full", "radius_classical", "radius_shot"),
        rows,
        extra_header=(f"state {state.kind.value}", f"scale %.17g" % scale),
    )


def _cmd_reconstruct(cfg: ScenarioConfig, ctx: Context, args) -> None:
    state = cfg.thz_state()
    scale = _scenario_scale(cfg, ctx, state)
    theta = cfg.reconstruct_theta_pi * np.pi
    breakdown = gamma_parts(ctx, theta, state, scale=scale)
    result = reconstruct_thz(
        ctx,
        breakdown,
        guard=cfg.reconstruction_guard,
        n_points=cfg.distribution_points,
        span_sigmas=cfg.distribution_span_sigmas,
    )
    rows = list(zip(result.field_grid, result.density))
    _write_csv(
        args.out,
        "reconstruct",
        cfg,
        ctx.rel_tol,
        ("E_over_Enorm", "density"),
        rows,
        extra_header=(
            f"theta_rad %.17g" % theta,
            f"variance_signal_units %.17g" % result.variance_signal_units,
            f"field_variance %.17g" % result.field_variance,
            f"e_norm %.17g" % result.e_norm,
        ),
    )


def _cmd_chi2_table(cfg: ScenarioConfig, ctx: Context, args) -> None:
    grid = default_omega_grid(ctx.scheme, ctx.probe, ctx.omega_points)
    omega_c = ctx.probe.omega_c
    pairs = ((MINUS, MINUS), (PLUS, MINUS), (MINUS, PLUS), (PLUS, PLUS))
    rows = []
    for om in grid:
        row = [angular_to_thz(om)]
        for r, s in pairs:
            value = chi2(ctx.scheme, ctx.consts, r, s, om, omega_c - om)
            row.extend((value.real, value.imag))
        rows.append(row)
    _write_csv(
        args.out,
        "chi2-table",
        cfg,
        ctx.rel_tol,
        (
            "Omega_THz",
            "Re_chi_mm",
            "Im_chi_mm",
            "Re_chi_pm",
            "Im_chi_pm",
            "Re_chi_mp",
            "Im_chi_mp",
            "Re_chi_pp",
            "Im_chi_pp",
        ),
        rows,
        extra_header=("arguments omega2=Omega, omega1=omega_c-Omega",),
    )


def _cmd_windows_table(cfg: ScenarioConfig, ctx: Context, args) -> None:
    table = tabulate_windows(ctx, _WINDOW_TABLE_THETA)
    rows = []
    for i, om in enumerate(table.omega_grid):
        rows.append(
            (
                angular_to_thz(om),
                table.d[i].real,
                table.d[i].imag,
                table.d_q[i].real,
                table.d_q[i].imag,
                table.d_casc[i].real,
                table.d_casc[i].imag,
            )
        )
    _write_csv(
        args.out,
        "windows-table",
        cfg,
        ctx.rel_tol,
        ("Omega_THz", "ReD", "ImD", "ReDq", "ImDq", "ReDcasc", "ImDcasc"),
        rows,
        extra_header=(f"theta_rad %.17g" % table.theta,),
    )


_COMMANDS = {
    "sweep-theta": (_cmd_sweep_theta, "variance corrections over the waveplate phase sweep"),
    "spectral-filter": (_cmd_spectral_filter, "corrections vs center of a quarter-band detection cut"),
    "distribution": (_cmd_distribution, "signal probability density with the leading correction"),
    "contour": (_cmd_contour, "quadrature standard-deviation contour"),
    "reconstruct": (_cmd_reconstruct, "Gaussian THz field reconstruction from the classical term"),
    "chi2-table": (_cmd_chi2_table, "susceptibility components along the THz grid"),
    "windows-table": (_cmd_windows_table, "detection windows along the THz grid"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eosim",
        description="Quantum statistics of electro-optic sampling: figure-ready CSV data sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        cmd = sub.add_parser(name, help=help_text)
        source = cmd.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", type=Path, help="path to a scenario INI file")
        source.add_argument(
            "--preset",
            choices=preset_names(),
            help="packaged scenario preset",
        )
        cmd.add_argument("--out", type=Path, default=None, help="output CSV path")
        cmd.add_argument(
            "--threads", type=int, default=1, help="worker threads for sweep evaluations"
        )
        cmd.add_argument(
            "--tolerance",
            type=float,
            default=None,
            help="override the relative quadrature tolerance",
        )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(path=args.config, preset=args.preset)
        if args.tolerance is not None and not args.tolerance > 0.0:
            raise ValidationError("--tolerance must be positive")
        if args.threads < 1:
            raise ValidationError("--threads must be at least 1")
        ctx = cfg.context(rel_tol=args.tolerance)
        if args.out is None:
            args.out = Path(cfg.dir) / f"{args.command}.csv"
        handler = _COMMANDS[args.command][0]
        handler(cfg, ctx, args)
    except (ValidationError, ParseError, DomainError) as exc:
        print(f"eosim: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"eosim: {exc}", file=sys.stderr)
        return 3
    except ReconstructionError as exc:
        print(f"eosim: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
