"""Command-line harness.

Subcommands: simulate, wep-sweep, eotvos, composite, jacobi, bounds.
Each takes --config PATH and --out DIR, writes delimited output plus a JSON
report, a manifest, and rendered figures (suppress with --no-plots).
Exit codes: 0 success, 2 config error, 3 numerical failure, 4 gate failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import plots, reports
from .algebra import (
    CanonicalNC2D,
    CanonicalNC3D,
    Gup1D,
    Gup3D,
    LieGeneral,
    LieMiaoVariant1,
    LieMiaoVariant2,
    LieTimeCommuting,
    Ordinary,
    PhasePoint,
    antisym3,
    jacobi_max_residual,
    kempf_family,
)
from .closedforms import gup_eotvos_planck
from .composite import CompositeSystem, Particle, kinetic_energy_report, soccer_ball_scaling
from .config import (
    ALGEBRA_FAMILIES,
    algebra_from_config,
    load_config,
    policy_from_config,
    resolved_constants,
    scaling_from_config,
    scenario_from_config,
)
from .dynamics import integrate, velocity_to_momentum
from .errors import ConfigError, DefphaseError
from .functions import REGISTRY, get_deformation, list_deformations, list_deformations_3d
from .sem import SunEarthMoonParams, parameter_bounds_from_llr, sem_eotvos
from .wep import build_hamiltonian, eotvos_from_accelerations, wep_divergence

GATE_OPS = {"le": lambda a, b: a <= b, "ge": lambda a, b: a >= b, "lt": lambda a, b: a < b,
            "gt": lambda a, b: a > b}


def _check_gates(cfg: dict, result: dict) -> list[str]:
    failures = []
    for rule in cfg.get("gate", []):
        field, op, value = rule.get("field"), rule.get("op"), rule.get("value")
        if field not in result:
            failures.append(f"gate field {field!r} not in result")
            continue
        if op not in GATE_OPS:
            failures.append(f"gate op {op!r} unknown")
            continue
        if not GATE_OPS[op](abs(result[field]) if rule.get("abs") else result[field], value):
            failures.append(f"gate failed: {field} {op} {value} (got {result[field]:.6g})")
    return failures


def _emit(out_dir: Path, prefix: str, cfg: dict, result: dict, tables: dict, figures: list):
    """Write the JSON report, CSV tables, figures list, and the manifest."""
    outputs = []
    report_path = out_dir / f"{prefix}.json"
    reports.write_json(report_path, result)
    outputs.append(report_path)
    for name, (header, rows) in tables.items():
        p = reports.write_csv(out_dir / f"{prefix}_{name}.csv", header, rows)
        outputs.append(p)
    outputs.extend(figures)
    manifest = reports.build_manifest(cfg, resolved_constants(cfg), outputs)
    reports.write_json(out_dir / f"{prefix}_manifest.json", manifest)


def cmd_simulate(cfg: dict, out_dir: Path, fmt: str, do_plots: bool) -> dict:
    alg = algebra_from_config(cfg.get("algebra", {"family": "ordinary", "dim": 1}))
    scenario = scenario_from_config(cfg)
    policy = policy_from_config(cfg.get("integrator"))
    m = float(cfg.get("mass", 1.0))
    ham = build_hamiltonian(alg, scenario, m)
    x0 = np.array(scenario.x0, dtype=float)
    v0 = np.array(scenario.v0, dtype=float)
    p0 = velocity_to_momentum(alg, ham, x0, v0)
    traj = integrate(alg, ham, PhasePoint(x0, p0), scenario.t_end, policy)

    prefix = cfg.get("output", {}).get("prefix", "simulate")
    figures = []
    header, rows = traj.csv_rows()
    if fmt == "csv":
        traj.to_csv(out_dir / f"{prefix}_trajectory.csv")
    else:
        traj.to_json(out_dir / f"{prefix}_trajectory.json")
    if do_plots:
        figures.append(plots.render_trajectory(traj, out_dir / f"{prefix}_trajectory.png"))
    result = {
        "scenario": cfg["scenario"],
        "samples": len(traj),
        "final_x": traj.x[-1].tolist(),
        "final_p": traj.p[-1].tolist(),
        "energy_drift_rel": traj.metadata["energy_drift_rel"],
        "metadata": traj.metadata,
    }
    _emit(out_dir, prefix, cfg, result, {}, figures)
    return result


def cmd_wep_sweep(cfg: dict, out_dir: Path, fmt: str, do_plots: bool) -> dict:
    family = algebra_from_config(cfg["algebra"])
    scenario = scenario_from_config(cfg)
    rule = scaling_from_config(cfg.get("scaling"))
    masses = [float(m) for m in cfg.get("masses", [1.0, 10.0])]
    policy = policy_from_config(cfg.get("integrator"))
    fixed = None if rule is not None else dict(cfg["algebra"].get("params", {}))
    sweep = wep_divergence(
        family, scenario, masses, rule=rule, fixed_params=fixed, policy=policy,
        keep_trajectories=True,
    )
    prefix = cfg.get("output", {}).get("prefix", "wep_sweep")
    figures = []
    tables = {
        "summary": (
            ["mass", "final_x1", "max_displacement"],
            [
                [m, float(tr.x[-1, 0]), float(np.max(np.linalg.norm(tr.x - tr.x[0], axis=1)))]
                for m, tr in zip(masses, sweep.trajectories)
            ],
        )
    }
    if do_plots:
        figures.append(
            plots.render_mass_sweep(
                masses, sweep.trajectories, sweep.divergence, out_dir / f"{prefix}.png"
            )
        )
    result = {
        "scenario": cfg["scenario"],
        "scaled": rule is not None,
        **sweep.to_dict(),
    }
    _emit(out_dir, prefix, cfg, result, tables, figures)
    return result


def cmd_eotvos(cfg: dict, out_dir: Path, fmt: str, do_plots: bool) -> dict:
    consts = resolved_constants(cfg)
    prefix = cfg.get("output", {}).get("prefix", "eotvos")
    if cfg["scenario"] == "sem_eotvos":
        block = cfg.get("sem", {})
        if {"alpha_e", "alpha_m", "gamma_e", "gamma_m"} & set(block):
            p = SunEarthMoonParams.from_scaling_constants(
                alpha_e=float(block.get("alpha_e", 0.0)),
                alpha_m=float(block.get("alpha_m", 0.0)),
                gamma_e=float(block.get("gamma_e", 0.0)),
                gamma_m=float(block.get("gamma_m", 0.0)),
                m_s=consts["m_sun"], m_e=consts["m_earth"], m_m=consts["m_moon"],
                R=consts["au"], R_em=consts["r_earth_moon"],
                v_e=consts["v_earth"], v_m=consts["v_moon"], G=consts["G"],
            )
        else:
            p = SunEarthMoonParams(
                m_s=consts["m_sun"], m_e=consts["m_earth"], m_m=consts["m_moon"],
                R=consts["au"], R_em=consts["r_earth_moon"],
                v_e=consts["v_earth"], v_m=consts["v_moon"], G=consts["G"],
                theta_e=float(block.get("theta_e", 0.0)),
                eta_e=float(block.get("eta_e", 0.0)),
                theta_m=float(block.get("theta_m", 0.0)),
                eta_m=float(block.get("eta_m", 0.0)),
            )
        report = sem_eotvos(p)
    else:
        block = cfg.get("eotvos", {})
        func = get_deformation(block.get("deformation", "kempf_quadratic"))
        m1, m2 = float(block["m1"]), float(block["m2"])
        v = float(block["v"])
        c, m_p = consts["c"], consts["m_planck"]
        if "scaling_gamma" in block:
            # per-body parameters from the mass-scaling rule
            from .closedforms import gup_acceleration_first_order

            gamma = float(block["scaling_gamma"])
            g = consts["g_standard"]
            a1 = gup_acceleration_first_order(func.fp0, func.fpp0, (gamma / m1) ** 2, m1, v, g)
            a2 = gup_acceleration_first_order(func.fp0, func.fpp0, (gamma / m2) ** 2, m2, v, g)
            report = eotvos_from_accelerations(a1, a2, mechanism="gup_scaled")
        else:
            delta = gup_eotvos_planck(func.fp0, func.fpp0, m1, m2, v, c, m_p)
            g = consts["g_standard"]
            report = eotvos_from_accelerations(
                g * (1.0 + delta / 2.0), g * (1.0 - delta / 2.0), mechanism="gup_planck"
            )
    result = report.to_dict()
    tables = {
        "summary": (
            ["delta_a_over_a", "a1", "a2"],
            [[report.delta_a_over_a, report.a1, report.a2]],
        )
    }
    figures = []
    if do_plots:
        comps = dict(report.components) or {"delta_a_over_a": report.delta_a_over_a}
        figures.append(plots.render_components(comps, out_dir / f"{prefix}.png", "acceleration asymmetry"))
    _emit(out_dir, prefix, cfg, result, tables, figures)
    return result


def cmd_bounds(cfg: dict, out_dir: Path, fmt: str, do_plots: bool) -> dict:
    consts = resolved_constants(cfg)
    accuracy = float(cfg.get("bounds", {}).get("accuracy", 1e-13))
    p = SunEarthMoonParams(
        m_s=consts["m_sun"], m_e=consts["m_earth"], m_m=consts["m_moon"],
        R=consts["au"], R_em=consts["r_earth_moon"],
        v_e=consts["v_earth"], v_m=consts["v_moon"], G=consts["G"],
    )
    bounds = parameter_bounds_from_llr(accuracy, p)
    result = {"accuracy": accuracy, **bounds,
              "assumed": {"R": p.R, "v_e": p.v_e, "Gm_s": p.G * p.m_s}}
    prefix = cfg.get("output", {}).get("prefix", "bounds")
    tables = {"summary": (["accuracy", "bound_alpha_diff", "bound_gamma_diff"],
                          [[accuracy, bounds["bound_alpha_diff"], bounds["bound_gamma_diff"]]])}
    figures = []
    if do_plots:
        figures.append(plots.render_components(bounds, out_dir / f"{prefix}.png", "ranging bounds"))
    _emit(out_dir, prefix, cfg, result, tables, figures)
    return result


def cmd_composite(cfg: dict, out_dir: Path, fmt: str, do_plots: bool) -> dict:
    prefix = cfg.get("output", {}).get("prefix", "composite")
    figures = []
    tables = {}
    if cfg["scenario"] == "composite_kinetic":
        block = cfg.get("composite", {})
        masses = [float(m) for m in block.get("masses", [1.0, 1.0])]
        if block.get("scaled", False):
            gamma, alpha = float(block["gamma"]), float(block["alpha"])
            particles = [Particle(m, {"theta": gamma / m, "eta": alpha * m}) for m in masses]
        else:
            theta, eta = float(block["theta"]), float(block["eta"])
            particles = [Particle(m, {"theta": theta, "eta": eta}) for m in masses]
        sys_ = CompositeSystem(tuple(particles))
        rep = kinetic_energy_report(
            sys_, float(block.get("g", 9.8)), float(block.get("v01", 0.0)),
            float(block.get("v02", 0.0)), float(block.get("t", 1.0)),
        )
        result = {
            "whole": rep.whole,
            "sum_of_parts": rep.sum_of_parts,
            "mismatch": rep.mismatch,
            "scaled": bool(block.get("scaled", False)),
        }
        tables["kinetic"] = (["whole", "sum_of_parts", "mismatch"],
                             [[rep.whole, rep.sum_of_parts, rep.mismatch]])
        if do_plots:
            figures.append(plots.render_components(
                {"whole": rep.whole, "parts": rep.sum_of_parts, "mismatch": rep.mismatch},
                out_dir / f"{prefix}.png", "kinetic-energy additivity"))
    else:
        block = cfg.get("soccer", {})
        func = get_deformation(block.get("deformation", "won18"))
        fit = soccer_ball_scaling(
            func,
            [int(n) for n in block.get("n_values", [2, 4, 8, 16, 32])],
            float(block.get("m_a", 1.0)),
            float(block.get("v", 1.0)),
            block.get("mode", "fixed_beta"),
            beta=float(block["beta"]) if "beta" in block else None,
            gamma=float(block["gamma"]) if "gamma" in block else None,
        )
        result = {
            "mode": fit.mode,
            "first_slope": fit.first_slope,
            "second_slope": fit.second_slope,
            "first_degenerate": fit.first_degenerate,
        }
        tables["terms"] = (
            ["N", "first_order", "second_order"],
            [[r["N"], r["first_order"], r["second_order"]] for r in fit.rows()],
        )
        if do_plots:
            figures.append(plots.render_loglog_fit(
                fit.n_values, fit.first_terms, fit.second_terms, out_dir / f"{prefix}.png"))
    _emit(out_dir, prefix, cfg, result, tables, figures)
    return result


def _jacobi_specs(seed: int) -> dict:
    rng = np.random.default_rng(seed)

    def rand_anti(shape):
        m = rng.uniform(-0.5, 0.5, shape)
        return m - np.transpose(m, (1, 0) if len(shape) == 2 else (0, 2, 1))

    return {
        "ordinary": Ordinary(3),
        "gup_1d": Gup1D(REGISTRY["kempf_quadratic"], beta=0.05),
        "gup_3d": Gup3D(__import__("defphase.functions", fromlist=["isotropic_sqrt"]).isotropic_sqrt, beta=0.05),
        "canonical_nc_2d": CanonicalNC2D(theta=0.3, eta=0.2),
        "canonical_nc_3d": CanonicalNC3D(
            theta=antisym3(0.3, -0.1, 0.2), eta=antisym3(0.1, 0.25, -0.15)
        ),
        "lie_time_commuting": LieTimeCommuting(kappa=0.7),
        "lie_miao_1": LieMiaoVariant1(kappa=1.3, kappa_tilde=0.9),
        "lie_miao_2": LieMiaoVariant2(kappa=1.3, kappa_tilde=0.9, kappa_bar=1.1),
        "snyder_kempf": kempf_family(beta=0.05, beta_prime=0.03),
        "corrupted_lie_general": LieGeneral(
            theta0=rand_anti((3, 3)),
            theta_x=rand_anti((3, 3, 3)),
            theta_bar=rng.uniform(-0.5, 0.5, (3, 3, 3)),
            theta_tilde=rng.uniform(-0.5, 0.5, (3, 3, 3)),
        ),
    }


def cmd_jacobi(cfg: dict, out_dir: Path, fmt: str, do_plots: bool) -> dict:
    block = cfg.get("jacobi", {})
    n = int(block.get("samples", 100))
    box = float(block.get("box", 1.0))
    seed = int(cfg.get("seed", 0))
    specs = _jacobi_specs(int(block.get("corrupt_seed", 7)))
    wanted = block.get("families") or list(specs)
    residuals = {}
    for name in wanted:
        if name not in specs:
            raise ConfigError("$.jacobi.families", f"unknown family {name!r}")
        residuals[name] = jacobi_max_residual(specs[name], n_samples=n, box=box, seed=seed)
    tol = 1e-8
    result = {
        "tolerance": tol,
        "residuals": residuals,
        "passes": {k: bool(v <= tol) for k, v in residuals.items() if k != "corrupted_lie_general"},
        "corrupted_flagged": bool(residuals.get("corrupted_lie_general", 1.0) > 1e-4),
    }
    prefix = cfg.get("output", {}).get("prefix", "jacobi")
    tables = {"residuals": (["family", "max_residual"],
                            [[k, v] for k, v in sorted(residuals.items())])}
    figures = []
    if do_plots:
        names = sorted(residuals)
        figures.append(plots.render_residuals(
            names, [residuals[k] for k in names], tol, out_dir / f"{prefix}.png"))
    _emit(out_dir, prefix, cfg, result, tables, figures)
    return result


COMMANDS = {
    "simulate": (cmd_simulate, ("uniform_fall", "point_orbit")),
    "wep-sweep": (cmd_wep_sweep, ("wep_sweep",)),
    "eotvos": (cmd_eotvos, ("gup_eotvos", "sem_eotvos")),
    "composite": (cmd_composite, ("composite_kinetic", "soccer_ball")),
    "jacobi": (cmd_jacobi, ("jacobi_suite",)),
    "bounds": (cmd_bounds, ("llr_bounds",)),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="defphase",
        description="Deformed phase-space dynamics and equivalence-principle diagnostics",
    )
    parser.add_argument("--list-algebras", action="store_true",
                        help="print the algebra families and exit")
    parser.add_argument("--list-deformation-functions", action="store_true",
                        help="print the deformation-function registries and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=".")
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        sp.add_argument("--gate", action="store_true",
                        help="exit 4 when any configured gate fails")
        sp.add_argument("--no-plots", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_algebras:
        for fam in ALGEBRA_FAMILIES:
            print(fam)
        return 0
    if args.list_deformation_functions:
        for name in list_deformations():
            print(f"1d: {name}")
        for name in list_deformations_3d():
            print(f"3d: {name}")
        return 0
    if not args.command:
        parser.print_help()
        return 2

    runner, scenarios = COMMANDS[args.command]
    try:
        cfg = load_config(args.config)
        if cfg["scenario"] not in scenarios:
            raise ConfigError("$.scenario", f"{args.command} accepts {list(scenarios)}")
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        result = runner(cfg, out_dir, args.format, not args.no_plots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DefphaseError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.gate:
        failures = _check_gates(cfg, result)
        if failures:
            for f in failures:
                print(f, file=sys.stderr)
            return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
