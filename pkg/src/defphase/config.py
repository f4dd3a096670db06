"""Run-configuration ingestion: schema validation and object builders.

One JSON document describes one run.  Unknown keys are hard errors
(silent typos in physics parameters are the main failure mode this guards
against), and every error carries the config path it refers to.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import constants as const
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
    RotInvEffective,
    antisym3,
    kempf_family,
)
from .dynamics import AdaptiveRK45, FixedRK4
from .errors import ConfigError
from .functions import get_deformation, get_deformation_3d
from .wep import (
    CanonicalScaling,
    GupScaling,
    LieGeneralScaling,
    LieScaling,
    PointSourceScenario,
    RotInvScaling,
    UniformFallScenario,
)

ALGEBRA_FAMILIES = [
    "ordinary",
    "gup_1d",
    "gup_3d",
    "snyder_kempf",
    "canonical_nc_2d",
    "canonical_nc_3d",
    "rotinv_effective",
    "lie_time_commuting",
    "lie_general",
    "lie_miao_1",
    "lie_miao_2",
]

SCENARIOS = [
    "uniform_fall",
    "point_orbit",
    "wep_sweep",
    "gup_eotvos",
    "sem_eotvos",
    "llr_bounds",
    "composite_kinetic",
    "soccer_ball",
    "jacobi_suite",
]

_SCALAR = (int, float)

# Allowed keys, per block.  A value of dict means "nested block"; a tuple
# lists the accepted leaf types.
_ALGEBRA_KEYS = {
    "family": (str,),
    "params": dict,
    "deformation": (str,),
    "deformation_coeffs": list,
    "three_d_form": (str,),
    "three_d_base": (str,),
    "dim": _SCALAR,
    "beta_prime": _SCALAR,
}

_SCHEMA = {
    "scenario": (str,),
    "seed": _SCALAR,
    "constants": dict,
    "unit_scales": {"length": _SCALAR, "time": _SCALAR, "mass": _SCALAR},
    "output": {"prefix": (str,)},
    "gate": list,
    "algebra": _ALGEBRA_KEYS,
    "scaling": dict,
    "masses": list,
    "mass": _SCALAR,
    "initial": {"x": list, "v": list},
    "field": {"kind": (str,), "g": _SCALAR, "axis": _SCALAR, "sign": _SCALAR, "GM": _SCALAR},
    "t_end": _SCALAR,
    "integrator": {
        "method": (str,),
        "dt": _SCALAR,
        "rtol": _SCALAR,
        "atol": _SCALAR,
        "dt_max": _SCALAR,
    },
    "eotvos": {
        "m1": _SCALAR,
        "m2": _SCALAR,
        "v": _SCALAR,
        "deformation": (str,),
        "planck_length_beta": (bool,),
        "beta": _SCALAR,
        "scaling_gamma": _SCALAR,
    },
    "sem": {
        "alpha_e": _SCALAR,
        "alpha_m": _SCALAR,
        "gamma_e": _SCALAR,
        "gamma_m": _SCALAR,
        "theta_e": _SCALAR,
        "eta_e": _SCALAR,
        "theta_m": _SCALAR,
        "eta_m": _SCALAR,
    },
    "bounds": {"accuracy": _SCALAR},
    "composite": {
        "masses": list,
        "theta": _SCALAR,
        "eta": _SCALAR,
        "gamma": _SCALAR,
        "alpha": _SCALAR,
        "scaled": (bool,),
        "g": _SCALAR,
        "v01": _SCALAR,
        "v02": _SCALAR,
        "t": _SCALAR,
    },
    "soccer": {
        "deformation": (str,),
        "n_values": list,
        "m_a": _SCALAR,
        "v": _SCALAR,
        "mode": (str,),
        "beta": _SCALAR,
        "gamma": _SCALAR,
    },
    "jacobi": {"samples": _SCALAR, "box": _SCALAR, "families": list, "corrupt_seed": _SCALAR},
}


def _check_keys(block: dict, schema: dict, path: str) -> None:
    for key, val in block.items():
        if key not in schema:
            raise ConfigError(f"{path}.{key}", "unknown key")
        rule = schema[key]
        if isinstance(rule, dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{path}.{key}", "expected an object")
            _check_keys(val, rule, f"{path}.{key}")
        elif rule is dict:
            if not isinstance(val, dict):
                raise ConfigError(f"{path}.{key}", "expected an object")
        elif rule is list:
            if not isinstance(val, list):
                raise ConfigError(f"{path}.{key}", "expected a list")
        else:
            if not isinstance(val, rule) or isinstance(val, bool) and bool not in rule:
                raise ConfigError(f"{path}.{key}", f"expected one of {rule}")


def load_config(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(str(path), "config file not found")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    if not isinstance(cfg, dict):
        raise ConfigError("$", "top level must be an object")
    _check_keys(cfg, _SCHEMA, "$")
    scenario = cfg.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError("$.scenario", f"must be one of {SCENARIOS}")
    for name in cfg.get("constants", {}):
        if name not in const.DEFAULTS:
            raise ConfigError(f"$.constants.{name}", "unknown constant")


def resolved_constants(cfg: dict) -> dict:
    out = dict(const.DEFAULTS)
    out.update(cfg.get("constants", {}))
    return out


def unit_scales(cfg: dict) -> tuple[float, float, float]:
    s = cfg.get("unit_scales", {})
    return float(s.get("length", 1.0)), float(s.get("time", 1.0)), float(s.get("mass", 1.0))


def algebra_from_config(block: dict):
    """Build an AlgebraSpec from its config block."""
    _check_keys(block, _ALGEBRA_KEYS, "$.algebra")
    family = block.get("family")
    params = dict(block.get("params", {}))
    if family == "ordinary":
        return Ordinary(dim=int(block.get("dim", 3)))
    if family == "gup_1d":
        func = get_deformation(
            block.get("deformation", "kempf_quadratic"), block.get("deformation_coeffs")
        )
        return Gup1D(func=func, beta=float(params.get("beta", 0.0)))
    if family == "gup_3d":
        fij = get_deformation_3d(
            block.get("three_d_form", "isotropic_sqrt"), block.get("three_d_base")
        )
        return Gup3D(func3=fij, beta=float(params.get("beta", 0.0)),
                     name=block.get("three_d_form", "isotropic_sqrt"))
    if family == "snyder_kempf":
        return kempf_family(
            beta=float(params.get("beta", 0.0)),
            beta_prime=float(block.get("beta_prime", params.get("beta_prime", 0.0))),
        )
    if family == "canonical_nc_2d":
        return CanonicalNC2D(theta=float(params.get("theta", 0.0)), eta=float(params.get("eta", 0.0)))
    if family == "canonical_nc_3d":
        th = params.get("theta", [0.0, 0.0, 0.0])
        et = params.get("eta", [0.0, 0.0, 0.0])
        theta = antisym3(*th) if np.shape(th) == (3,) else np.asarray(th, dtype=float)
        eta = antisym3(*et) if np.shape(et) == (3,) else np.asarray(et, dtype=float)
        return CanonicalNC3D(theta=theta, eta=eta)
    if family == "rotinv_effective":
        return RotInvEffective(
            theta2_mean=float(params.get("theta2_mean", 0.0)),
            eta2_mean=float(params.get("eta2_mean", 0.0)),
        )
    if family == "lie_time_commuting":
        return LieTimeCommuting(
            kappa=float(params.get("kappa", 1.0)),
            rho=int(params.get("rho", 1)),
            tau=int(params.get("tau", 2)),
        )
    if family == "lie_general":
        return LieGeneral(
            theta0=np.asarray(params.get("theta0", np.zeros((3, 3))), dtype=float),
            theta_x=np.asarray(params.get("theta_x", np.zeros((3, 3, 3))), dtype=float),
            theta_bar=np.asarray(params.get("theta_bar", np.zeros((3, 3, 3))), dtype=float),
            theta_tilde=np.asarray(params.get("theta_tilde", np.zeros((3, 3, 3))), dtype=float),
        )
    if family == "lie_miao_1":
        return LieMiaoVariant1(
            kappa=float(params.get("kappa", 1.0)),
            kappa_tilde=float(params.get("kappa_tilde", 1.0)),
            axes=tuple(params.get("axes", (1, 2, 3))),
        )
    if family == "lie_miao_2":
        return LieMiaoVariant2(
            kappa=float(params.get("kappa", 1.0)),
            kappa_tilde=float(params.get("kappa_tilde", 1.0)),
            kappa_bar=float(params.get("kappa_bar", 1.0)),
            axes=tuple(params.get("axes", (1, 2, 3))),
        )
    raise ConfigError("$.algebra.family", f"must be one of {ALGEBRA_FAMILIES}")


def scaling_from_config(block: dict | None):
    if not block:
        return None
    rule = block.get("rule")
    if rule == "gup":
        return GupScaling(gamma=float(block["gamma"]))
    if rule == "canonical":
        return CanonicalScaling(gamma=float(block["gamma"]), alpha=float(block["alpha"]))
    if rule == "rotinv":
        return RotInvScaling(A=float(block.get("A", 0.0)), B=float(block.get("B", 0.0)))
    if rule == "lie":
        return LieScaling(gamma_kappa=float(block["gamma_kappa"]))
    if rule == "lie_general":
        return LieGeneralScaling(
            gamma0=np.asarray(block["gamma0"], dtype=float),
            gamma_x=np.asarray(block["gamma_x"], dtype=float),
            gamma_tilde=np.asarray(block["gamma_tilde"], dtype=float),
            theta_bar=np.asarray(block["theta_bar"], dtype=float),
        )
    raise ConfigError("$.scaling.rule", "must be gup | canonical | rotinv | lie | lie_general")


def policy_from_config(block: dict | None):
    if not block:
        return FixedRK4(dt=1e-3)
    method = block.get("method", "rk4")
    if method == "rk4":
        return FixedRK4(dt=float(block.get("dt", 1e-3)))
    if method == "rk45":
        return AdaptiveRK45(
            rtol=float(block.get("rtol", 1e-9)),
            atol=float(block.get("atol", 1e-12)),
            dt_max=float(block.get("dt_max", np.inf)),
        )
    raise ConfigError("$.integrator.method", "must be rk4 or rk45")


def scenario_from_config(cfg: dict):
    field = cfg.get("field", {})
    kind = field.get("kind", "uniform")
    x0 = tuple(cfg.get("initial", {}).get("x", (0.0,)))
    v0 = tuple(cfg.get("initial", {}).get("v", (0.0,)))
    t_end = float(cfg.get("t_end", 1.0))
    L, T, M = unit_scales(cfg)
    x0 = tuple(L * v for v in x0)
    v0 = tuple(L / T * v for v in v0)
    t_end *= T
    if kind == "uniform":
        return UniformFallScenario(
            g=float(field.get("g", 9.8)) * L / T**2,
            t_end=t_end,
            x0=x0,
            v0=v0,
            axis=int(field.get("axis", 1)),
            sign=float(field.get("sign", -1.0)),
        )
    if kind == "point":
        return PointSourceScenario(
            GM=float(field["GM"]) * L**3 / T**2, t_end=t_end, x0=x0, v0=v0
        )
    raise ConfigError("$.field.kind", "must be uniform or point")
