"""Registry of momentum deformation functions.

A 1D deformation function F is an even function of one dimensionless
argument with F(0) = 1; the dynamics always evaluate it at
sqrt(beta) * |P|, so entries built from |x| are even by construction.
``fp0`` and ``fpp0`` are the one-sided derivatives at zero used by the
truncated acceleration and kinetic-energy series.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class DeformationFunction:
    name: str
    f: Callable[[np.ndarray], np.ndarray]
    fp0: float
    fpp0: float

    def __call__(self, x):
        return self.f(x)


def _kempf_quadratic(x):
    x = np.asarray(x, dtype=float)
    return 1.0 + x * x


def _pedram(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 - x * x)


def _won18(x):
    a = np.abs(np.asarray(x, dtype=float))
    return (1.0 - a) ** 2


def _won19(x):
    a = np.abs(np.asarray(x, dtype=float))
    return 1.0 / (1.0 - a)


REGISTRY: dict[str, DeformationFunction] = {
    "kempf_quadratic": DeformationFunction("kempf_quadratic", _kempf_quadratic, 0.0, 2.0),
    "pedram": DeformationFunction("pedram", _pedram, 0.0, 2.0),
    "won18": DeformationFunction("won18", _won18, -2.0, 2.0),
    "won19": DeformationFunction("won19", _won19, 1.0, 2.0),
}


def custom_polynomial(coeffs: Sequence[float]) -> DeformationFunction:
    """Polynomial in |x| with coefficient list [c0, c1, c2, ...]; c0 must be 1."""
    c = [float(v) for v in coeffs]
    if not c or c[0] != 1.0:
        raise ConfigError("deformation.coeffs", "leading coefficient must be 1 so F(0) = 1")

    def f(x):
        a = np.abs(np.asarray(x, dtype=float))
        out = np.zeros_like(a)
        for ck in reversed(c):
            out = out * a + ck
        return out

    fp0 = c[1] if len(c) > 1 else 0.0
    fpp0 = 2.0 * c[2] if len(c) > 2 else 0.0
    return DeformationFunction("custom_polynomial", f, fp0, fpp0)


def get_deformation(name: str, coeffs: Sequence[float] | None = None) -> DeformationFunction:
    if name == "custom_polynomial":
        if coeffs is None:
            raise ConfigError("deformation", "custom_polynomial needs a coefficient list")
        return custom_polynomial(coeffs)
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigError("deformation", f"unknown deformation function {name!r}") from None


def list_deformations() -> list[str]:
    return sorted(REGISTRY) + ["custom_polynomial"]


# --- 3D bracket-matrix families -------------------------------------------
#
# A 3D family maps the dimensionless momentum u = sqrt(beta) * P to the
# 3x3 matrix of x-p brackets.  Entries must be even under u -> -u.

def isotropic_sqrt(u: np.ndarray) -> np.ndarray:
    """sqrt(1 + u^2) (delta_ij + u_i u_j): translation invariant and exactly
    consistent with vanishing x-x and p-p brackets."""
    u = np.asarray(u, dtype=float)
    s = float(u @ u)
    return np.sqrt(1.0 + s) * (np.eye(3) + np.outer(u, u))


def linear_quadratic_cap(u: np.ndarray) -> np.ndarray:
    """delta_ij - (|u| delta_ij + u_i u_j / |u|) + (u^2 delta_ij + 3 u_i u_j).

    Minimal-length plus maximal-momentum form; consistent only to first
    order in the deformation parameter.
    """
    u = np.asarray(u, dtype=float)
    a = float(np.sqrt(u @ u))
    out = np.eye(3)
    if a > 0.0:
        out = out - (a * np.eye(3) + np.outer(u, u) / a)
    out = out + (a * a * np.eye(3) + 3.0 * np.outer(u, u))
    return out


def diagonal_from_1d(base: DeformationFunction) -> Callable[[np.ndarray], np.ndarray]:
    """delta_ij F(|u|) built from a 1D registry entry."""

    def fij(u):
        u = np.asarray(u, dtype=float)
        return float(base.f(np.sqrt(u @ u))) * np.eye(3)

    return fij


REGISTRY_3D: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "isotropic_sqrt": isotropic_sqrt,
    "linear_quadratic_cap": linear_quadratic_cap,
}


def get_deformation_3d(name: str, base: str | None = None) -> Callable[[np.ndarray], np.ndarray]:
    if name == "diagonal_from_1d":
        if base is None:
            raise ConfigError("deformation_3d", "diagonal_from_1d needs a base 1D name")
        return diagonal_from_1d(get_deformation(base))
    try:
        return REGISTRY_3D[name]
    except KeyError:
        raise ConfigError("deformation_3d", f"unknown 3D family {name!r}") from None


def list_deformations_3d() -> list[str]:
    return sorted(REGISTRY_3D) + ["diagonal_from_1d"]
