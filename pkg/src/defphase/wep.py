"""Mass-scaling rules, trajectory-divergence sweeps, and Eotvos reports.

A scaling rule ties each deformation parameter to the particle mass so
that the scaled equations of motion contain only universal constants.
``wep_divergence`` integrates one scenario for several masses from the same
initial position and velocity (the initial momentum is derived per algebra)
and reports the largest pairwise trajectory deviation, normalized by the
displacement scale of the sweep.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    AlgebraSpec,
    CanonicalNC2D,
    Gup1D,
    Gup3D,
    LieGeneral,
    LieMiaoVariant1,
    LieMiaoVariant2,
    LieTimeCommuting,
    Ordinary,
    PhasePoint,
    RotInvEffective,
    algebra_dim,
)
from .dynamics import (
    FixedRK4,
    HamiltonianSpec,
    PointSource,
    RotInvEffectivePoint,
    RotInvEffectiveUniform,
    StepPolicy,
    UniformField,
    integrate,
    velocity_to_momentum,
)
from .errors import DegenerateDenominator, NonPositiveMass

# --- scaling rules -----------------------------------------------------------


@dataclass(frozen=True)
class GupScaling:
    """sqrt(beta) m = gamma for every body."""

    gamma: float


@dataclass(frozen=True)
class CanonicalScaling:
    """theta m = gamma and eta / m = alpha for every body."""

    gamma: float  # s
    alpha: float  # 1 / s


@dataclass(frozen=True)
class RotInvScaling:
    """<theta^2> m^2 = A and <eta^2> / m^2 = B for every body."""

    A: float
    B: float


@dataclass(frozen=True)
class LieScaling:
    """kappa / m = gamma_kappa for every body."""

    gamma_kappa: float


@dataclass(frozen=True, eq=False)
class LieGeneralScaling:
    """theta0 m, theta_x m and theta_tilde m are universal; theta_bar is
    mass independent and carried through unchanged."""

    gamma0: np.ndarray
    gamma_x: np.ndarray
    gamma_tilde: np.ndarray
    theta_bar: np.ndarray

    def __post_init__(self):
        for name, shape in (
            ("gamma0", (3, 3)),
            ("gamma_x", (3, 3, 3)),
            ("gamma_tilde", (3, 3, 3)),
            ("theta_bar", (3, 3, 3)),
        ):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


MassScalingRule = GupScaling | CanonicalScaling | RotInvScaling | LieScaling | LieGeneralScaling


def apply_scaling(rule: MassScalingRule, m: float) -> dict:
    """Deformation parameters for a body of mass m under the rule."""
    if m <= 0:
        raise NonPositiveMass(f"mass must be positive, got {m}")
    if isinstance(rule, GupScaling):
        return {"beta": (rule.gamma / m) ** 2}
    if isinstance(rule, CanonicalScaling):
        return {"theta": rule.gamma / m, "eta": rule.alpha * m}
    if isinstance(rule, RotInvScaling):
        return {"theta2_mean": rule.A / (m * m), "eta2_mean": rule.B * m * m}
    if isinstance(rule, LieScaling):
        return {"kappa": rule.gamma_kappa * m}
    if isinstance(rule, LieGeneralScaling):
        return {
            "theta0": rule.gamma0 / m,
            "theta_x": rule.gamma_x / m,
            "theta_tilde": rule.gamma_tilde / m,
            "theta_bar": rule.theta_bar.copy(),
        }
    raise TypeError(f"unknown scaling rule {type(rule).__name__}")


def algebra_for_mass(
    template: AlgebraSpec,
    m: float,
    rule: MassScalingRule | None = None,
    fixed_params: dict | None = None,
) -> AlgebraSpec:
    """Template with its deformation parameters replaced, either by the
    scaling rule at mass m or by explicit fixed values."""
    if isinstance(template, (LieMiaoVariant1, LieMiaoVariant2)):
        template = template.to_general()
    params = apply_scaling(rule, m) if rule is not None else dict(fixed_params or {})
    if not params:
        return template
    return dataclasses.replace(template, **params)


# --- scenarios ----------------------------------------------------------------


@dataclass(frozen=True)
class UniformFallScenario:
    g: float = 9.8
    t_end: float = 1.0
    x0: tuple = (0.0,)
    v0: tuple = (0.0,)
    axis: int = 1
    sign: float = -1.0


@dataclass(frozen=True)
class PointSourceScenario:
    GM: float
    t_end: float
    x0: tuple
    v0: tuple


Scenario = UniformFallScenario | PointSourceScenario


def build_hamiltonian(alg: AlgebraSpec, scenario: Scenario, m: float) -> HamiltonianSpec:
    if isinstance(alg, RotInvEffective):
        if isinstance(scenario, UniformFallScenario):
            return RotInvEffectiveUniform(m=m, g=scenario.g, eta2_mean=alg.eta2_mean)
        return RotInvEffectivePoint(
            m=m,
            GM=scenario.GM,
            theta2_mean=alg.theta2_mean,
            eta2_mean=alg.eta2_mean,
        )
    if isinstance(scenario, UniformFallScenario):
        return UniformField(m=m, g=scenario.g, axis=scenario.axis, sign=scenario.sign)
    return PointSource(m=m, GM=scenario.GM)


# --- divergence sweep ----------------------------------------------------------


@dataclass
class WepSweepResult:
    masses: list
    divergence: float
    momentum_scaled_spread: float
    length_scale: float
    trajectories: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "masses": list(self.masses),
            "divergence": self.divergence,
            "momentum_scaled_spread": self.momentum_scaled_spread,
            "length_scale": self.length_scale,
        }


def wep_divergence(
    family: AlgebraSpec,
    scenario: Scenario,
    masses: Sequence[float],
    rule: MassScalingRule | None = None,
    fixed_params: dict | None = None,
    policy: StepPolicy | None = None,
    keep_trajectories: bool = False,
) -> WepSweepResult:
    """Integrate the scenario once per mass and return the largest pairwise
    sup-norm trajectory deviation over the shared time grid, normalized by
    the sweep displacement scale.  Initial positions and velocities are
    common to all masses; momenta are derived per algebra."""
    if len(masses) < 2:
        raise ValueError("need at least two masses")
    if rule is None and fixed_params is None:
        raise ValueError("give either a scaling rule or fixed parameters")
    policy = policy or FixedRK4(dt=1e-3)
    if not isinstance(policy, FixedRK4):
        raise ValueError("mass sweeps compare on a shared grid; use FixedRK4")

    x0 = np.array(scenario.x0, dtype=float)
    v0 = np.array(scenario.v0, dtype=float)
    trajectories = []
    for m in masses:
        alg = algebra_for_mass(family, m, rule=rule, fixed_params=fixed_params)
        ham = build_hamiltonian(alg, scenario, m)
        p0 = velocity_to_momentum(alg, ham, x0, v0)
        traj = integrate(alg, ham, PhasePoint(x0, p0), scenario.t_end, policy)
        trajectories.append(traj)

    length = max(
        float(np.max(np.linalg.norm(tr.x - tr.x[0], axis=1))) for tr in trajectories
    )
    length = max(length, 1e-300)
    div = 0.0
    spread = 0.0
    pscale = max(
        float(np.max(np.linalg.norm(tr.p / m, axis=1)))
        for tr, m in zip(trajectories, masses)
    )
    pscale = max(pscale, 1e-300)
    for i in range(len(masses)):
        for j in range(i + 1, len(masses)):
            ti, tj = trajectories[i], trajectories[j]
            n = min(len(ti), len(tj))
            div = max(
                div,
                float(np.max(np.linalg.norm(ti.x[:n] - tj.x[:n], axis=1))) / length,
            )
            spread = max(
                spread,
                float(
                    np.max(
                        np.linalg.norm(
                            ti.p[:n] / masses[i] - tj.p[:n] / masses[j], axis=1
                        )
                    )
                )
                / pscale,
            )
    return WepSweepResult(
        masses=list(masses),
        divergence=div,
        momentum_scaled_spread=spread,
        length_scale=length,
        trajectories=trajectories if keep_trajectories else [],
    )


# --- Eotvos -------------------------------------------------------------------


@dataclass(frozen=True)
class EotvosReport:
    """Normalized free-fall acceleration difference of two bodies."""

    delta_a_over_a: float
    a1: float
    a2: float
    components: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def recompute(self) -> float:
        return 2.0 * (self.a1 - self.a2) / (self.a1 + self.a2)

    def to_dict(self) -> dict:
        return {
            "delta_a_over_a": self.delta_a_over_a,
            "a1": self.a1,
            "a2": self.a2,
            "components": dict(self.components),
            "metadata": dict(self.metadata),
        }


def eotvos_from_accelerations(a1: float, a2: float, **metadata) -> EotvosReport:
    denom = a1 + a2
    if denom == 0.0:
        raise DegenerateDenominator("a1 + a2 = 0")
    return EotvosReport(
        delta_a_over_a=2.0 * (a1 - a2) / denom, a1=a1, a2=a2, metadata=metadata
    )
