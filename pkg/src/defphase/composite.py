"""Composite bodies: effective center-of-mass parameters, cross-bracket
diagnostics, decoupled center-of-mass dynamics, kinetic-energy additivity,
and the macroscopic-body (soccer-ball) scaling analysis.

The decoupled center-of-mass equations exist only when the per-particle
parameters follow the mass-scaling relations; without them the module
reports the coupling magnitudes and flags any decoupled evolution as an
approximation rather than inventing coupled dynamics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .closedforms import (
    KineticTerms,
    gup_kinetic_series_equal_parts,
    gup_kinetic_series_scaled,
    nc2d_kinetic_energy,
)
from .errors import MissingParams, NonPositiveMass, SeriesOutOfRange
from .functions import DeformationFunction

_REL_TOL = 1e-9


@dataclass(frozen=True)
class Particle:
    mass: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mass <= 0:
            raise NonPositiveMass(f"particle mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class CompositeSystem:
    particles: tuple

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))
        if not self.particles:
            raise ValueError("a composite system needs at least one particle")

    @property
    def total_mass(self) -> float:
        return float(sum(p.mass for p in self.particles))

    @property
    def mass_fractions(self) -> np.ndarray:
        M = self.total_mass
        return np.array([p.mass / M for p in self.particles])

    def param(self, key: str) -> np.ndarray:
        try:
            return np.array([p.params[key] for p in self.particles], dtype=float)
        except KeyError:
            raise MissingParams(f"every particle needs parameter {key!r}") from None

    def param_arrays(self, key: str) -> list:
        try:
            return [np.asarray(p.params[key], dtype=float) for p in self.particles]
        except KeyError:
            raise MissingParams(f"every particle needs parameter {key!r}") from None


def from_masses(masses: Sequence[float], params_for: Callable[[float], dict]) -> CompositeSystem:
    return CompositeSystem(tuple(Particle(m, params_for(m)) for m in masses))


# --- canonical effective parameters ------------------------------------------


def effective_canonical_params(sys: CompositeSystem) -> tuple[float, float]:
    """Center-of-mass (theta_eff, eta_eff): the coordinate parameter averages
    with mass-squared weights over the total mass squared, the momentum one
    is a plain sum."""
    theta = sys.param("theta")
    eta = sys.param("eta")
    masses = np.array([p.mass for p in sys.particles])
    M = float(masses.sum())
    return float(np.sum(masses**2 * theta) / M**2), float(np.sum(eta))


@dataclass(frozen=True)
class CrossBrackets:
    """Per-particle brackets between center-of-mass and relative variables.
    Both vanish exactly when the scaling relations hold."""

    x_part: np.ndarray  # mu_a theta_a - theta_eff
    p_part: np.ndarray  # eta_a - mu_a sum_b eta_b

    @property
    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.x_part)), np.max(np.abs(self.p_part))))


def com_cross_brackets(sys: CompositeSystem) -> CrossBrackets:
    theta = sys.param("theta")
    eta = sys.param("eta")
    mu = sys.mass_fractions
    theta_eff, eta_eff = effective_canonical_params(sys)
    return CrossBrackets(x_part=mu * theta - theta_eff, p_part=eta - mu * float(np.sum(eta)))


# --- Lie effective parameters -------------------------------------------------


@dataclass(frozen=True)
class LieTimeEffective:
    kappa_eff: float
    closes: bool


def effective_lie_time_params(sys: CompositeSystem) -> LieTimeEffective:
    """1 / kappa_eff = sum mu_a^2 / kappa_a.  ``closes`` reports whether the
    per-particle constants follow the mass scaling, i.e. whether the
    center-of-mass algebra is composition independent and decoupled from the
    relative motion."""
    kappa = sys.param("kappa")
    if np.any(kappa == 0):
        raise MissingParams("kappa must be nonzero for every particle")
    mu = sys.mass_fractions
    inv = float(np.sum(mu**2 / kappa))
    g = kappa / np.array([p.mass for p in sys.particles])
    closes = bool(np.max(np.abs(g - g[0])) <= _REL_TOL * max(1e-300, np.max(np.abs(g))))
    return LieTimeEffective(kappa_eff=1.0 / inv, closes=closes)


@dataclass(frozen=True)
class LieGeneralEffective:
    theta0_eff: np.ndarray
    theta_x_eff: np.ndarray | None
    theta_tilde_eff: np.ndarray | None
    theta_bar: np.ndarray | None
    closes: bool
    raw_theta0_sum: np.ndarray
    raw_theta_x_sum: np.ndarray


def effective_lie_general_params(sys: CompositeSystem) -> LieGeneralEffective:
    """Center-of-mass structure constants for the general Lie family.

    Under the scaling relations the weighted sums collapse onto the
    center-of-mass variables with constants gamma / M and the bracket set
    closes; otherwise the raw mass-fraction-squared sums are returned with
    ``closes`` False, because the sums multiply per-particle coordinates
    that cannot be rewritten through the center of mass.
    """
    theta0 = sys.param_arrays("theta0")
    theta_x = sys.param_arrays("theta_x")
    theta_tilde = sys.param_arrays("theta_tilde")
    theta_bar = sys.param_arrays("theta_bar")
    masses = np.array([p.mass for p in sys.particles])
    M = float(masses.sum())
    mu = masses / M

    raw0 = sum(mu[a] ** 2 * theta0[a] for a in range(len(mu)))
    rawx = sum(mu[a] ** 2 * theta_x[a] for a in range(len(mu)))

    def scaled_constant(arrs):
        g = [arrs[a] * masses[a] for a in range(len(mu))]
        ref = g[0]
        scale = max(1e-300, float(np.max(np.abs(ref))))
        ok = all(float(np.max(np.abs(ga - ref))) <= _REL_TOL * scale for ga in g[1:])
        return ref, ok

    g0, ok0 = scaled_constant(theta0)
    gx, okx = scaled_constant(theta_x)
    gt, okt = scaled_constant(theta_tilde)
    bar_ref = theta_bar[0]
    bar_scale = max(1e-300, float(np.max(np.abs(bar_ref))))
    okb = all(
        float(np.max(np.abs(b - bar_ref))) <= _REL_TOL * bar_scale for b in theta_bar[1:]
    )
    closes = ok0 and okx and okt and okb
    if closes:
        return LieGeneralEffective(
            theta0_eff=g0 / M,
            theta_x_eff=gx / M,
            theta_tilde_eff=gt / M,
            theta_bar=bar_ref,
            closes=True,
            raw_theta0_sum=raw0,
            raw_theta_x_sum=rawx,
        )
    return LieGeneralEffective(
        theta0_eff=raw0,
        theta_x_eff=None,
        theta_tilde_eff=None,
        theta_bar=None,
        closes=False,
        raw_theta0_sum=raw0,
        raw_theta_x_sum=rawx,
    )


# --- center-of-mass dynamics ---------------------------------------------------


@dataclass(frozen=True)
class UniformPotential:
    """V(X) = sign * g * X_axis (per unit mass)."""

    g: float
    axis: int = 1
    sign: float = -1.0

    def grad(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros_like(X)
        out[self.axis - 1] = self.sign * self.g
        return out


@dataclass(frozen=True)
class PointPotential:
    """V(X) = -GM / |X| (per unit mass)."""

    GM: float

    def grad(self, X: np.ndarray) -> np.ndarray:
        r = float(np.sqrt(X @ X))
        return self.GM * X / r**3


@dataclass
class ComField:
    """Center-of-mass vector field in (X, Pprime = P / M)."""

    field: Callable[[float, np.ndarray, np.ndarray], tuple]
    decoupled: bool
    note: str = ""

    def __call__(self, t, X, Pp):
        return self.field(t, X, Pp)


def composite_eom(sys: CompositeSystem, potential, family: str) -> ComField:
    """Center-of-mass equations in scaled variables for one algebra family
    ('canonical', 'lie_time', or 'lie_general').

    With scaling-rule parameters the field is exactly the decoupled one and
    contains no mass.  Otherwise the same field is built from the effective
    parameters and flagged as an approximation that ignores the coupling to
    the relative motion.
    """
    M = sys.total_mass
    if family == "canonical":
        theta_eff, eta_eff = effective_canonical_params(sys)
        cross = com_cross_brackets(sys)
        scale = max(abs(theta_eff), abs(eta_eff), 1e-300)
        decoupled = cross.max_abs <= _REL_TOL * scale
        gamma_eff, alpha_eff = theta_eff * M, eta_eff / M

        def f(t, X, Pp):
            dv = potential.grad(X)
            xd = np.array([Pp[0] + gamma_eff * dv[1], Pp[1] - gamma_eff * dv[0]])
            pd = np.array([-dv[0] + alpha_eff * Pp[1], -dv[1] - alpha_eff * Pp[0]])
            return xd, pd

        note = "" if decoupled else "relative-motion coupling ignored (nonzero cross brackets)"
        return ComField(field=f, decoupled=decoupled, note=note)

    if family == "lie_time":
        eff = effective_lie_time_params(sys)
        first = sys.particles[0].params
        rho = int(first.get("rho", 1)) - 1
        tau = int(first.get("tau", 2)) - 1
        g_eff = eff.kappa_eff / M

        def f(t, X, Pp):
            dv = potential.grad(X)
            xd = Pp.copy()
            xd[rho] += (t / g_eff) * dv[tau]
            xd[tau] -= (t / g_eff) * dv[rho]
            pd = -dv
            return xd, pd

        note = "" if eff.closes else "relative-motion coupling ignored (unscaled kappa)"
        return ComField(field=f, decoupled=eff.closes, note=note)

    if family == "lie_general":
        eff = effective_lie_general_params(sys)
        if eff.closes:
            c0 = eff.theta0_eff * M
            cx = eff.theta_x_eff * M
            ct = eff.theta_tilde_eff * M
            cb = eff.theta_bar
            decoupled, note = True, ""
        else:
            mu = sys.mass_fractions
            c0 = eff.raw_theta0_sum * M
            cx = eff.raw_theta_x_sum * M
            ct = sum(
                mu[a] ** 2 * arr * M
                for a, arr in enumerate(sys.param_arrays("theta_tilde"))
            )
            cb = sum(mu[a] * arr for a, arr in enumerate(sys.param_arrays("theta_bar")))
            decoupled = False
            note = "relative-motion coupling ignored (unscaled Lie constants)"

        def f(t, X, Pp):
            dv = potential.grad(X)
            bar_x = np.einsum("kij,k->ij", cb, X)
            til_p = np.einsum("kij,k->ij", ct, Pp)
            xd = Pp + (bar_x + til_p) @ Pp + (c0 * t + np.einsum("kij,k->ij", cx, X)) @ dv
            pd = -dv - (bar_x + til_p) @ dv
            return xd, pd

        return ComField(field=f, decoupled=decoupled, note=note)

    raise ValueError(f"unknown family {family!r}")


# --- kinetic-energy report ------------------------------------------------------


@dataclass(frozen=True)
class KineticReport:
    whole: float
    sum_of_parts: float

    @property
    def mismatch(self) -> float:
        return self.whole - self.sum_of_parts


def kinetic_energy_report(
    sys: CompositeSystem, g: float, v01: float, v02: float, t: float
) -> KineticReport:
    """Whole-body versus sum-of-parts kinetic energy for the canonical 2D
    family during uniform fall, with all particles sharing the velocity.
    The whole-body value uses the effective parameters; under the scaling
    relations the two sides agree identically."""
    theta_eff, eta_eff = effective_canonical_params(sys)
    M = sys.total_mass
    whole = nc2d_kinetic_energy(M, theta_eff, eta_eff, g, v01, v02, t)
    parts = sum(
        nc2d_kinetic_energy(p.mass, p.params["theta"], p.params["eta"], g, v01, v02, t)
        for p in sys.particles
    )
    return KineticReport(whole=whole, sum_of_parts=float(parts))


# --- soccer-ball scaling ---------------------------------------------------------


@dataclass(frozen=True)
class SoccerBallFit:
    n_values: tuple
    first_terms: tuple
    second_terms: tuple
    first_slope: float | None
    second_slope: float
    first_degenerate: bool
    mode: str

    def rows(self):
        out = []
        for n, t1, t2 in zip(self.n_values, self.first_terms, self.second_terms):
            out.append({"N": n, "first_order": t1, "second_order": t2})
        return out


def _fit_slope(n_values, terms) -> float:
    logs = np.log(np.abs(np.array(terms)))
    return float(np.polyfit(np.log(np.array(n_values, dtype=float)), logs, 1)[0])


def soccer_ball_scaling(
    func: DeformationFunction,
    n_values: Sequence[int],
    m_a: float,
    v: float,
    mode: str,
    beta: float | None = None,
    gamma: float | None = None,
) -> SoccerBallFit:
    """Fit the growth exponents of the kinetic-energy corrections with the
    particle number N.

    mode='fixed_beta': one shared beta; the corrections grow as N^2 and N^3.
    mode='scaled': sqrt(beta) m = gamma; every term is linear in N.
    """
    if len(n_values) < 4:
        raise ValueError("need at least 4 values of N for the fit")
    first, second = [], []
    if mode == "fixed_beta":
        if beta is None:
            raise ValueError("fixed_beta mode needs beta")
        n_max = max(n_values)
        arg = math.sqrt(beta) * n_max * m_a * abs(v)
        terms_max = gup_kinetic_series_equal_parts(func.fp0, func.fpp0, beta, n_max, m_a, v)
        if abs(terms_max.first) + abs(terms_max.second) > abs(terms_max.zero):
            raise SeriesOutOfRange(
                f"corrections exceed the leading term at N = {n_max}"
            )
        if arg > 0.1:
            import warnings

            warnings.warn(f"series argument {arg:.3g} exceeds 0.1 at N = {n_max}")
        for n in n_values:
            terms = gup_kinetic_series_equal_parts(func.fp0, func.fpp0, beta, n, m_a, v)
            first.append(terms.first)
            second.append(terms.second)
    elif mode == "scaled":
        if gamma is None:
            raise ValueError("scaled mode needs gamma")
        for n in n_values:
            m = n * m_a
            zero = 0.5 * m * v * v
            tot = gup_kinetic_series_scaled(func.fp0, func.fpp0, gamma, m, v)
            first.append(-func.fp0 * gamma * m * abs(v) * v * v)
            second.append(tot - zero - first[-1])
    else:
        raise ValueError("mode must be 'fixed_beta' or 'scaled'")

    degenerate = all(t == 0.0 for t in first)
    return SoccerBallFit(
        n_values=tuple(n_values),
        first_terms=tuple(first),
        second_terms=tuple(second),
        first_slope=None if degenerate else _fit_slope(n_values, first),
        second_slope=_fit_slope(n_values, second),
        first_degenerate=degenerate,
        mode=mode,
    )
