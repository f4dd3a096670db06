"""Analytic trajectories, acceleration expansions, and kinetic-energy series.

These are the exact solutions the integrator is checked against, and the
fast paths the harness reports from.  Every form that contains a removable
1/eta (or 1/<eta^2>) pole switches to an explicit Taylor branch for small
phase argument instead of evaluating the cancelling combination; the branch
threshold is 1e-4 in the dimensionless argument, where the truncation error
of the quartic remainder is below 1e-16 relative.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dynamics import gup_velocity_to_scaled_momentum
from .errors import NonPositiveMass
from .functions import DeformationFunction

_BRANCH = 1e-4


def _as_array(t):
    return np.atleast_1d(np.asarray(t, dtype=float))


# --- canonical 2D noncommutativity, uniform field ---------------------------


def nc2d_uniform_trajectory_scaled(
    gamma: float,
    alpha: float,
    g: float,
    x01: float,
    x02: float,
    v01: float,
    v02: float,
    t,
):
    """Mass-free closed-form free fall for the canonical 2D family under the
    scaling constants gamma (= theta m) and alpha (= eta / m).

    The field points along +x1 (Hamiltonian H = p^2/2m - m g X1).  Returns
    (X1, X2) arrays matching the shape of t.
    """
    t = _as_array(t)
    phi = alpha * t
    x1 = np.empty_like(t)
    x2 = np.empty_like(t)

    small = np.abs(phi) < _BRANCH
    big = ~small

    if np.any(big):
        tb, pb = t[big], phi[big]
        sin, cos = np.sin(pb), np.cos(pb)
        K = g / alpha**2 - g * gamma / alpha + v02 / alpha
        x1[big] = (v01 / alpha) * sin + K * (1.0 - cos) + x01
        x2[big] = (
            K * sin
            - (v01 / alpha) * (1.0 - cos)
            - (g / alpha) * tb
            + gamma * g * tb
            + x02
        )
    if np.any(small):
        ts, ps = t[small], phi[small]
        p2 = ps * ps
        sinc = 1.0 - p2 / 6.0 + p2 * p2 / 120.0  # sin(phi)/phi
        vers = 0.5 - p2 / 24.0 + p2 * p2 / 720.0  # (1 - cos(phi))/phi^2
        x1[small] = (
            x01
            + v01 * ts * sinc
            + g * ts * ts * vers
            + (v02 - gamma * g) * ts * ps * vers
        )
        # the 1/alpha and 1/alpha^2 poles cancel exactly; what survives is
        # (sin phi / phi - 1)/phi = -phi/6 + phi^3/120 + ...
        x2[small] = (
            x02
            + v02 * ts
            + g * ts * ts * (-ps / 6.0 + ps * p2 / 120.0)
            + (v02 - gamma * g) * ts * (-p2 / 6.0 + p2 * p2 / 120.0)
            - v01 * ts * ps * vers
        )
    return x1, x2


def nc2d_uniform_trajectory(
    m: float,
    theta: float,
    eta: float,
    g: float,
    x01: float,
    x02: float,
    v01: float,
    v02: float,
    t,
):
    """Closed-form free fall for a particle of mass m with fixed parameters
    (theta, eta); reduces to the scaled form through gamma = theta m and
    alpha = eta / m, which is an exact substitution."""
    if m <= 0:
        raise NonPositiveMass("mass must be positive")
    return nc2d_uniform_trajectory_scaled(theta * m, eta / m, g, x01, x02, v01, v02, t)


# --- rotationally invariant effective family, uniform field ------------------


def rotinv_uniform_trajectory_scaled(B: float, g: float, x0, v0, t):
    """Closed-form motion for the effective Hamiltonian with the scaled
    momentum-fluctuation constant B = <eta^2>/m^2; the field enters along
    axis 1 through H = p^2/2m + m g x1, so the parabola opens toward -x1.

    Returns an array of shape (len(t), 3).
    """
    if B < 0:
        raise ValueError("B must be >= 0")
    t = _as_array(t)
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    omega = math.sqrt(B / 6.0)
    psi = omega * t
    out = np.empty((t.size, x0.size))

    small = np.abs(psi) < _BRANCH
    big = ~small
    if np.any(big):
        pb = psi[big]
        cos, sin = np.cos(pb), np.sin(pb)
        c = 6.0 * g / B
        for i in range(x0.size):
            d1 = 1.0 if i == 0 else 0.0
            out[big, i] = (x0[i] + c * d1) * cos + v0[i] * sin / omega - c * d1
    if np.any(small):
        ts, ps = t[small], psi[small]
        p2 = ps * ps
        sinc = 1.0 - p2 / 6.0 + p2 * p2 / 120.0
        vers = 0.5 - p2 / 24.0 + p2 * p2 / 720.0
        for i in range(x0.size):
            d1 = 1.0 if i == 0 else 0.0
            out[small, i] = x0[i] * np.cos(ps) + v0[i] * ts * sinc - g * ts * ts * vers * d1
    return out


def rotinv_uniform_trajectory(m: float, eta2_mean: float, g: float, x0, v0, t):
    if m <= 0:
        raise NonPositiveMass("mass must be positive")
    return rotinv_uniform_trajectory_scaled(eta2_mean / (m * m), g, x0, v0, t)


# --- GUP acceleration and Eotvos --------------------------------------------


def gup_acceleration_first_order(
    fp0: float, fpp0: float, beta: float, m: float, v: float, g: float
) -> float:
    """Free-fall acceleration through second order in sqrt(beta) m v.

    v is the instantaneous velocity of the particle.  The coefficients were
    re-derived from the integrated flow (see the series tests): the linear
    term is 3 F'(0) and the quadratic one 2 F''(0) - F'(0)^2, the latter
    holding only when the expansion point is the actual velocity rather than
    the undeformed one.
    """
    u = math.sqrt(beta) * m * abs(v)
    if u > 0.1:
        warnings.warn(f"series argument sqrt(beta) m |v| = {u:.3g} exceeds 0.1")
    return g + 3.0 * fp0 * g * u + (2.0 * fpp0 - fp0**2) * g * u * u


def gup_eotvos(
    fp0: float, fpp0: float, beta: float, m1: float, m2: float, v: float
) -> float:
    """Relative free-fall acceleration difference of two masses sharing one
    deformation parameter beta."""
    sb = math.sqrt(beta)
    return 3.0 * fp0 * abs(v) * sb * (m1 - m2) + (2.0 * fpp0 - fp0**2) * v * v * beta * (
        m1 * m1 - m2 * m2
    )


def gup_eotvos_planck(
    fp0: float, fpp0: float, m1: float, m2: float, v: float, c: float, m_p: float
) -> float:
    """Same with the minimal length set to the Planck length, i.e.
    sqrt(beta) = 1 / (c m_P)."""
    return 3.0 * fp0 * (abs(v) / c) * (m1 - m2) / m_p + (2.0 * fpp0 - fp0**2) * (
        v * v / (c * c)
    ) * (m1 * m1 - m2 * m2) / (m_p * m_p)


# --- kinetic energy ----------------------------------------------------------


@dataclass(frozen=True)
class KineticTerms:
    """Order-by-order pieces of the truncated kinetic energy."""

    zero: float
    first: float
    second: float

    @property
    def total(self) -> float:
        return self.zero + self.first + self.second


def gup_kinetic_terms(
    fp0: float, fpp0: float, beta: float, m: float, v: float
) -> KineticTerms:
    sb = math.sqrt(beta)
    return KineticTerms(
        zero=0.5 * m * v * v,
        first=-fp0 * sb * m * m * abs(v) * v * v,
        second=(5.0 * fp0**2 - fpp0) * beta * m**3 * v**4 / 2.0,
    )


def gup_kinetic_series(fp0: float, fpp0: float, beta: float, m: float, v: float) -> float:
    """T through second order in sqrt(beta) for one body of mass m."""
    return gup_kinetic_terms(fp0, fpp0, beta, m, v).total


def gup_kinetic_series_sum_over_parts(
    fp0: float, fpp0: float, beta: float, masses: Sequence[float], v: float
) -> float:
    """Additivity-side evaluation: the parts share the velocity and the
    deformation parameter, so the corrections pick up sum(m_a^2), sum(m_a^3)
    instead of the whole-body powers."""
    return float(sum(gup_kinetic_series(fp0, fpp0, beta, m_a, v) for m_a in masses))


def gup_kinetic_series_equal_parts(
    fp0: float, fpp0: float, beta: float, n: int, m_a: float, v: float
) -> KineticTerms:
    """Whole-body terms for a body treated as n equal parts of mass m_a with
    one fixed beta: corrections grow as n^2 and n^3 while the zero-order
    term grows as n."""
    return gup_kinetic_terms(fp0, fpp0, beta, n * m_a, v)


def gup_kinetic_series_scaled(
    fp0: float, fpp0: float, gamma: float, m: float, v: float
) -> float:
    """Mass-scaled form, linear in m: sqrt(beta) m has been replaced by the
    universal constant gamma."""
    return (
        0.5 * m * v * v
        - fp0 * gamma * m * abs(v) * v * v
        + (5.0 * fp0**2 - fpp0) * gamma**2 * m * v**4 / 2.0
    )


def gup_exact_kinetic(
    F: DeformationFunction | Callable[[float], float], gamma: float, m: float, v: float
) -> float:
    """All-orders kinetic energy m f(v, gamma)^2 / 2 where f is the exact
    scaled momentum obtained by inverting the velocity map."""
    q = gup_velocity_to_scaled_momentum(F, gamma, v)
    return 0.5 * m * q * q


# --- canonical 2D kinetic energy under uniform fall --------------------------


def nc2d_kinetic_energy(
    m: float,
    theta: float,
    eta: float,
    g: float,
    v01: float,
    v02: float,
    t: float,
) -> float:
    """Kinetic energy along the closed-form fall, derived from the momentum
    history; equals |P(t)|^2 / 2m exactly.

    The cosine term carries a minus sign: the printed form of this energy in
    the source material has a sign slip there, which the t = 0 limit and the
    momentum identity both expose.
    """
    if m <= 0:
        raise NonPositiveMass("mass must be positive")
    phi = eta * t / m
    t0 = 0.5 * m * (v01 * v01 + v02 * v02)
    e = t0 + g * g * m**3 * (1.0 / eta**2 + theta**2 / 2.0 - theta / eta)
    e += m * m * g * v02 * (1.0 / eta - theta)
    e += (m * m * g / eta) * (
        v01 * math.sin(phi)
        - (m * g / eta - m * g * theta + v02) * math.cos(phi)
    )
    return e


def nc2d_momentum_history(
    m: float, theta: float, eta: float, g: float, v01: float, v02: float, t: float
) -> tuple[float, float]:
    """Momentum components along the closed-form fall."""
    phi = eta * t / m
    amp = m * v02 + m * m * g / eta - m * m * g * theta
    p1 = m * v01 * math.cos(phi) + amp * math.sin(phi)
    p2 = -m * v01 * math.sin(phi) + amp * math.cos(phi) - m * m * g / eta
    return p1, p2
