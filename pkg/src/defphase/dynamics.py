"""Gravitational Hamiltonians, deformed equations of motion, and integrators.

For bracket-backed algebras the vector field is zdot = Omega(z, t) grad H(z)
with analytic Hamiltonian gradients.  The rotationally invariant effective
family instead uses its dedicated closed-form field over ordinary canonical
variables.  Integration is classic fixed-step RK4 (default, reproducible) or
an embedded Dormand-Prince 5(4) pair; both evaluate Omega at the stage times,
so explicitly time-dependent brackets are handled as ordinary non-autonomous
systems.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import (
    AlgebraSpec,
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
    RotInvEffective,
    SnyderKempfGeneral,
    algebra_dim,
    omega_at,
)
from .errors import (
    BracketNotFound,
    DimensionMismatch,
    NonMonotonicMap,
    SingularRadius,
    StepUnderflow,
    UnsupportedBracket,
)
from .functions import DeformationFunction

# --- Hamiltonians -----------------------------------------------------------


@dataclass(frozen=True)
class UniformField:
    """H = p^2 / 2m + sign * m g x_axis (axis is 1-based)."""

    m: float
    g: float
    axis: int = 1
    sign: float = -1.0

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.sign not in (-1.0, 1.0):
            raise ValueError("sign must be +1 or -1")


@dataclass(frozen=True)
class PointSource:
    """H = p^2 / 2m - GM m / |x|."""

    m: float
    GM: float
    r_min: float = 0.0

    def __post_init__(self):
        if self.m <= 0 or self.GM <= 0:
            raise ValueError("mass and GM must be positive")


@dataclass(frozen=True)
class Free:
    m: float

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")


@dataclass(frozen=True)
class RotInvEffectiveUniform:
    """Effective uniform-field Hamiltonian of the rotationally invariant
    family: H = p^2/2m + m g x_1 + <eta^2> x^2 / 12m over canonical (x, p)."""

    m: float
    g: float
    eta2_mean: float = 0.0

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")


@dataclass(frozen=True)
class RotInvEffectivePoint:
    """Point-source analogue, with the quadrupole-like <theta^2> corrections."""

    m: float
    GM: float
    theta2_mean: float = 0.0
    eta2_mean: float = 0.0
    r_min: float = 0.0

    def __post_init__(self):
        if self.m <= 0 or self.GM <= 0:
            raise ValueError("mass and GM must be positive")


HamiltonianSpec = UniformField | PointSource | Free | RotInvEffectiveUniform | RotInvEffectivePoint


def _radius(x: np.ndarray, r_min: float) -> float:
    r = float(np.sqrt(x @ x))
    if r <= r_min:
        raise SingularRadius(f"|x| = {r:.3e} <= r_min = {r_min:.3e}")
    return r


def hamiltonian_value(ham: HamiltonianSpec, x: np.ndarray, p: np.ndarray) -> float:
    kin = float(p @ p) / (2.0 * ham.m)
    if isinstance(ham, UniformField):
        return kin + ham.sign * ham.m * ham.g * float(x[ham.axis - 1])
    if isinstance(ham, PointSource):
        return kin - ham.GM * ham.m / _radius(x, ham.r_min)
    if isinstance(ham, Free):
        return kin
    if isinstance(ham, RotInvEffectiveUniform):
        return kin + ham.m * ham.g * float(x[0]) + ham.eta2_mean * float(x @ x) / (12.0 * ham.m)
    if isinstance(ham, RotInvEffectivePoint):
        r = _radius(x, ham.r_min)
        m, GM = ham.m, ham.GM
        L2 = float(x @ x) * float(p @ p) - float(x @ p) ** 2
        h = kin - GM * m / r + ham.eta2_mean * r * r / (12.0 * m)
        h += GM * m * ham.theta2_mean * (float(p @ p) / (12.0 * r**3) - L2 / (8.0 * r**5))
        return h
    raise TypeError(f"unknown Hamiltonian {type(ham).__name__}")


def hamiltonian_gradients(
    ham: HamiltonianSpec, x: np.ndarray, p: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic (dH/dx, dH/dp) for the bracket-backed Hamiltonians."""
    hp = p / ham.m
    if isinstance(ham, UniformField):
        hx = np.zeros_like(x)
        hx[ham.axis - 1] = ham.sign * ham.m * ham.g
        return hx, hp
    if isinstance(ham, PointSource):
        r = _radius(x, ham.r_min)
        return ham.GM * ham.m * x / r**3, hp
    if isinstance(ham, Free):
        return np.zeros_like(x), hp
    raise UnsupportedBracket(
        "rotationally invariant effective Hamiltonians do not go through "
        "Omega; use eom_vector_field"
    )


# --- vector fields ----------------------------------------------------------


def _rotinv_uniform_field(ham: RotInvEffectiveUniform, x, p):
    xd = p / ham.m
    pd = -ham.eta2_mean * x / (6.0 * ham.m)
    pd[0] -= ham.m * ham.g
    return xd, pd


def _rotinv_point_field(ham: RotInvEffectivePoint, x, p):
    # Written in the mass-scaled momentum pp = p / m; A and B are the scaled
    # fluctuation constants for this particle.
    m = ham.m
    A = ham.theta2_mean * m * m
    B = ham.eta2_mean / (m * m)
    GM = ham.GM
    pp = p / m
    r = _radius(x, ham.r_min)
    xdotp = float(x @ pp)
    cross2 = float(x @ x) * float(pp @ pp) - xdotp**2  # |x cross pp|^2
    xd = pp - (GM * A / 12.0) * (pp / r**3 - 3.0 * x * xdotp / r**5)
    ppd = (
        -GM * x / r**3
        - B * x / 6.0
        - (GM * A / 4.0)
        * (xdotp * pp / r**5 - 2.0 * x * float(pp @ pp) / r**5 + 2.5 * x * cross2 / r**7)
    )
    return xd, m * ppd


def eom_vector_field(alg: AlgebraSpec, ham: HamiltonianSpec, z: PhasePoint) -> np.ndarray:
    """Phase-space derivative (xdot, pdot) at z."""
    d = z.dim
    if isinstance(alg, RotInvEffective):
        if isinstance(ham, RotInvEffectiveUniform):
            xd, pd = _rotinv_uniform_field(ham, z.x, z.p)
        elif isinstance(ham, RotInvEffectivePoint):
            xd, pd = _rotinv_point_field(ham, z.x, z.p)
        else:
            raise UnsupportedBracket(
                "pair RotInvEffective with a RotInvEffective* Hamiltonian"
            )
        return np.concatenate([xd, pd])
    if isinstance(ham, (RotInvEffectiveUniform, RotInvEffectivePoint)):
        raise UnsupportedBracket(
            "RotInvEffective* Hamiltonians require the RotInvEffective algebra"
        )
    if d != algebra_dim(alg):
        raise DimensionMismatch(
            f"algebra dimension {algebra_dim(alg)} != phase dimension {d}"
        )
    hx, hp = hamiltonian_gradients(ham, z.x, z.p)
    omega = omega_at(alg, z.x, z.p, z.t)
    return omega @ np.concatenate([hx, hp])


def _field_fn(alg: AlgebraSpec, ham: HamiltonianSpec) -> Callable:
    def f(t: float, y: np.ndarray) -> np.ndarray:
        d = y.size // 2
        return eom_vector_field(alg, ham, PhasePoint(y[:d], y[d:], t))

    return f


# --- trajectories -----------------------------------------------------------


def _spec_fingerprint(alg, ham, policy) -> str:
    blob = json.dumps(
        {"alg": repr(alg), "ham": repr(ham), "policy": repr(policy)}, sort_keys=True
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class Trajectory:
    """Sampled phase-space history with the velocity series taken from the
    equations of motion (never from differencing x)."""

    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    v: np.ndarray
    h: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.t.size

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(self.x[i], self.p[i], float(self.t[i]))

    def csv_rows(self):
        d = self.dim
        header = (
            ["t"]
            + [f"x{i+1}" for i in range(d)]
            + [f"p{i+1}" for i in range(d)]
            + [f"v{i+1}" for i in range(d)]
            + ["H"]
        )
        rows = np.column_stack([self.t, self.x, self.p, self.v, self.h])
        return header, rows

    def to_csv(self, path) -> None:
        header, rows = self.csv_rows()
        with open(path, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(f"{val:.17g}" for val in row) + "\n")

    def to_dict(self) -> dict:
        return {
            "t": self.t.tolist(),
            "x": self.x.tolist(),
            "p": self.p.tolist(),
            "v": self.v.tolist(),
            "h": self.h.tolist(),
            "metadata": self.metadata,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)

    @classmethod
    def from_json(cls, path) -> "Trajectory":
        with open(path) as fh:
            d = json.load(fh)
        return cls(
            t=np.array(d["t"], dtype=float),
            x=np.array(d["x"], dtype=float),
            p=np.array(d["p"], dtype=float),
            v=np.array(d["v"], dtype=float),
            h=np.array(d["h"], dtype=float),
            metadata=d["metadata"],
        )


@dataclass(frozen=True)
class FixedRK4:
    dt: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True)
class AdaptiveRK45:
    rtol: float = 1e-9
    atol: float = 1e-12
    dt_max: float = math.inf
    dt_init: float | None = None


StepPolicy = FixedRK4 | AdaptiveRK45

# Dormand-Prince 5(4) tableau; fifth-order solution is propagated.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _rk4_step(f, t, y, dt):
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1


def integrate(
    alg: AlgebraSpec,
    ham: HamiltonianSpec,
    z0: PhasePoint,
    t_end: float,
    policy: StepPolicy,
) -> Trajectory:
    """Integrate from z0.t to t_end and sample every accepted step."""
    if t_end <= z0.t:
        raise ValueError("t_end must exceed the initial time")
    if isinstance(ham, (PointSource, RotInvEffectivePoint)) and ham.r_min == 0.0:
        # default guard: 1e-9 of the run's length scale
        import dataclasses

        scale = max(1.0, float(np.sqrt(z0.x @ z0.x)))
        ham = dataclasses.replace(ham, r_min=1e-9 * scale)
    f = _field_fn(alg, ham)
    ts: list[float] = [z0.t]
    ys = [z0.z.copy()]
    vs = []
    t, y = z0.t, z0.z.copy()
    d = z0.dim

    if isinstance(policy, FixedRK4):
        while t < t_end - 1e-15 * max(1.0, abs(t_end)):
            dt = min(policy.dt, t_end - t)
            y, k1 = _rk4_step(f, t, y, dt)
            vs.append(k1[:d])
            t += dt
            ts.append(t)
            ys.append(y.copy())
    else:
        span = t_end - z0.t
        dt = policy.dt_init if policy.dt_init else min(span / 100.0, policy.dt_max)
        dt_min = 1e-12 * max(1.0, span)
        k = [np.zeros(2 * d)] * 7
        while t < t_end - 1e-15 * max(1.0, abs(t_end)):
            dt = min(dt, policy.dt_max, t_end - t)
            if dt < dt_min:
                raise StepUnderflow(f"step {dt:.3e} fell below {dt_min:.3e}")
            k[0] = f(t, y)
            for i in range(1, 7):
                yi = y + dt * sum(a * kk for a, kk in zip(_DP_A[i], k[:i]))
                k[i] = f(t + _DP_C[i] * dt, yi)
            y5 = y + dt * sum(b * kk for b, kk in zip(_DP_B5, k) if b != 0.0)
            y4 = y + dt * sum(b * kk for b, kk in zip(_DP_B4, k))
            err = y5 - y4
            scale = policy.atol + policy.rtol * np.maximum(np.abs(y), np.abs(y5))
            enorm = float(np.sqrt(np.mean((err / scale) ** 2)))
            if enorm <= 1.0:
                vs.append(k[0][:d])
                t += dt
                y = y5
                ts.append(t)
                ys.append(y.copy())
            fac = 0.9 * (enorm ** -0.2 if enorm > 0 else 5.0)
            dt *= min(5.0, max(0.2, fac))

    vs.append(f(t, y)[:d])
    t_arr = np.array(ts)
    y_arr = np.array(ys)
    x_arr, p_arr = y_arr[:, :d], y_arr[:, d:]
    h_arr = np.array(
        [hamiltonian_value(ham, x_arr[i], p_arr[i]) for i in range(t_arr.size)]
    )
    drift = float(np.max(np.abs(h_arr - h_arr[0])))
    meta = {
        "integrator": type(policy).__name__,
        "policy": repr(policy),
        "steps": int(t_arr.size - 1),
        "spec_hash": _spec_fingerprint(alg, ham, policy),
        "algebra": type(alg).__name__,
        "hamiltonian": type(ham).__name__,
        "energy_drift_abs": drift,
        "energy_drift_rel": drift / max(1e-300, abs(float(h_arr[0]))),
        "time_dependent_bracket": isinstance(
            alg, (LieTimeCommuting, LieGeneral, LieMiaoVariant1, LieMiaoVariant2)
        ),
    }
    return Trajectory(t=t_arr, x=x_arr, p=p_arr, v=np.array(vs), h=h_arr, metadata=meta)


# --- velocity to momentum ---------------------------------------------------


def gup_velocity_to_scaled_momentum(
    F: DeformationFunction | Callable[[float], float],
    gamma: float,
    v: float,
    tol: float = 1e-12,
) -> float:
    """Invert q F(gamma |q|) = v for the scaled momentum q = P / m.

    Safeguarded bisection/Newton; the map must be monotonic between zero and
    the root.  Raises NonMonotonicMap when the sampled slope changes sign
    first (deformations with a momentum cap), BracketNotFound when doubling
    the bracket never reaches v.
    """
    func = F.f if isinstance(F, DeformationFunction) else F
    if v == 0.0:
        return 0.0
    target = abs(float(v))
    sign = 1.0 if v > 0 else -1.0
    if gamma == 0.0:
        return float(v)

    def phi(q):
        q = np.asarray(q, dtype=float)
        return q * np.asarray(func(gamma * np.abs(q)), dtype=float)

    # expand the bracket, checking monotonicity on a fine sample each pass so
    # a far branch of a capped map is never mistaken for the physical root
    hi = target
    lo, flo = 0.0, 0.0
    for _ in range(200):
        qs = np.linspace(0.0, hi, 33)[1:]
        vals = phi(qs)
        if not np.all(np.isfinite(vals)) or np.any(np.diff(vals) < 0.0):
            raise NonMonotonicMap(
                f"q -> q F(gamma q) is not increasing below q = {hi:.6g}; no unique inverse"
            )
        idx = np.searchsorted(vals, target)
        if idx < vals.size:
            if idx > 0:
                lo, flo = float(qs[idx - 1]), float(vals[idx - 1])
            hi, fhi = float(qs[idx]), float(vals[idx])
            break
        lo, flo = float(qs[-1]), float(vals[-1])
        hi *= 2.0
    else:
        raise BracketNotFound("no bracket after 200 doublings")

    q = 0.5 * (lo + hi)
    for _ in range(200):
        fq = float(phi(q))
        if abs(fq - target) <= tol * max(1.0, target):
            return sign * q
        if fq < target:
            lo, flo = q, fq
        else:
            hi, fhi = q, fq
        # secant proposal, bisection fallback
        if fhi != flo:
            qn = lo + (target - flo) * (hi - lo) / (fhi - flo)
        else:
            qn = 0.5 * (lo + hi)
        q = qn if lo < qn < hi else 0.5 * (lo + hi)
    return sign * q


def velocity_to_momentum(
    alg: AlgebraSpec,
    ham: HamiltonianSpec,
    x0: np.ndarray,
    v0: np.ndarray,
    t0: float = 0.0,
) -> np.ndarray:
    """Initial momentum reproducing the requested initial velocity.

    Mass sweeps hold (x0, v0) fixed while p0 is algebra dependent, so this is
    the entry point the equivalence-principle harness uses.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    m = ham.m
    if isinstance(alg, RotInvEffective):
        if isinstance(ham, RotInvEffectiveUniform):
            return m * v0
        if isinstance(ham, RotInvEffectivePoint):
            A = ham.theta2_mean * m * m
            r = float(np.sqrt(x0 @ x0))
            M = np.eye(x0.size) - (ham.GM * A / 12.0) * (
                np.eye(x0.size) / r**3 - 3.0 * np.outer(x0, x0) / r**5
            )
            return m * np.linalg.solve(M, v0)
        raise UnsupportedBracket("pair RotInvEffective with a RotInvEffective* Hamiltonian")
    if isinstance(alg, Gup1D):
        q = gup_velocity_to_scaled_momentum(alg.func, math.sqrt(alg.beta) * m, float(v0[0]))
        return np.array([m * q])

    hx, _ = hamiltonian_gradients(ham, x0, np.zeros_like(v0))
    if isinstance(alg, (Ordinary, CanonicalNC2D, CanonicalNC3D, LieTimeCommuting)):
        omega = omega_at(alg, x0, np.zeros_like(v0), t0)
        d = x0.size
        xx, xp = omega[:d, :d], omega[:d, d:]
        return m * np.linalg.solve(xp, v0 - xx @ hx)

    # momentum-dependent x-p block: damped Newton on the residual
    def resid(p: np.ndarray) -> np.ndarray:
        z = PhasePoint(x0, p, t0)
        return eom_vector_field(alg, ham, z)[: x0.size] - v0

    p = m * v0
    for _ in range(100):
        r = resid(p)
        if float(np.max(np.abs(r))) <= 1e-13 * max(1.0, float(np.max(np.abs(v0)))):
            return p
        J = np.empty((x0.size, x0.size))
        for j in range(x0.size):
            h = 1e-7 * max(1.0, abs(p[j]))
            pp, pm = p.copy(), p.copy()
            pp[j] += h
            pm[j] -= h
            J[:, j] = (resid(pp) - resid(pm)) / (2.0 * h)
        p = p - np.linalg.solve(J, r)
    raise BracketNotFound("velocity-to-momentum Newton iteration did not converge")
