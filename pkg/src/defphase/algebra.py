"""Deformed phase-space algebras and their Poisson structure matrices.

Each algebra family is a frozen dataclass holding its deformation
parameters.  ``structure_matrix`` materializes the antisymmetric bracket
matrix Omega at a phase point, ordered (x1..xd, p1..pd), so that
{f, g} = grad f . Omega . grad g and the equations of motion read
zdot = Omega grad H.

The rotationally invariant effective family carries no bracket at all:
its dynamics are defined through an effective Hamiltonian over ordinary
canonical variables, so asking for its Omega raises UnsupportedBracket.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFiniteGradient,
    NonFiniteValue,
    UnsupportedBracket,
)
from .functions import DeformationFunction

_EPS = float(np.finfo(float).eps)
FD_STEP = _EPS ** (1.0 / 3.0)


def _locked(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhasePoint:
    """Coordinates, momenta and time of a d-dimensional particle (SI units)."""

    x: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", _locked(np.atleast_1d(self.x)))
        object.__setattr__(self, "p", _locked(np.atleast_1d(self.p)))
        object.__setattr__(self, "t", float(self.t))
        if self.x.ndim != 1 or self.p.ndim != 1 or self.x.size != self.p.size:
            raise DimensionMismatch(
                f"x has shape {self.x.shape}, p has shape {self.p.shape}"
            )
        if not (
            np.all(np.isfinite(self.x))
            and np.all(np.isfinite(self.p))
            and np.isfinite(self.t)
        ):
            raise NonFiniteValue("phase point entries must be finite")

    @property
    def dim(self) -> int:
        return self.x.size

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])


# --- algebra families -------------------------------------------------------


@dataclass(frozen=True)
class Ordinary:
    """Undeformed canonical algebra in d dimensions."""

    dim: int = 3

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatch("dim must be a positive integer")


@dataclass(frozen=True)
class Gup1D:
    """One-dimensional {X, P} = F(sqrt(beta) |P|)."""

    func: DeformationFunction
    beta: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")


@dataclass(frozen=True, eq=False)
class Gup3D:
    """Translation-invariant 3D deformation: {X_i, P_j} = F_ij(sqrt(beta) P),
    with {X_i, X_j} = {P_i, P_j} = 0."""

    func3: Callable[[np.ndarray], np.ndarray]
    beta: float
    name: str = ""

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")


@dataclass(frozen=True, eq=False)
class SnyderKempfGeneral:
    """{X_i, X_j} = G(s)(X_i P_j - X_j P_i), {X_i, P_j} = f(s) d_ij + F(s) P_i P_j,
    {P_i, P_j} = 0, where s = P^2 and f, F, G are scalar functions of s."""

    f: Callable[[float], float]
    F: Callable[[float], float]
    G: Callable[[float], float]


@dataclass(frozen=True)
class CanonicalNC2D:
    """Constant 2D noncommutativity: {X1, X2} = theta, {P1, P2} = eta,
    {X_i, P_j} = d_ij."""

    theta: float  # s / kg
    eta: float  # kg / s


def antisym3(a12: float, a13: float, a23: float) -> np.ndarray:
    """Build an exactly antisymmetric 3x3 array from its upper triangle."""
    m = np.zeros((3, 3))
    m[0, 1], m[0, 2], m[1, 2] = a12, a13, a23
    m[1, 0], m[2, 0], m[2, 1] = -a12, -a13, -a23
    return m


def _check_antisym(name: str, m: np.ndarray, shape: tuple) -> np.ndarray:
    m = np.array(m, dtype=float)
    if m.shape != shape:
        raise DimensionMismatch(f"{name} must have shape {shape}")
    axes = (1, 0) if m.ndim == 2 else (0, 2, 1)
    if not np.array_equal(m, -np.transpose(m, axes)):
        raise ValueError(f"{name} must be antisymmetric in its index pair")
    m.setflags(write=False)
    return m


def _check_shape(name: str, m: np.ndarray, shape: tuple) -> np.ndarray:
    m = np.array(m, dtype=float)
    if m.shape != shape:
        raise DimensionMismatch(f"{name} must have shape {shape}")
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class CanonicalNC3D:
    """Constant 3D noncommutativity with the induced x-p correction
    sigma_ij = sum_k theta_ik eta_jk / 4."""

    theta: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_antisym("theta", self.theta, (3, 3)))
        object.__setattr__(self, "eta", _check_antisym("eta", self.eta, (3, 3)))

    @property
    def sigma(self) -> np.ndarray:
        return np.einsum("ik,jk->ij", self.theta, self.eta) / 4.0


@dataclass(frozen=True)
class RotInvEffective:
    """Rotationally and time-reversal invariant family, characterized only by
    the fluctuation means <theta^2> and <eta^2>.  No bracket is exposed; use
    the dedicated effective-Hamiltonian vector field in dynamics."""

    theta2_mean: float = 0.0
    eta2_mean: float = 0.0

    def __post_init__(self):
        if self.theta2_mean < 0 or self.eta2_mean < 0:
            raise ValueError("fluctuation means must be >= 0")


@dataclass(frozen=True)
class LieTimeCommuting:
    """{X_rho, X_tau} = t / kappa for one fixed axis pair (1-based indices),
    all other brackets canonical."""

    kappa: float
    rho: int = 1
    tau: int = 2

    def __post_init__(self):
        if self.kappa == 0:
            raise ValueError("kappa must be nonzero")
        if self.rho == self.tau or not {self.rho, self.tau} <= {1, 2, 3}:
            raise ValueError("rho, tau must be distinct axes in {1, 2, 3}")


@dataclass(frozen=True, eq=False)
class LieGeneral:
    """Lie-type brackets with constant structure arrays:

    {X_i, X_j} = theta0_ij t + theta_x[k, i, j] X_k
    {X_i, P_j} = d_ij + theta_bar[k, i, j] X_k + theta_tilde[k, i, j] P_k
    {P_i, P_j} = 0

    theta0 and theta_x are antisymmetric in the (i, j) pair, which is forced
    by bracket antisymmetry.  theta_bar and theta_tilde carry no symmetry:
    the consistent time-commuting families deform the x-p brackets on the
    rows of one distinguished axis only, and symmetrizing them breaks the
    Jacobi identity.
    """

    theta0: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    theta_x: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3)))
    theta_bar: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3)))
    theta_tilde: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3)))

    def __post_init__(self):
        object.__setattr__(self, "theta0", _check_antisym("theta0", self.theta0, (3, 3)))
        object.__setattr__(self, "theta_x", _check_antisym("theta_x", self.theta_x, (3, 3, 3)))
        object.__setattr__(self, "theta_bar", _check_shape("theta_bar", self.theta_bar, (3, 3, 3)))
        object.__setattr__(
            self, "theta_tilde", _check_shape("theta_tilde", self.theta_tilde, (3, 3, 3))
        )


def _axes0(axes: tuple[int, int, int]) -> tuple[int, int, int]:
    if sorted(axes) != [1, 2, 3]:
        raise ValueError("axes must be a permutation of (1, 2, 3)")
    return tuple(a - 1 for a in axes)  # type: ignore[return-value]


@dataclass(frozen=True)
class LieMiaoVariant1:
    """Jacobi-consistent Lie family with x-x brackets linear in t and in the
    coordinates; axes = (k, l, gamma), 1-based."""

    kappa: float
    kappa_tilde: float
    axes: tuple[int, int, int] = (1, 2, 3)

    def to_general(self) -> LieGeneral:
        k, l, g = _axes0(self.axes)
        theta0 = np.zeros((3, 3))
        theta_x = np.zeros((3, 3, 3))
        theta_tilde = np.zeros((3, 3, 3))
        ik, it = 1.0 / self.kappa, 1.0 / self.kappa_tilde
        theta0[k, l], theta0[l, k] = ik, -ik
        theta0[k, g], theta0[g, k] = -ik, ik
        theta0[l, g], theta0[g, l] = ik, -ik
        theta_x[l, k, g], theta_x[l, g, k] = it, -it
        theta_x[k, l, g], theta_x[k, g, l] = -it, it
        # x-p deformation sits on the gamma rows only; mirroring it onto the
        # (k, gamma) and (l, gamma) rows violates the Jacobi identity.
        theta_tilde[l, g, k] = -it
        theta_tilde[k, g, l] = it
        return LieGeneral(theta0=theta0, theta_x=theta_x, theta_tilde=theta_tilde)


@dataclass(frozen=True)
class LieMiaoVariant2:
    """Second Jacobi-consistent Lie family; adds x-p brackets linear in the
    coordinates through kappa_bar."""

    kappa: float
    kappa_tilde: float
    kappa_bar: float
    axes: tuple[int, int, int] = (1, 2, 3)

    def to_general(self) -> LieGeneral:
        k, l, g = _axes0(self.axes)
        theta0 = np.zeros((3, 3))
        theta_x = np.zeros((3, 3, 3))
        theta_bar = np.zeros((3, 3, 3))
        theta_tilde = np.zeros((3, 3, 3))
        ik, it, ib = 1.0 / self.kappa, 1.0 / self.kappa_tilde, 1.0 / self.kappa_bar
        theta0[k, g], theta0[g, k] = -ik, ik
        theta0[l, g], theta0[g, l] = ik, -ik
        theta_x[l, k, g], theta_x[l, g, k] = it, -it
        theta_x[k, l, g], theta_x[k, g, l] = -it, it
        # gamma-row-only x-p deformation, as in variant 1; the coordinate
        # parts of the two gamma-row brackets share one sign, which is what
        # makes the (gamma, P, P) Jacobi triples cancel.
        theta_tilde[l, g, k] = -it
        theta_tilde[k, g, l] = it
        theta_bar[l, g, k] = -ib
        theta_bar[k, g, l] = -ib
        return LieGeneral(
            theta0=theta0, theta_x=theta_x, theta_bar=theta_bar, theta_tilde=theta_tilde
        )


AlgebraSpec = (
    Ordinary
    | Gup1D
    | Gup3D
    | SnyderKempfGeneral
    | CanonicalNC2D
    | CanonicalNC3D
    | RotInvEffective
    | LieTimeCommuting
    | LieGeneral
    | LieMiaoVariant1
    | LieMiaoVariant2
)


def algebra_dim(spec: AlgebraSpec) -> int:
    if isinstance(spec, Ordinary):
        return spec.dim
    if isinstance(spec, Gup1D):
        return 1
    if isinstance(spec, CanonicalNC2D):
        return 2
    return 3


# --- structure matrix -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StructureMatrix:
    """Antisymmetric 2d x 2d bracket matrix evaluated at one phase point."""

    omega: np.ndarray

    @property
    def dim(self) -> int:
        return self.omega.shape[0] // 2

    @property
    def xx(self) -> np.ndarray:
        d = self.dim
        return self.omega[:d, :d]

    @property
    def xp(self) -> np.ndarray:
        d = self.dim
        return self.omega[:d, d:]

    @property
    def pp(self) -> np.ndarray:
        d = self.dim
        return self.omega[d:, d:]


def _assemble(xx: np.ndarray, xp: np.ndarray, pp: np.ndarray) -> np.ndarray:
    d = xp.shape[0]
    omega = np.zeros((2 * d, 2 * d))
    omega[:d, :d] = xx
    omega[:d, d:] = xp
    omega[d:, :d] = -xp.T
    omega[d:, d:] = pp
    return omega


def _upper_mirror(d: int, fill) -> np.ndarray:
    m = np.zeros((d, d))
    for i in range(d):
        for j in range(i + 1, d):
            v = fill(i, j)
            m[i, j] = v
            m[j, i] = -v
    return m


def omega_at(spec: AlgebraSpec, x: np.ndarray, p: np.ndarray, t: float) -> np.ndarray:
    """Raw Omega array; the hot path used by the integrator."""
    if isinstance(spec, (LieMiaoVariant1, LieMiaoVariant2)):
        spec = spec.to_general()
    d = algebra_dim(spec)
    if isinstance(spec, Ordinary):
        return _assemble(np.zeros((d, d)), np.eye(d), np.zeros((d, d)))
    if isinstance(spec, Gup1D):
        u = np.sqrt(spec.beta) * abs(float(p[0]))
        f = float(spec.func.f(u))
        return _assemble(np.zeros((1, 1)), np.array([[f]]), np.zeros((1, 1)))
    if isinstance(spec, Gup3D):
        xp = np.asarray(spec.func3(np.sqrt(spec.beta) * p), dtype=float)
        if xp.shape != (3, 3):
            raise DimensionMismatch("3D deformation family must return a 3x3 matrix")
        return _assemble(np.zeros((3, 3)), xp, np.zeros((3, 3)))
    if isinstance(spec, SnyderKempfGeneral):
        s = float(p @ p)
        g = float(spec.G(s))
        xx = _upper_mirror(3, lambda i, j: g * (x[i] * p[j] - x[j] * p[i]))
        xp = float(spec.f(s)) * np.eye(3) + float(spec.F(s)) * np.outer(p, p)
        return _assemble(xx, xp, np.zeros((3, 3)))
    if isinstance(spec, CanonicalNC2D):
        xx = _upper_mirror(2, lambda i, j: spec.theta)
        pp = _upper_mirror(2, lambda i, j: spec.eta)
        return _assemble(xx, np.eye(2), pp)
    if isinstance(spec, CanonicalNC3D):
        return _assemble(spec.theta.copy(), np.eye(3) + spec.sigma, spec.eta.copy())
    if isinstance(spec, LieTimeCommuting):
        r, s = spec.rho - 1, spec.tau - 1
        val = t / spec.kappa

        def fill(i, j):
            if (i, j) == (r, s):
                return val
            if (i, j) == (s, r):
                return -val
            return 0.0

        return _assemble(_upper_mirror(3, fill), np.eye(3), np.zeros((3, 3)))
    if isinstance(spec, LieGeneral):
        xx = _upper_mirror(
            3,
            lambda i, j: spec.theta0[i, j] * t + float(spec.theta_x[:, i, j] @ x),
        )
        xp = (
            np.eye(3)
            + np.einsum("kij,k->ij", spec.theta_bar, x)
            + np.einsum("kij,k->ij", spec.theta_tilde, p)
        )
        return _assemble(xx, xp, np.zeros((3, 3)))
    if isinstance(spec, RotInvEffective):
        raise UnsupportedBracket(
            "the rotationally invariant effective family has no bracket; "
            "its motion is generated by an effective Hamiltonian "
            "(see dynamics.eom_vector_field)"
        )
    raise TypeError(f"unknown algebra spec {type(spec).__name__}")


def structure_matrix(spec: AlgebraSpec, z: PhasePoint) -> StructureMatrix:
    if not isinstance(spec, RotInvEffective) and z.dim != algebra_dim(spec):
        raise DimensionMismatch(
            f"algebra is {algebra_dim(spec)}-dimensional, phase point is {z.dim}-dimensional"
        )
    return StructureMatrix(omega=omega_at(spec, z.x, z.p, z.t))


# --- brackets of scalar fields ----------------------------------------------


def _fd_gradient(func: Callable, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Central-difference gradient with relative step eps^(1/3)."""
    d = x.size
    grad = np.empty(2 * d)
    for a in range(2 * d):
        xa, pa = x.copy(), p.copy()
        arr, idx = (xa, a) if a < d else (pa, a - d)
        h = FD_STEP * max(1.0, abs(arr[idx]))
        arr[idx] += h
        fp = float(func(xa, pa))
        arr[idx] -= 2.0 * h
        fm = float(func(xa, pa))
        grad[a] = (fp - fm) / (2.0 * h)
    return grad


def poisson_bracket(
    f: Callable[[np.ndarray, np.ndarray], float],
    g: Callable[[np.ndarray, np.ndarray], float],
    spec: AlgebraSpec,
    z: PhasePoint,
    grad_f: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    grad_g: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> float:
    """{f, g} at z.  Gradients are analytic when supplied, otherwise central
    finite differences.  Antisymmetric in (f, g) to finite-difference accuracy."""
    omega = structure_matrix(spec, z).omega
    df = np.asarray(grad_f(z.x, z.p), dtype=float) if grad_f else _fd_gradient(f, z.x, z.p)
    dg = np.asarray(grad_g(z.x, z.p), dtype=float) if grad_g else _fd_gradient(g, z.x, z.p)
    if not (np.all(np.isfinite(df)) and np.all(np.isfinite(dg))):
        raise NonFiniteGradient("gradient evaluation produced nan or inf")
    return float(df @ omega @ dg)


# --- Jacobi identity --------------------------------------------------------


def _omega_derivatives(spec: AlgebraSpec, z: PhasePoint) -> tuple[np.ndarray, np.ndarray]:
    """Omega and its phase-space derivatives D[e] = d Omega / d z_e (central
    differences, relative step eps^(1/3); exact for constant brackets)."""
    d = z.dim
    omega = omega_at(spec, z.x, z.p, z.t)
    D = np.zeros((2 * d, 2 * d, 2 * d))
    for e in range(2 * d):
        xa, pa = z.x.copy(), z.p.copy()
        arr, idx = (xa, e) if e < d else (pa, e - d)
        h = FD_STEP * max(1.0, abs(arr[idx]))
        arr[idx] += h
        op = omega_at(spec, xa, pa, z.t)
        arr[idx] -= 2.0 * h
        om = omega_at(spec, xa, pa, z.t)
        D[e] = (op - om) / (2.0 * h)
    return omega, D


def _jacobi_tensor(spec: AlgebraSpec, z: PhasePoint) -> np.ndarray:
    """Cyclic sum {a,{b,c}} + {b,{c,a}} + {c,{a,b}} for all basis triples."""
    omega, D = _omega_derivatives(spec, z)
    T = np.einsum("ae,ebc->abc", omega, D)
    return T + np.transpose(T, (1, 2, 0)) + np.transpose(T, (2, 0, 1))


def jacobi_residual(
    spec: AlgebraSpec, z: PhasePoint, triple: tuple[int, int, int]
) -> float:
    """Jacobi residual for one basis-variable triple (indices into (x.., p..))."""
    a, b, c = triple
    return float(_jacobi_tensor(spec, z)[a, b, c])


def jacobi_max_residual(
    spec: AlgebraSpec,
    n_samples: int = 100,
    box: float = 1.0,
    t_range: tuple[float, float] = (0.0, 2.0),
    seed: int = 0,
) -> float:
    """Max |Jacobi residual| over all triples at random phase points in a box."""
    rng = np.random.default_rng(seed)
    d = algebra_dim(spec)
    worst = 0.0
    for _ in range(n_samples):
        z = PhasePoint(
            x=rng.uniform(-box, box, d),
            p=rng.uniform(-box, box, d),
            t=rng.uniform(*t_range),
        )
        worst = max(worst, float(np.max(np.abs(_jacobi_tensor(spec, z)))))
    return worst


# --- Snyder/Kempf consistency ------------------------------------------------


def snyder_kempf_constraint_residual(
    f: Callable[[float], float],
    F: Callable[[float], float],
    G: Callable[[float], float],
    P: float,
    fprime: Callable[[float], float] | None = None,
) -> float:
    """f (F - G) - 2 f' (f + F P^2) evaluated at s = P^2.

    The three parameter functions take the squared momentum magnitude as
    their argument and f' is the derivative with respect to that argument
    (supplied, or central finite difference).  The expression vanishes for
    every member of the generalized Snyder/Kempf family that satisfies the
    Jacobi identity.
    """
    s = float(P) ** 2
    fv, Fv, Gv = float(f(s)), float(F(s)), float(G(s))
    if fprime is not None:
        fp = float(fprime(s))
    else:
        h = FD_STEP * max(1.0, abs(s))
        fp = (float(f(s + h)) - float(f(s - h))) / (2.0 * h)
    res = fv * (Fv - Gv) - 2.0 * fp * (fv + Fv * s)
    if not np.isfinite(res):
        raise NonFiniteValue("constraint residual is not finite")
    return res


def kempf_family(beta: float, beta_prime: float) -> SnyderKempfGeneral:
    """Two-parameter minimal-length family; satisfies the Jacobi constraint
    for any (beta, beta_prime)."""

    def f(s):
        return 1.0 + beta * s

    def F(s):
        return beta_prime

    def G(s):
        return -((2.0 * beta - beta_prime) + (2.0 * beta + beta_prime) * beta * s) / (
            1.0 + beta * s
        )

    return SnyderKempfGeneral(f=f, F=F, G=G)


def snyder_family(beta: float) -> SnyderKempfGeneral:
    """The original one-parameter coordinate-noncommutative family."""
    return SnyderKempfGeneral(f=lambda s: 1.0, F=lambda s: beta, G=lambda s: beta)


def all_triples(dim: int):
    return itertools.combinations(range(2 * dim), 3)
