"""Acceptance gate: every release criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.  Criterion 2 is expected to fail in its second half: the
faithful inversion of the coordinate-mechanism bound with SI defaults gives
accuracy * R / v_orbit = 5.02e-7 s, outside the factor-3 window around the
nominal 1e-7 s order estimate (see notes in the repository README).
"""
import math
import time

import numpy as np
import pytest

from defphase.algebra import (
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
    antisym3,
    jacobi_max_residual,
    kempf_family,
)
from defphase.closedforms import (
    gup_acceleration_first_order,
    gup_eotvos_planck,
    gup_exact_kinetic,
    nc2d_kinetic_energy,
    nc2d_uniform_trajectory,
    rotinv_uniform_trajectory_scaled,
)
from defphase.composite import (
    CompositeSystem,
    Particle,
    com_cross_brackets,
    effective_canonical_params,
    kinetic_energy_report,
    soccer_ball_scaling,
)
from defphase.constants import C_LIGHT, PLANCK_MASS
from defphase.dynamics import (
    FixedRK4,
    RotInvEffectiveUniform,
    UniformField,
    integrate,
    velocity_to_momentum,
)
from defphase.functions import REGISTRY, isotropic_sqrt
from defphase.sem import parameter_bounds_from_llr
from defphase.wep import (
    CanonicalScaling,
    GupScaling,
    LieGeneralScaling,
    LieScaling,
    RotInvScaling,
    UniformFallScenario,
    eotvos_from_accelerations,
    wep_divergence,
)

KEMPF = REGISTRY["kempf_quadratic"]
WON18 = REGISTRY["won18"]
WON19 = REGISTRY["won19"]
G = 9.8


def _line(num: int, ok: bool, desc: str) -> None:
    print(f"\n[ACCEPTANCE {num}] {'PASS' if ok else 'FAIL'}: {desc}")


def test_criterion_1_gup_eotvos_magnitude():
    t0 = time.perf_counter()
    m1, m2 = 1.0, 0.1
    # speed derived so the quadratic term reaches 0.1 with the Planck-scale
    # minimal length
    coeff = (2.0 * KEMPF.fpp0 - KEMPF.fp0**2) * (m1**2 - m2**2) / (C_LIGHT**2 * PLANCK_MASS**2)
    v = math.sqrt(0.1 / coeff)
    delta = gup_eotvos_planck(KEMPF.fp0, KEMPF.fpp0, m1, m2, v, C_LIGHT, PLANCK_MASS)
    ok_magnitude = abs(delta - 0.1) <= 0.2 * 0.1

    gamma = (1.0 / (C_LIGHT * PLANCK_MASS)) * m1  # sqrt(beta) m universal
    # a 0.1 asymmetry needs a series argument of 0.16, so the validity
    # warning is part of the expected behavior here
    with pytest.warns(UserWarning):
        a1 = gup_acceleration_first_order(KEMPF.fp0, KEMPF.fpp0, (gamma / m1) ** 2, m1, v, G)
        a2 = gup_acceleration_first_order(KEMPF.fp0, KEMPF.fpp0, (gamma / m2) ** 2, m2, v, G)
    scaled = eotvos_from_accelerations(a1, a2).delta_a_over_a
    ok_scaled = abs(scaled) <= 1e-15
    elapsed = time.perf_counter() - t0
    ok = ok_magnitude and ok_scaled and elapsed < 1.0
    _line(1, ok, f"kempf-form asymmetry {delta:.4f} at v = {v:.4f} m/s "
                 f"(target 0.1 within 20%); scaled residual {scaled:.2e} <= 1e-15; "
                 f"{elapsed:.2f}s < 1s")
    assert ok_magnitude
    assert ok_scaled
    assert elapsed < 1.0


def test_criterion_2_llr_bounds():
    t0 = time.perf_counter()
    bounds = parameter_bounds_from_llr(1e-13)
    a, g = bounds["bound_alpha_diff"], bounds["bound_gamma_diff"]
    ok_alpha = 1e-20 / 3.0 <= a <= 3e-20
    ok_gamma = 1e-7 / 3.0 <= g <= 3e-7
    elapsed = time.perf_counter() - t0
    _line(2, ok_alpha and ok_gamma and elapsed < 1.0,
          f"momentum-mechanism bound {a:.3e} 1/s (nominal 1e-20, factor "
          f"{a / 1e-20:.2f}); coordinate-mechanism bound {g:.3e} s (nominal 1e-7, "
          f"factor {g / 1e-7:.2f}); {elapsed:.2f}s < 1s")
    assert elapsed < 1.0
    assert ok_alpha, f"alpha bound {a:.3e} outside [3.3e-21, 3e-20]"
    # Faithful inversion: accuracy * R / v_orbit = 5.02e-7 s with SI defaults.
    # The factor-3 window around 1e-7 s cannot contain it for any defensible
    # Sun-distance / orbital-speed pair; kept at its stated tolerance.
    assert ok_gamma, f"gamma bound {g:.3e} outside [3.3e-8, 3e-7]"


def test_criterion_3_closed_form_integrator_agreement():
    t0 = time.perf_counter()
    # canonical 2D family over two oscillation periods
    m, theta, eta = 1.0, 0.01, 0.5
    alg = CanonicalNC2D(theta, eta)
    ham = UniformField(m=m, g=G, axis=1, sign=-1.0)
    v0 = np.array([0.3, -0.2])
    p0 = velocity_to_momentum(alg, ham, np.zeros(2), v0)
    t_end = 4.0 * math.pi * m / eta
    traj = integrate(alg, ham, PhasePoint(np.zeros(2), p0), t_end, FixedRK4(dt=t_end / 20000))
    x1, x2 = nc2d_uniform_trajectory(m, theta, eta, G, 0.0, 0.0, v0[0], v0[1], traj.t)
    scale = max(np.max(np.abs(x1)), np.max(np.abs(x2)))
    dev_nc = max(np.max(np.abs(traj.x[:, 0] - x1)), np.max(np.abs(traj.x[:, 1] - x2))) / scale

    # rotationally invariant effective family
    B, m_r = 0.5, 2.0
    eta2 = B * m_r * m_r
    alg_r = RotInvEffective(0.0, eta2)
    ham_r = RotInvEffectiveUniform(m=m_r, g=G, eta2_mean=eta2)
    x0 = np.array([0.1, -0.2, 0.05])
    vr = np.array([0.3, 0.1, -0.4])
    traj_r = integrate(alg_r, ham_r, PhasePoint(x0, m_r * vr), 2.0, FixedRK4(dt=2e-4))
    ref_r = rotinv_uniform_trajectory_scaled(B, G, x0, vr, traj_r.t)
    dev_rot = float(np.max(np.abs(traj_r.x - ref_r)) / np.max(np.abs(ref_r)))

    # acceleration expansion to its order, with Richardson halving of beta
    def max_resid(beta):
        alg_g = Gup1D(WON19, beta)
        ham_g = UniformField(m=1.0, g=G, axis=1, sign=-1.0)
        p0g = velocity_to_momentum(alg_g, ham_g, np.array([0.0]), np.array([0.3]))
        tr = integrate(alg_g, ham_g, PhasePoint(np.array([0.0]), p0g), 1.0, FixedRK4(dt=1e-4))
        u = math.sqrt(beta) * np.abs(tr.p[:, 0])
        h = 1e-6
        Fv = WON19.f(u)
        Fp = (WON19.f(u + h) - WON19.f(u - h)) / (2 * h)
        exact = G * Fv * (Fv + u * Fp)
        series = np.array(
            [gup_acceleration_first_order(WON19.fp0, WON19.fpp0, beta, 1.0, v, G)
             for v in tr.v[:, 0]]
        )
        return float(np.max(np.abs(exact - series))) / G

    beta = 2e-8
    r1, r2 = max_resid(beta), max_resid(beta / 2.0)
    ratio = r1 / r2
    elapsed = time.perf_counter() - t0
    ok = (dev_nc <= 1e-8 and dev_rot <= 1e-8 and r1 <= 1e-8
          and abs(ratio - 2.0**1.5) <= 0.15 * 2.0**1.5 and elapsed < 10.0)
    _line(3, ok, f"canonical dev {dev_nc:.2e}, rot-inv dev {dev_rot:.2e}, "
                 f"series residual {r1:.2e} (all <= 1e-8); Richardson ratio "
                 f"{ratio:.3f} vs 2^1.5 = {2**1.5:.3f}; {elapsed:.1f}s < 10s")
    assert dev_nc <= 1e-8
    assert dev_rot <= 1e-8
    assert r1 <= 1e-8
    assert ratio == pytest.approx(2.0**1.5, rel=0.15)
    assert elapsed < 10.0


def test_criterion_4_wep_recovery_suite():
    t0 = time.perf_counter()
    masses = [1e-3, 1.0, 1e3]
    policy = FixedRK4(dt=1e-3)
    miao = LieMiaoVariant2(kappa=1000.0, kappa_tilde=2000.0, kappa_bar=5000.0).to_general()
    cases = {
        "gup_1d": (
            Gup1D(KEMPF, 0.0),
            UniformFallScenario(g=G, t_end=1.0, x0=(0.0,), v0=(0.3,)),
            GupScaling(gamma=2e-3),
            {"beta": 3.4e-10},
        ),
        "canonical_nc_2d": (
            CanonicalNC2D(0.0, 0.0),
            UniformFallScenario(g=G, t_end=1.0, x0=(0.0, 0.0), v0=(0.3, -0.2)),
            CanonicalScaling(gamma=0.01, alpha=0.1),
            {"theta": 0.01, "eta": 0.05},
        ),
        "rotinv_effective": (
            RotInvEffective(0.0, 0.0),
            UniformFallScenario(g=G, t_end=1.0, x0=(0.0,) * 3, v0=(0.3, -0.2, 0.1)),
            RotInvScaling(A=0.0, B=0.05),
            {"eta2_mean": 0.012, "theta2_mean": 0.0},
        ),
        "lie_time_commuting": (
            LieTimeCommuting(kappa=1.0),
            UniformFallScenario(g=G, t_end=1.0, x0=(0.0,) * 3, v0=(0.3, -0.2, 0.1)),
            LieScaling(gamma_kappa=50.0),
            {"kappa": 100.0},
        ),
        "lie_general": (
            miao,
            UniformFallScenario(g=G, t_end=1.0, x0=(0.1, -0.05, 0.2), v0=(0.3, -0.2, 0.1)),
            LieGeneralScaling(gamma0=miao.theta0, gamma_x=miao.theta_x,
                              gamma_tilde=miao.theta_tilde, theta_bar=miao.theta_bar),
            {"theta0": miao.theta0, "theta_x": miao.theta_x,
             "theta_tilde": miao.theta_tilde, "theta_bar": miao.theta_bar},
        ),
    }
    results = {}
    for name, (family, scenario, rule, fixed) in cases.items():
        scaled = wep_divergence(family, scenario, masses, rule=rule, policy=policy)
        fixed_r = wep_divergence(family, scenario, masses, fixed_params=fixed, policy=policy)
        results[name] = (scaled.divergence, fixed_r.divergence)
    elapsed = time.perf_counter() - t0
    ok = all(s <= 1e-8 and f >= 1e-3 for s, f in results.values()) and elapsed < 30.0
    detail = "; ".join(f"{k}: scaled {s:.1e}, fixed {f:.1e}" for k, (s, f) in results.items())
    _line(4, ok, f"{detail}; {elapsed:.1f}s < 30s")
    for name, (s, f) in results.items():
        assert s <= 1e-8, f"{name} scaled divergence {s:.2e}"
        assert f >= 1e-3, f"{name} fixed divergence {f:.2e}"
    assert elapsed < 30.0


def test_criterion_5_jacobi_suite():
    t0 = time.perf_counter()
    specs = {
        "ordinary": Ordinary(3),
        "canonical_nc_2d": CanonicalNC2D(0.3, 0.2),
        "canonical_nc_3d": CanonicalNC3D(
            antisym3(0.3, -0.1, 0.2), antisym3(0.1, 0.25, -0.15)
        ),
        "gup_1d": Gup1D(KEMPF, 0.05),
        "gup_3d": Gup3D(isotropic_sqrt, 0.05),
        "lie_time_commuting": LieTimeCommuting(0.7),
        "lie_miao_1": LieMiaoVariant1(1.3, 0.9),
        "lie_miao_2": LieMiaoVariant2(1.3, 0.9, 1.1),
        "snyder_kempf": kempf_family(0.05, 0.03),
    }
    residuals = {k: jacobi_max_residual(v, n_samples=100, box=1.0, seed=12)
                 for k, v in specs.items()}
    rng = np.random.default_rng(7)

    def rand_anti(shape):
        m = rng.uniform(-0.5, 0.5, shape)
        return m - np.transpose(m, (1, 0) if len(shape) == 2 else (0, 2, 1))

    corrupted = LieGeneral(
        theta0=rand_anti((3, 3)), theta_x=rand_anti((3, 3, 3)),
        theta_bar=rng.uniform(-0.5, 0.5, (3, 3, 3)),
        theta_tilde=rng.uniform(-0.5, 0.5, (3, 3, 3)),
    )
    corrupt_res = jacobi_max_residual(corrupted, n_samples=100, box=1.0, seed=12)
    elapsed = time.perf_counter() - t0
    worst = max(residuals.values())
    ok = worst <= 1e-8 and corrupt_res > 1e-4 and elapsed < 5.0
    _line(5, ok, f"worst valid residual {worst:.2e} <= 1e-8 over 100 points; "
                 f"corrupted structure constants flagged at {corrupt_res:.2e} > 1e-4; "
                 f"{elapsed:.1f}s < 5s")
    for name, r in residuals.items():
        assert r <= 1e-8, f"{name} residual {r:.2e}"
    assert corrupt_res > 1e-4
    assert elapsed < 5.0


def test_criterion_6_kinetic_energy_properties():
    t0 = time.perf_counter()
    theta, eta, v01, v02, t = 0.03, 0.4, 0.5, -0.2, 1.3
    fixed = CompositeSystem((
        Particle(1.0, {"theta": theta, "eta": eta}),
        Particle(2.0, {"theta": theta, "eta": eta}),
    ))
    rep = kinetic_energy_report(fixed, G, v01, v02, t)
    theta_eff = (1.0 * theta + 4.0 * theta) / 9.0
    eta_eff = 2.0 * eta
    direct = nc2d_kinetic_energy(3.0, theta_eff, eta_eff, G, v01, v02, t) - (
        nc2d_kinetic_energy(1.0, theta, eta, G, v01, v02, t)
        + nc2d_kinetic_energy(2.0, theta, eta, G, v01, v02, t)
    )
    ok_fixed = (abs(rep.mismatch) > 1e-6 * abs(rep.whole)
                and abs(rep.mismatch - direct) <= 1e-12 * abs(direct))

    gamma, alpha = 0.02, 0.3
    scaled = CompositeSystem(tuple(
        Particle(m, {"theta": gamma / m, "eta": alpha * m}) for m in (0.4, 1.1, 2.5)
    ))
    rep_s = kinetic_energy_report(scaled, G, v01, v02, t)
    ok_scaled = abs(rep_s.mismatch) <= 1e-12 * abs(rep_s.whole)

    rng = np.random.default_rng(5)
    M, gam, v = 5.0, 0.03, 0.8
    whole = gup_exact_kinetic(WON18, gam, M, v)
    ok_exact = True
    for _ in range(20):
        k = rng.integers(2, 6)
        cuts = np.sort(rng.uniform(0.1, 0.9, k - 1)) * M
        parts = np.diff(np.concatenate([[0.0], cuts, [M]]))
        total = sum(gup_exact_kinetic(WON18, gam, m, v) for m in parts)
        ok_exact &= abs(total - whole) <= 1e-12 * abs(whole)
    elapsed = time.perf_counter() - t0
    ok = ok_fixed and ok_scaled and ok_exact and elapsed < 1.0
    _line(6, ok, f"fixed-parameter mismatch {rep.mismatch:.4e} J matches direct "
                 f"evaluation to 1e-12; scaled mismatch {rep_s.mismatch:.2e} <= "
                 f"1e-12 x whole; exact partition additivity to 1e-12; "
                 f"{elapsed:.2f}s < 1s")
    assert ok_fixed
    assert ok_scaled
    assert ok_exact
    assert elapsed < 1.0


def test_criterion_7_soccer_ball_exponents():
    t0 = time.perf_counter()
    n_values = [2, 4, 8, 16, 32]
    fixed = soccer_ball_scaling(WON18, n_values, 1.0, 0.5, "fixed_beta", beta=1e-8)
    scaled = soccer_ball_scaling(WON18, n_values, 1.0, 0.5, "scaled", gamma=1e-4)
    elapsed = time.perf_counter() - t0
    ok = (abs(fixed.first_slope - 2.0) <= 1e-6 and abs(fixed.second_slope - 3.0) <= 1e-6
          and abs(scaled.first_slope - 1.0) <= 1e-6 and abs(scaled.second_slope - 1.0) <= 1e-6
          and elapsed < 1.0)
    _line(7, ok, f"fixed-parameter slopes ({fixed.first_slope:.6f}, "
                 f"{fixed.second_slope:.6f}) vs (2, 3); scaled slopes "
                 f"({scaled.first_slope:.6f}, {scaled.second_slope:.6f}) vs (1, 1); "
                 f"{elapsed:.2f}s < 1s")
    assert fixed.first_slope == pytest.approx(2.0, abs=1e-6)
    assert fixed.second_slope == pytest.approx(3.0, abs=1e-6)
    assert scaled.first_slope == pytest.approx(1.0, abs=1e-6)
    assert scaled.second_slope == pytest.approx(1.0, abs=1e-6)
    assert elapsed < 1.0


def test_criterion_8_effective_parameter_identities():
    t0 = time.perf_counter()
    gamma, alpha, M = 0.05, 0.2, 7.3
    rng = np.random.default_rng(21)
    ok_eff = True
    for _ in range(50):
        k = rng.integers(2, 8)
        cuts = np.sort(rng.uniform(0.05, 0.95, k - 1)) * M
        masses = np.diff(np.concatenate([[0.0], cuts, [M]]))
        sys_ = CompositeSystem(tuple(
            Particle(m, {"theta": gamma / m, "eta": alpha * m}) for m in masses
        ))
        theta_eff, eta_eff = effective_canonical_params(sys_)
        ok_eff &= abs(theta_eff - gamma / M) <= 1e-12 * (gamma / M)
        ok_eff &= abs(eta_eff - alpha * M) <= 1e-12 * (alpha * M)
        ok_eff &= com_cross_brackets(sys_).max_abs <= 1e-14

    perturbed = CompositeSystem((
        Particle(0.5, {"theta": gamma / 0.5 * 1.01, "eta": alpha * 0.5}),
        Particle(1.5, {"theta": gamma / 1.5, "eta": alpha * 1.5}),
    ))
    ok_perturbed = com_cross_brackets(perturbed).max_abs > 1e-5
    elapsed = time.perf_counter() - t0
    ok = ok_eff and ok_perturbed and elapsed < 1.0
    _line(8, ok, f"effective parameters equal gamma/M and alpha*M over 50 random "
                 f"partitions to 1e-12; cross brackets null under scaling and "
                 f"nonzero when perturbed; {elapsed:.2f}s < 1s")
    assert ok_eff
    assert ok_perturbed
    assert elapsed < 1.0
