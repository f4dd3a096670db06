import numpy as np
import pytest

from defphase.constants import AU, G, M_SUN, V_EARTH_ORBIT
from defphase.errors import GeometryViolation
from defphase.sem import (
    LLR_ACCURACY,
    SunEarthMoonParams,
    parameter_bounds_from_llr,
    sem_accelerations,
    sem_eotvos,
)


class TestGeometry:
    def test_defaults_are_sane(self):
        p = SunEarthMoonParams()
        assert p.R_em / p.R < 1e-2

    def test_rejects_bad_masses(self):
        with pytest.raises(GeometryViolation):
            SunEarthMoonParams(m_e=-1.0)

    def test_warns_on_wide_separation(self):
        with pytest.warns(UserWarning):
            SunEarthMoonParams(R_em=0.5 * AU)


class TestAccelerations:
    def test_newtonian_limit(self):
        acc = sem_accelerations(SunEarthMoonParams())
        assert acc.a_e == acc.a_m == pytest.approx(-G * M_SUN / AU**2)

    def test_neglected_terms_are_small(self):
        p = SunEarthMoonParams.from_scaling_constants(
            alpha_e=1e-20, alpha_m=0.0, gamma_e=1e-7, gamma_m=0.0
        )
        acc = sem_accelerations(p)
        theta_term = p.theta_e * G * p.m_s * p.m_e * p.v_e / p.R**3
        # body 1 keeps only the transverse radial-velocity product:
        # relative size 3 R_em^2 / (4 R^2), about 5e-6
        assert abs(acc.neglected_e / theta_term) == pytest.approx(
            3.0 * p.R_em**2 / (4.0 * p.R**2), rel=1e-12
        )
        assert abs(acc.neglected_e / theta_term) < 1e-5
        p_m = SunEarthMoonParams.from_scaling_constants(
            alpha_e=0.0, alpha_m=0.0, gamma_e=0.0, gamma_m=1e-7
        )
        acc_m = sem_accelerations(p_m)
        theta_term_m = p_m.theta_m * G * p_m.m_s * p_m.m_m * p_m.v_e / p_m.R**3
        # body 2 picks up the orbital-velocity product, about 1.3e-4
        assert 1e-5 < abs(acc_m.neglected_m / theta_term_m) < 1e-3


class TestEotvos:
    def test_scaling_gives_zero(self):
        p = SunEarthMoonParams.from_scaling_constants(
            alpha_e=3e-21, alpha_m=3e-21, gamma_e=5e-8, gamma_m=5e-8
        )
        rep = sem_eotvos(p)
        assert abs(rep.delta_a_over_a) <= 1e-25
        assert rep.metadata["within_llr"]

    def test_eta_component_order(self):
        p = SunEarthMoonParams.from_scaling_constants(
            alpha_e=1e-20, alpha_m=0.0, gamma_e=0.0, gamma_m=0.0
        )
        rep = sem_eotvos(p)
        # (v_e R^2 / G m_s) * 1e-20 = about 5e-14
        assert rep.components["eta"] == pytest.approx(5.02e-14, rel=0.05)
        assert rep.components["theta"] == 0.0

    def test_theta_component_order(self):
        p = SunEarthMoonParams.from_scaling_constants(
            alpha_e=0.0, alpha_m=0.0, gamma_e=1e-7, gamma_m=0.0
        )
        rep = sem_eotvos(p)
        assert rep.components["theta"] == pytest.approx(2.0e-14, rel=0.05)

    def test_scaling_nullity_random_bodies(self):
        """Bodies with common per-mass constants give an identically zero
        asymmetry, whatever their masses and speed; the cancellation is
        checked against the size of the uncancelled one-body terms."""
        rng = np.random.default_rng(8)
        for _ in range(100):
            m1, m2 = rng.uniform(1e20, 1e26, 2)
            v = rng.uniform(1e3, 5e4)
            alpha, gamma = 10.0 ** rng.uniform(-22, -18), 10.0 ** rng.uniform(-9, -6)
            p = SunEarthMoonParams(
                m_e=m1, m_m=m2, v_e=v,
                theta_e=gamma / m1, eta_e=alpha * m1,
                theta_m=gamma / m2, eta_m=alpha * m2,
            )
            rep = sem_eotvos(p)
            one_body = (v * p.R**2 / (p.G * p.m_s)) * alpha + (v / p.R) * gamma
            assert abs(rep.delta_a_over_a) <= 1e-12 * one_body

    def test_llr_gate_flag(self):
        p = SunEarthMoonParams.from_scaling_constants(
            alpha_e=1e-18, alpha_m=0.0, gamma_e=0.0, gamma_m=0.0
        )
        rep = sem_eotvos(p)
        assert abs(rep.delta_a_over_a) > LLR_ACCURACY
        assert not rep.metadata["within_llr"]

    def test_signed_recompute_magnitude(self):
        p = SunEarthMoonParams.from_scaling_constants(
            alpha_e=1e-20, alpha_m=0.0, gamma_e=0.0, gamma_m=0.0
        )
        rep = sem_eotvos(p)
        # source-positive convention: the signed two-body evaluation carries
        # the opposite sign but the same magnitude to the neglected order
        assert abs(rep.recompute()) == pytest.approx(abs(rep.delta_a_over_a), rel=1e-6)
        assert rep.recompute() == pytest.approx(-rep.delta_a_over_a, rel=1e-6)


class TestBounds:
    def test_values_with_si_defaults(self):
        b = parameter_bounds_from_llr(1e-13)
        # circular-orbit identity: both coefficients are R / v_e and its inverse
        assert b["bound_alpha_diff"] == pytest.approx(1.99e-20, rel=0.01)
        assert b["bound_gamma_diff"] == pytest.approx(5.02e-7, rel=0.01)

    def test_linearity(self):
        b1 = parameter_bounds_from_llr(1e-13)
        b2 = parameter_bounds_from_llr(2e-13)
        assert b2["bound_alpha_diff"] == pytest.approx(2 * b1["bound_alpha_diff"], rel=1e-14)
        assert b2["bound_gamma_diff"] == pytest.approx(2 * b1["bound_gamma_diff"], rel=1e-14)

    def test_bound_saturation_consistency(self):
        """Parameters at the bound reproduce the accuracy they were derived
        from."""
        acc = 1e-13
        b = parameter_bounds_from_llr(acc)
        p = SunEarthMoonParams.from_scaling_constants(
            alpha_e=b["bound_alpha_diff"], alpha_m=0.0, gamma_e=0.0, gamma_m=0.0
        )
        assert sem_eotvos(p).components["eta"] == pytest.approx(acc, rel=1e-12)
        p2 = SunEarthMoonParams.from_scaling_constants(
            alpha_e=0.0, alpha_m=0.0, gamma_e=b["bound_gamma_diff"], gamma_m=0.0
        )
        assert sem_eotvos(p2).components["theta"] == pytest.approx(acc, rel=1e-12)

    def test_rejects_nonpositive_accuracy(self):
        with pytest.raises(ValueError):
            parameter_bounds_from_llr(0.0)
