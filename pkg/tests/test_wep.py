import numpy as np
import pytest

from defphase.algebra import (
    CanonicalNC2D,
    Gup1D,
    LieMiaoVariant2,
    LieTimeCommuting,
    Ordinary,
    RotInvEffective,
)
from defphase.dynamics import FixedRK4
from defphase.errors import DegenerateDenominator, NonPositiveMass
from defphase.functions import REGISTRY
from defphase.wep import (
    CanonicalScaling,
    GupScaling,
    LieGeneralScaling,
    LieScaling,
    RotInvScaling,
    UniformFallScenario,
    apply_scaling,
    eotvos_from_accelerations,
    wep_divergence,
)

KEMPF = REGISTRY["kempf_quadratic"]
POLICY = FixedRK4(dt=1e-3)
MASSES = [1e-3, 1.0, 1e3]


class TestApplyScaling:
    def test_gup_beta_ratio(self):
        rule = GupScaling(gamma=0.3)
        b1 = apply_scaling(rule, 1.0)["beta"]
        b2 = apply_scaling(rule, 2.0)["beta"]
        assert b1 / b2 == pytest.approx(4.0, rel=1e-14)

    def test_canonical_unit_mass(self):
        rule = CanonicalScaling(gamma=0.7, alpha=0.2)
        p = apply_scaling(rule, 1.0)
        assert p["theta"] == 0.7 and p["eta"] == 0.2

    def test_lie_direct(self):
        assert apply_scaling(LieScaling(gamma_kappa=0.4), 5.0)["kappa"] == pytest.approx(2.0)

    def test_rotinv(self):
        p = apply_scaling(RotInvScaling(A=2.0, B=0.5), 2.0)
        assert p["theta2_mean"] == 0.5 and p["eta2_mean"] == 2.0

    def test_lie_general_bar_untouched(self):
        base = LieMiaoVariant2(kappa=10.0, kappa_tilde=20.0, kappa_bar=30.0).to_general()
        rule = LieGeneralScaling(
            gamma0=base.theta0,
            gamma_x=base.theta_x,
            gamma_tilde=base.theta_tilde,
            theta_bar=base.theta_bar,
        )
        p = apply_scaling(rule, 4.0)
        assert np.allclose(p["theta0"], base.theta0 / 4.0)
        assert np.allclose(p["theta_tilde"], base.theta_tilde / 4.0)
        assert np.array_equal(p["theta_bar"], base.theta_bar)

    def test_rejects_nonpositive_mass(self):
        with pytest.raises(NonPositiveMass):
            apply_scaling(GupScaling(0.1), 0.0)


def scen(dim, t_end=1.0):
    v0 = (0.3, -0.2, 0.1)[:dim]
    return UniformFallScenario(g=9.8, t_end=t_end, x0=(0.0,) * dim, v0=v0)


class TestWepDivergence:
    def test_ordinary_masses_agree(self):
        res = wep_divergence(Ordinary(2), scen(2), [0.5, 2.0], fixed_params={}, policy=POLICY)
        assert res.divergence <= 1e-10

    def test_canonical_fixed_violates(self):
        res = wep_divergence(
            CanonicalNC2D(0.0, 0.0), scen(2), [1.0, 2.0],
            fixed_params={"theta": 0.01, "eta": 0.05}, policy=POLICY,
        )
        assert res.divergence > 1e-3

    def test_canonical_scaled_recovers(self):
        res = wep_divergence(
            CanonicalNC2D(0.0, 0.0), scen(2), MASSES,
            rule=CanonicalScaling(gamma=0.01, alpha=0.1), policy=POLICY,
        )
        assert res.divergence <= 1e-9
        assert res.momentum_scaled_spread <= 1e-9

    def test_needs_rule_or_params(self):
        with pytest.raises(ValueError):
            wep_divergence(Ordinary(2), scen(2), [1.0, 2.0])

    def test_recovery_vs_violation_margin(self):
        """Fixed parameters produce divergence at least 1e3 times the scaled
        one across six decades of mass."""
        fam = RotInvEffective(0.0, 0.0)
        scaled = wep_divergence(fam, scen(3), MASSES, rule=RotInvScaling(A=0.0, B=0.05),
                                policy=POLICY)
        fixed = wep_divergence(fam, scen(3), MASSES,
                               fixed_params={"eta2_mean": 0.012}, policy=POLICY)
        assert fixed.divergence > 1e3 * max(scaled.divergence, 1e-12)

    def test_scaled_momentum_invariance_across_rules(self):
        """p(t)/m coincides across masses under every scaling rule."""
        cases = [
            (Gup1D(KEMPF, 0.0), scen(1), GupScaling(gamma=2e-3)),
            (CanonicalNC2D(0.0, 0.0), scen(2), CanonicalScaling(gamma=0.01, alpha=0.1)),
            (RotInvEffective(0.0, 0.0), scen(3), RotInvScaling(A=0.0, B=0.05)),
            (LieTimeCommuting(kappa=1.0), scen(3), LieScaling(gamma_kappa=50.0)),
        ]
        for fam, scenario, rule in cases:
            res = wep_divergence(fam, scenario, MASSES, rule=rule, policy=POLICY)
            assert res.momentum_scaled_spread <= 1e-9, type(rule).__name__


class TestEotvosReport:
    def test_equal_accelerations(self):
        assert eotvos_from_accelerations(9.8, 9.8).delta_a_over_a == 0.0

    def test_arithmetic(self):
        assert eotvos_from_accelerations(1.1, 0.9).delta_a_over_a == pytest.approx(0.2)

    def test_recompute_invariant(self):
        rep = eotvos_from_accelerations(1.07, 0.93)
        assert rep.recompute() == rep.delta_a_over_a

    def test_degenerate(self):
        with pytest.raises(DegenerateDenominator):
            eotvos_from_accelerations(1.0, -1.0)

    def test_composes_with_acceleration_series(self):
        from defphase.closedforms import gup_acceleration_first_order, gup_eotvos

        fp0, fpp0, beta, v, g = 1.0, 2.0, 1e-10, 1.0, 9.8
        m1, m2 = 2.0, 0.5
        a1 = gup_acceleration_first_order(fp0, fpp0, beta, m1, v, g)
        a2 = gup_acceleration_first_order(fp0, fpp0, beta, m2, v, g)
        got = eotvos_from_accelerations(a1, a2).delta_a_over_a
        want = gup_eotvos(fp0, fpp0, beta, m1, m2, v)
        # agree at series order; the shared denominator differs from 2g by
        # O(sqrt(beta) (m1 + m2) v)
        assert got == pytest.approx(want, rel=1e-4)
