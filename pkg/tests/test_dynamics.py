"""Curve formulas and no-arbitrage verdicts for both model families.

The constant-level specialisations must collapse to the classical one-factor
closed forms (Gaussian short rate for the Brownian-driven OU family, CIR for
the square-root family); those textbook formulas live in ``oracles`` and are
the ground truth here.
"""

import math

import numpy as np
import pytest

from admcurve import (
    BrownianMotion,
    CalibratedCurve,
    ExtendedCIRDynamics,
    GammaSubordinator,
    LevyOUDynamics,
)

from oracles import cir_bond_price, gaussian_short_rate_bond_price

TS = np.arange(0.5, 40.5, 0.5)


def make_ou(driver=None, x0=0.02, a=0.1, sigma=0.01, c=1.0):
    return LevyOUDynamics(driver or BrownianMotion(), x0, a, sigma, c)


def flat_curve(dynamics, level, horizon=40.0):
    return CalibratedCurve(dynamics, (0.0, horizon), (level,))


class TestClosedFormOracles:
    def test_brownian_ou_matches_gaussian_bond_price(self):
        x0, a, sigma, c, b = 0.02, 0.1, 0.01, 1.0, 0.03
        curve = flat_curve(make_ou(x0=x0, a=a, sigma=sigma, c=c), b)
        for t in TS:
            oracle = gaussian_short_rate_bond_price(x0, a, b, c * sigma**2, float(t))
            assert curve.value(float(t)) == pytest.approx(oracle, abs=1e-10)

    def test_time_change_scales_brownian_variance(self):
        # c acts as a pure variance multiplier for the Brownian driver
        x0, a, sigma, c, b = 0.01, 0.3, 0.008, 7.0, 0.02
        curve = flat_curve(make_ou(x0=x0, a=a, sigma=sigma, c=c), b)
        for t in (1.0, 10.0, 25.0):
            oracle = gaussian_short_rate_bond_price(x0, a, b, c * sigma**2, t)
            assert curve.value(t) == pytest.approx(oracle, abs=1e-10)

    def test_cir_matches_classical_bond_price(self):
        x0, a, sigma, b = 0.02, 0.5, 0.2, 0.03
        curve = flat_curve(ExtendedCIRDynamics(x0, a, sigma), b)
        for t in TS:
            assert curve.value(float(t)) == pytest.approx(
                cir_bond_price(x0, a, b, sigma, float(t)), abs=1e-9)


class TestCurveEvaluation:
    def test_value_at_origin_is_one(self):
        curve = flat_curve(make_ou(), 0.03)
        assert curve.value(0.0) == 1.0
        cir = flat_curve(ExtendedCIRDynamics(0.02, 1.0, 1.0), 0.01)
        assert cir.value(0.0) == 1.0

    def test_forward_at_origin_is_x0(self):
        curve = flat_curve(make_ou(x0=0.0123), 0.03)
        assert curve.forward(0.0) == pytest.approx(0.0123, abs=1e-15)

    def test_no_extrapolation(self):
        curve = flat_curve(make_ou(), 0.03, horizon=10.0)
        with pytest.raises(ValueError):
            curve.value(10.5)
        with pytest.raises(ValueError):
            curve.forward(-0.5)

    def test_monotone_for_positive_levels(self):
        curve = CalibratedCurve(make_ou(), (0.0, 5.0, 10.0), (0.03, 0.04))
        ts = np.arange(0.0, 10.0 + 1e-9, 0.05)
        vals = curve.value(ts)
        assert np.all(np.diff(vals) < 0.0)
        assert np.all((vals > 0.0) & (vals <= 1.0))

    def test_spot_rate_limit(self):
        curve = flat_curve(make_ou(x0=0.015), 0.03)
        assert curve.spot(0.0) == pytest.approx(0.015)
        assert curve.spot(5.0) == pytest.approx(-math.log(curve.value(5.0)) / 5.0)

    def test_forward_matches_log_derivative(self):
        gamma = GammaSubordinator(200.0)
        curve = CalibratedCurve(make_ou(driver=gamma, x0=0.005, a=0.05, sigma=0.8, c=5.0),
                                (0.0, 2.0, 6.0, 10.0), (0.01, -0.02, 0.03))
        h = 1e-5
        for t in np.arange(0.1, 10.0, 0.1):
            t = float(t)
            fd = -(math.log(curve.value(t + h)) - math.log(curve.value(t - h))) / (2 * h)
            assert curve.forward(t) == pytest.approx(fd, abs=1e-6)

    def test_cir_forward_matches_log_derivative(self):
        curve = CalibratedCurve(ExtendedCIRDynamics(0.01, 1.0, 1.0),
                                (0.0, 3.0, 7.0), (0.012, 0.02))
        h = 1e-5
        for t in np.arange(0.1, 7.0, 0.1):
            t = float(t)
            fd = -(math.log(curve.value(t + h)) - math.log(curve.value(t - h))) / (2 * h)
            assert curve.forward(t) == pytest.approx(fd, abs=1e-6)

    def test_forward_continuous_at_knots(self):
        gamma = GammaSubordinator(200.0)
        curve = CalibratedCurve(make_ou(driver=gamma, x0=0.005, a=0.05, sigma=0.8, c=5.0),
                                (0.0, 2.0, 6.0, 10.0), (0.01, -0.02, 0.03))
        eps = 1e-6
        for knot in (2.0, 6.0):
            left = curve.forward(knot - eps)
            right = curve.forward(knot + eps)
            assert abs(right - left) < 1e-4 * max(1.0, abs(left))


class TestInterpolantIdentities:
    def test_cir_eta_is_integrated_phi(self):
        dyn = ExtendedCIRDynamics(0.02, 0.5, 0.2)
        h = 1e-6
        for s in (0.3, 1.7, 8.0, 25.0):
            fd = (dyn._eta(s + h) - dyn._eta(s - h)) / (2 * h)
            assert abs(fd - dyn.a * dyn._phi(s)) < 1e-8

    def test_cir_phi_deriv(self):
        dyn = ExtendedCIRDynamics(0.02, 0.5, 0.2)
        h = 1e-6
        for s in (0.3, 1.7, 8.0):
            fd = (dyn._phi(s + h) - dyn._phi(s - h)) / (2 * h)
            assert abs(fd - dyn._phi_deriv(s)) < 1e-8

    def test_ou_interval_map_hits_segment_endpoints(self):
        """K_i evaluated at x = 1 and x = exp(-a dT) reproduces the forward
        at both ends of each knot interval."""
        gamma = GammaSubordinator(200.0)
        dyn = make_ou(driver=gamma, x0=0.002, a=0.02, sigma=1.0, c=10.0)
        knots = (0.0, 1.0, 4.0, 9.0)
        levels = (-0.5, -0.4, -0.45)
        for i in range(1, 4):
            left = dyn.forward(knots[i - 1], knots, levels) if i > 1 else dyn.x0
            right = dyn.forward(knots[i], knots, levels)
            g = math.exp(-dyn.a * (knots[i] - knots[i - 1]))
            assert dyn.ki(i, 1.0, knots, levels) == pytest.approx(left, abs=1e-10)
            assert dyn.ki(i, g, knots, levels) == pytest.approx(right, abs=1e-10)


class TestNoArbitrageVerdicts:
    def test_positive_levels_small_noise_admissible(self):
        curve = CalibratedCurve(make_ou(x0=0.02, a=0.5, sigma=0.001, c=1.0),
                                (0.0, 2.0, 5.0), (0.05, 0.06))
        verdict = curve.verify()
        assert verdict.admissible

    def test_endpoint_violation_reported_with_location(self):
        # a level pushed far enough negative drags the forward through zero
        dyn = make_ou(driver=GammaSubordinator(200.0), x0=0.005, a=0.3,
                      sigma=0.5, c=2.0)
        base = CalibratedCurve(dyn, (0.0, 2.0, 5.0, 8.0), (0.02, 0.03, 0.02))
        assert base.verify().admissible
        broken = CalibratedCurve(dyn, (0.0, 2.0, 5.0, 8.0), (0.02, -0.2, 0.02))
        verdict = broken.verify()
        assert not verdict.admissible
        assert verdict.interval == 2
        assert verdict.forward_value <= 0.0
        # grid scan confirms the forward actually dips negative
        ts = np.arange(2.0001, 5.0, 1e-3)
        fwd = [dyn.forward(float(t), broken.knots, broken.levels) for t in ts]
        assert min(fwd) < 0.0

    def test_interior_stationary_point_is_a_maximum(self):
        """For every supported driver the cumulant derivative is increasing,
        so K_i' is decreasing in x and an interior stationary point of the
        forward is a maximum: with positive endpoint forwards it can never
        produce a violation.  Verify the bisection finds it and that it
        dominates the endpoints."""
        dyn = make_ou(driver=GammaSubordinator(1.0), x0=0.08, a=1.0,
                      sigma=1.0, c=0.1)
        # forward rises off x0 then decays toward the level: K' flips sign
        curve = CalibratedCurve(dyn, (0.0, 3.0), (0.0,))
        verdict = curve.verify()
        assert verdict.admissible
        assert verdict.stationary_points, "expected an interior stationary point"
        sp = verdict.stationary_points[0]
        assert sp.interval == 1
        assert 0.0 < sp.t < 3.0
        left = curve.forward(0.0)
        right = curve.forward(3.0)
        assert sp.forward_value > max(left, right)
        # bisection really located the flat spot of the forward
        h = 1e-6
        slope = (curve.forward(sp.t + h) - curve.forward(sp.t - h)) / (2 * h)
        assert abs(slope) < 1e-6

    def test_zero_endpoint_forward_is_violation(self):
        """Exact zero at a knot counts as a violation (strict positivity)."""
        dyn = ExtendedCIRDynamics(0.01, 1.0, 1.0)
        verdict = dyn.verify((0.0, 1.0, 2.0), (0.02, 0.0))
        assert not verdict.admissible
        assert verdict.interval == 2

    def test_cir_positive_levels_admissible(self):
        dyn = ExtendedCIRDynamics(0.01, 1.0, 1.0)
        assert dyn.verify((0.0, 1.0, 2.0), (0.01, 0.02)).admissible

    def test_cir_negative_level_rejected(self):
        dyn = ExtendedCIRDynamics(0.01, 1.0, 1.0)
        verdict = dyn.verify((0.0, 1.0, 2.0), (0.01, -0.001))
        assert not verdict.admissible
        assert verdict.interval == 2

    def test_cir_admissible_implies_grid_positive_forward(self):
        dyn = ExtendedCIRDynamics(0.0097, 1.0, 1.0)
        knots = (0.0, 3.0, 5.0, 7.0, 10.0)
        levels = (0.0126, 0.0098, 0.0107, 0.0088)
        assert dyn.verify(knots, levels).admissible
        ts = np.arange(1e-3, 10.0, 1e-3)
        fwd = np.array([dyn.forward(float(t), knots, levels) for t in ts])
        assert np.all(fwd > 0.0)
