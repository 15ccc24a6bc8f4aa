"""Market-fit system assembly and the level bootstrap."""

import numpy as np
import pytest

from admcurve import (
    BootstrapConfig,
    ExtendedCIRDynamics,
    FlatDiscountCurve,
    GammaSubordinator,
    InadmissibleCurveError,
    LevyOUDynamics,
    NoSolutionError,
    PinnedValue,
    assemble_cds_system,
    assemble_ois_system,
    bootstrap,
    cds_quotes,
    convex_mix,
    ois_model_free_bounds,
    ois_quotes,
    repricing_errors,
    residuals_for,
)
from conftest import (
    CDS_FLAT_RATE,
    CDS_MATURITIES,
    CDS_RECOVERY,
    CDS_SPREADS,
    OIS_MATURITIES,
    OIS_RATES,
)

from oracles import solve_exact_prefix

DISCOUNT = FlatDiscountCurve(CDS_FLAT_RATE)


def table_dynamics(c=10.0):
    return LevyOUDynamics(GammaSubordinator(200.0), 0.00063, 0.01, 1.0, c)


class TestSystemAssembly:
    def test_single_instrument(self):
        sys_ = assemble_ois_system(ois_quotes([1], [0.01]))
        assert sys_.A.shape == (1, 1)
        assert sys_.A[0, 0] == pytest.approx(1.01)
        assert sys_.B[0] == 1.0

    def test_long_strip_shape_and_span(self, ois_strip_2013):
        sys_ = assemble_ois_system(ois_strip_2013)
        assert sys_.A.shape == (14, 40)
        assert sys_.column_span(10) == 15      # the 15y row touches 1..15
        for i, pi in enumerate(ois_strip_2013.schedule.standard_indices):
            assert sys_.column_span(i) == pi
        assert np.linalg.matrix_rank(sys_.A) == 14

    def test_forward_substitution_reproduces_prefix(self, ois_strip_2013):
        sys_ = assemble_ois_system(ois_strip_2013)
        head = sys_.A[:10, :10]
        vals = np.linalg.solve(head, sys_.B[:10])
        assert np.max(np.abs(vals - solve_exact_prefix(ois_strip_2013))) < 1e-12

    def test_cds_rows(self, aig_cds_strip_2007):
        sys_ = assemble_cds_system(aig_cds_strip_2007, DISCOUNT)
        assert sys_.A.shape == (4, 40)
        assert np.all(sys_.B == 1.0 - CDS_RECOVERY)
        # maturity column carries premium + recovery terms
        pd10 = float(DISCOUNT.value(10.0))
        expected = CDS_SPREADS[3] * 0.25 * pd10 + (1.0 - CDS_RECOVERY) * pd10
        assert sys_.A[3, 39] == pytest.approx(expected, abs=1e-15)


class TestCDSResidualIdentities:
    def test_unit_survival_reduces_to_premium_leg(self, aig_cds_strip_2007):
        """With survival pinned at one, protection terms cancel against the
        recovery budget and the residual is exactly the premium annuity value."""
        res = residuals_for(aig_cds_strip_2007, DISCOUNT)
        value = res.residual(0, lambda t: 1.0)
        sched = aig_cds_strip_2007.schedule
        annuity = sum(0.25 * float(DISCOUNT.value(t)) for t in sched.dates[:12])
        assert value == pytest.approx(CDS_SPREADS[0] * annuity, abs=1e-10)

    def test_full_recovery_limit(self):
        """As recovery approaches one the protection budget vanishes and the
        residual at unit survival reduces to the bare premium leg."""
        q = cds_quotes(CDS_MATURITIES, CDS_SPREADS, recovery=1.0 - 1e-9)
        sys_ = assemble_cds_system(q, DISCOUNT)
        assert np.max(np.abs(sys_.B)) < 1e-8
        res = residuals_for(q, DISCOUNT)
        annuity = sum(0.25 * float(DISCOUNT.value(t))
                      for t in q.schedule.dates[:12])
        assert res.residual(0, lambda t: 1.0) == pytest.approx(
            CDS_SPREADS[0] * annuity, abs=1e-9)

    def test_panel_doubling_stable(self, aig_cds_strip_2007):
        dyn = ExtendedCIRDynamics(0.0097, 1.0, 1.0)
        curve = bootstrap(residuals_for(aig_cds_strip_2007, DISCOUNT), dyn)
        fine = residuals_for(aig_cds_strip_2007, DISCOUNT, panels_per_period=2)
        for row in range(4):
            assert abs(fine.residual(row, curve.value)) < 1e-10


class TestBootstrap:
    def test_table_strip_levyou(self, ois_strip_2013):
        res = residuals_for(ois_strip_2013)
        curve = bootstrap(res, table_dynamics())
        assert len(curve.levels) == 14
        errs = repricing_errors(res, curve)
        assert np.max(errs) < 1e-8
        assert curve.verify().admissible

    def test_single_instrument_model_independent(self):
        """A one-quote strip pins P(T_1) = 1/(1 + S d) whatever the model.

        Market fit is model-independent even when the chosen parameters make
        the fit inadmissible, so enforcement stays off here.
        """
        q = ois_quotes([1], [0.0072])
        target = 1.0 / (1.0 + 0.0072)
        cfg = BootstrapConfig(enforce_no_arbitrage=False)
        for dyn in (table_dynamics(), ExtendedCIRDynamics(0.005, 1.0, 1.0),
                    LevyOUDynamics(GammaSubordinator(50.0), 0.02, 0.3, 0.4, 2.0)):
            curve = bootstrap(residuals_for(q), dyn, cfg)
            assert curve.value(1.0) == pytest.approx(target, abs=1e-10)

    def test_determinism(self, ois_strip_2013):
        res = residuals_for(ois_strip_2013)
        a = bootstrap(res, table_dynamics())
        b = bootstrap(res, table_dynamics())
        assert a.levels == b.levels

    def test_locality(self):
        """Perturbing quote k leaves levels 1..k-1 bit-identical."""
        base = bootstrap(residuals_for(ois_quotes(OIS_MATURITIES, OIS_RATES)),
                         table_dynamics())
        bumped_rates = list(OIS_RATES)
        bumped_rates[7] += 0.0005
        bumped = bootstrap(residuals_for(ois_quotes(OIS_MATURITIES, bumped_rates)),
                           table_dynamics())
        assert bumped.levels[:7] == base.levels[:7]
        assert bumped.levels[7] != base.levels[7]

    def test_no_solution_reported_with_step(self):
        # a severe arbitrage in the quotes leaves no root in the bracket
        rates = list(OIS_RATES)
        rates[11] = 1e-7
        res = residuals_for(ois_quotes(OIS_MATURITIES, rates))
        with pytest.raises((NoSolutionError, InadmissibleCurveError)) as err:
            bootstrap(res, table_dynamics())
        assert getattr(err.value, "step") == 12

    def test_inadmissible_stops_at_first_bad_step(self):
        # negative level is inadmissible for the square-root family
        rates = list(OIS_RATES)
        rates[1] = 0.000011      # forces the 2y level negative
        res = residuals_for(ois_quotes(OIS_MATURITIES, rates))
        dyn = ExtendedCIRDynamics(0.00063, 1.0, 1.0)
        with pytest.raises(InadmissibleCurveError) as err:
            bootstrap(res, dyn)
        assert err.value.step == 2

    def test_enforcement_can_be_disabled(self):
        rates = list(OIS_RATES)
        rates[1] = 0.000011
        res = residuals_for(ois_quotes(OIS_MATURITIES, rates))
        dyn = ExtendedCIRDynamics(0.00063, 1.0, 1.0)
        cfg = BootstrapConfig(enforce_no_arbitrage=False)
        curve = bootstrap(res, dyn, cfg)
        assert curve.levels[1] < 0.0
        assert not curve.verify().admissible

    def test_cds_strip_cir(self, aig_cds_strip_2007):
        res = residuals_for(aig_cds_strip_2007, DISCOUNT)
        curve = bootstrap(res, ExtendedCIRDynamics(0.0097, 1.0, 1.0))
        assert all(b > 0 for b in curve.levels)
        assert np.max(repricing_errors(res, curve)) < 1e-8

    def test_model_independent_pvs(self, ois_strip_2013):
        """Two admissible fits assign the same PV to every building instrument."""
        res = residuals_for(ois_strip_2013)
        c1 = bootstrap(res, table_dynamics(1.0))
        c2 = bootstrap(res, table_dynamics(100.0))
        for row in range(14):
            pv1 = res.residual(row, c1.value)
            pv2 = res.residual(row, c2.value)
            assert abs(pv1 - pv2) < 2e-8

    def test_bounds_containment(self, ois_strip_2013):
        bounds = ois_model_free_bounds(ois_strip_2013)
        curve = bootstrap(residuals_for(ois_strip_2013), table_dynamics())
        for e in bounds.entries:
            v = curve.value(e.maturity)
            assert e.lower - 1e-9 <= v <= e.upper + 1e-9

    def test_rectangle_cover_on_quarter_grid(self, ois_strip_2013):
        """Every admissible fit stays inside the rectangle union everywhere,
        not just at the quoted maturities."""
        bounds = ois_model_free_bounds(ois_strip_2013)
        curve = bootstrap(residuals_for(ois_strip_2013), table_dynamics())
        for t in np.arange(0.0, 40.0 + 1e-9, 0.25):
            lo, hi = bounds.envelope(float(t))
            v = float(curve.value(float(t)))
            assert lo - 1e-9 <= v <= hi + 1e-9

    def test_rejects_increasing_discount_curve(self, aig_cds_strip_2007):
        class Rising:
            def value(self, t):
                return np.exp(0.01 * np.asarray(t, dtype=float))

            def forward(self, t):
                return np.full_like(np.asarray(t, dtype=float), -0.01)

        with pytest.raises(ValueError):
            residuals_for(aig_cds_strip_2007, Rising())


class TestPinnedValues:
    def test_pin_is_hit_and_quotes_still_reprice(self, ois_strip_2013):
        """Nudging the curve at a non-quoted date via a synthetic exact-value
        instrument keeps every real quote repriced and the fit admissible."""
        res = residuals_for(ois_strip_2013)
        base = bootstrap(res, table_dynamics())
        target = 0.995 * float(base.value(12.0))
        bounds = ois_model_free_bounds(ois_strip_2013)
        lo, hi = bounds.envelope(12.0)
        assert lo < target < hi
        curve = bootstrap(res, table_dynamics(), pins=(PinnedValue(12.0, target),))
        assert len(curve.levels) == 15
        assert curve.knots[11] == 12.0
        assert curve.value(12.0) == pytest.approx(target, abs=1e-10)
        assert np.max(repricing_errors(res, curve)) < 1e-8
        assert curve.verify().admissible

    def test_aggressive_pin_is_caught_by_enforcement(self, ois_strip_2013):
        """A pin deep toward the envelope floor forces a negative forward
        somewhere and the walk stops at the offending step."""
        res = residuals_for(ois_strip_2013)
        base = bootstrap(res, table_dynamics())
        target = 0.98 * float(base.value(12.0))
        with pytest.raises(InadmissibleCurveError):
            bootstrap(res, table_dynamics(), pins=(PinnedValue(12.0, target),))

    def test_pin_on_existing_maturity_rejected(self, ois_strip_2013):
        res = residuals_for(ois_strip_2013)
        with pytest.raises(ValueError):
            bootstrap(res, table_dynamics(), pins=(PinnedValue(15.0, 0.74),))


@pytest.fixture(scope="module")
def pair(ois_strip_2013):
    res = residuals_for(ois_strip_2013)
    return (bootstrap(res, table_dynamics(1.0)),
            bootstrap(res, table_dynamics(100.0)), res)


class TestConvexMix:

    def test_alpha_zero_is_second_curve(self, pair):
        c1, c2, _ = pair
        ts = [float(t) for t in range(1, 41)]
        mix = convex_mix(c1, c2, 0.0, ts)
        for t in ts:
            assert mix.value(t) == pytest.approx(float(c2.value(t)), abs=1e-15)

    def test_half_mix_reprices(self, pair):
        c1, c2, res = pair
        ts = [float(t) for t in range(1, 41)]
        mix = convex_mix(c1, c2, 0.5, ts)
        errs = repricing_errors(res, lambda t: mix.value(t))
        assert np.max(errs) < 1e-8

    def test_mix_monotone(self, pair):
        c1, c2, _ = pair
        ts = [0.25 * k for k in range(1, 161)]
        mix = convex_mix(c1, c2, 0.5, ts)
        vals = list(mix.values)
        assert all(b <= a + 1e-14 for a, b in zip(vals, vals[1:]))

    def test_mismatched_spans_rejected(self, pair):
        c1, _, _ = pair
        short = bootstrap(residuals_for(ois_quotes([1, 2], OIS_RATES[:2])),
                          table_dynamics())
        with pytest.raises(ValueError):
            convex_mix(c1, short, 0.5, [1.0, 2.0])
