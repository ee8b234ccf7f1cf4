import math

import numpy as np
import pytest

from conemetrics import (
    LorentzCone,
    Metric,
    NonSmoothPointError,
    Orthant,
    ScalarFunctions,
    SymPDCone,
    bound_hilbert,
    bound_thompson,
    check_busemann,
    check_contraction,
    check_semihyperbolic,
    derivative_table,
    fd_derivative_table,
    hilbert_opnorm_analytic,
    hilbert_opnorm_bruteforce,
    hilbert_opnorm_numeric,
    hilbert_opnorm_pair,
    make_geodesic,
    thompson_opnorm_analytic,
    thompson_opnorm_numeric,
    unit_geodesic_map,
)
from conftest import random_point, smooth_orthant_coords


class TestScalarFunctions:
    def test_gamma_decreasing_with_value_s_at_one(self):
        sf = ScalarFunctions(0.4)
        grid = np.linspace(0.0, 5.0, 200)
        values = [sf.gamma(t) for t in grid]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert sf.gamma(1.0) == 0.4
        assert sf.gamma(1.0 - 1e-12) == pytest.approx(0.4, abs=1e-9)

    def test_theta_nonnegative_with_double_zero(self):
        sf = ScalarFunctions(0.6)
        assert sf.theta(1.0) == pytest.approx(0.0, abs=1e-15)
        for t in np.linspace(0.0, 6.0, 300):
            assert sf.theta(t) >= -1e-15
        # quadratic flatness at t=1
        assert sf.theta(1.0 + 1e-5) <= 1e-9
        assert sf.theta(1.0 - 1e-5) <= 1e-9

    def test_cap_gamma_decreasing_with_limit_s(self):
        sf = ScalarFunctions(0.25)
        grid = np.linspace(1e-6, 1.0 - 1e-9, 150)
        values = [sf.cap_gamma(t) for t in grid]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(0.25, abs=1e-8)

    def test_exponent_validation(self):
        with pytest.raises(ValueError):
            ScalarFunctions(1.0)


class TestUnitGeodesicMap:
    def test_fixed_point_at_ones(self):
        assert np.allclose(unit_geodesic_map(np.ones(4), 0.3), np.ones(4), rtol=1e-15)

    def test_one_dimensional_power(self):
        assert unit_geodesic_map(np.array([3.0]), 0.5)[0] == pytest.approx(math.sqrt(3.0), rel=1e-15)

    def test_two_coordinates(self):
        assert np.allclose(unit_geodesic_map(np.array([1.0, 4.0]), 0.5), [1.0, 2.0], atol=1e-14)

    def test_agrees_with_geodesic_module(self, rng):
        o = Orthant(5)
        ones = o.point(np.ones(5))
        for _ in range(50):
            x = random_point(o, rng, spread=1.5)
            s = rng.uniform(0.05, 0.95)
            via_geodesic = make_geodesic(ones, x).evaluate(s).coords
            direct = unit_geodesic_map(x.coords, s)
            assert np.max(np.abs(direct - via_geodesic)) <= 1e-12 * np.max(via_geodesic)


class TestDerivativeTable:
    def test_two_dimensional_identity(self, rng):
        for _ in range(10):
            x = np.exp(rng.uniform(-1, 1, 2))
            if abs(x[0] - x[1]) < 1e-6:
                continue
            table = derivative_table(x, 0.7)
            assert np.allclose(table.h, 0.7 * np.eye(2), atol=1e-15)

    def test_middle_entry_closed_form(self):
        # x = (1, 2, 4), s = 1/2: E = 2(2-1) + 4 - 2 = 4 gives h[1][1] = 1/2.
        table = derivative_table(np.array([1.0, 2.0, 4.0]), 0.5)
        assert table.h[1][1] == pytest.approx(0.5, abs=1e-15)
        assert table.min_index == 0
        assert table.max_index == 2

    def test_row_sums_equal_exponent(self, rng):
        # Degree-s homogeneity of the averaging map forces every row sum.
        for n in (2, 3, 4, 6):
            for x in smooth_orthant_coords(n, 20, rng):
                s = rng.uniform(0.05, 0.95)
                table = derivative_table(x, s)
                assert np.allclose(table.h.sum(axis=1), s, atol=1e-12)

    def test_extreme_rows_are_kronecker(self, rng):
        for x in smooth_orthant_coords(5, 10, rng):
            table = derivative_table(x, 0.3)
            hs = table.sorted_h
            assert np.allclose(hs[0], 0.3 * np.eye(5)[0], atol=1e-15)
            assert np.allclose(hs[-1], 0.3 * np.eye(5)[-1], atol=1e-15)

    def test_sign_pattern(self, rng):
        for x in smooth_orthant_coords(6, 20, rng):
            hs = derivative_table(x, 0.45).sorted_h
            for i in range(1, 5):
                assert hs[i, 0] >= 0.0
                assert hs[i, i] >= 0.0
                assert hs[i, -1] <= 0.0

    def test_matches_finite_differences(self, rng):
        for n in (3, 4, 5):
            for x in smooth_orthant_coords(n, 10, rng):
                s = rng.uniform(0.1, 0.9)
                exact = derivative_table(x, s).h
                approx = fd_derivative_table(x, s)
                assert np.max(np.abs(exact - approx)) <= 1e-6

    def test_tied_extremes_rejected(self):
        with pytest.raises(NonSmoothPointError):
            derivative_table(np.array([1.0, 1.0, 2.0]), 0.5)
        with pytest.raises(NonSmoothPointError):
            derivative_table(np.array([1.0, 2.0, 2.0]), 0.5)


class TestOperatorNorms:
    def test_low_dimensions_give_s(self, rng):
        assert thompson_opnorm_analytic(np.array([2.0]), 0.3) == 0.3
        x = np.array([1.0, 3.0])
        assert thompson_opnorm_analytic(x, 0.3) == 0.3
        assert hilbert_opnorm_analytic(x, 0.3) == 0.3
        assert thompson_opnorm_numeric(x, 0.3) == pytest.approx(0.3, abs=1e-15)
        assert hilbert_opnorm_numeric(x, 0.3) == pytest.approx(0.3, abs=1e-15)

    def test_collapsing_middle_gives_s(self):
        # Middle coordinate near the minimum: the norm falls back to s.
        x = np.array([1.0, 1.0 + 1e-8, 5.0])
        assert thompson_opnorm_analytic(x, 0.4) == pytest.approx(0.4, abs=1e-7)

    def test_extremal_family_reaches_cap_gamma(self):
        s, R = 0.5, 2.0
        sf = ScalarFunctions(s)
        x = np.array([1.0, math.exp(R) * (1.0 - 1e-9), math.exp(R)])
        assert thompson_opnorm_analytic(x, s) == pytest.approx(sf.cap_gamma(math.exp(-R)), abs=1e-7)
        assert hilbert_opnorm_analytic(x, s) == pytest.approx(sf.gamma(math.exp(-R)), abs=1e-7)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_analytic_equals_numeric(self, n, rng):
        for _ in range(200):
            x = np.exp(rng.uniform(-1.5, 1.5, n))
            s = rng.uniform(0.05, 0.95)
            assert abs(thompson_opnorm_analytic(x, s) - thompson_opnorm_numeric(x, s)) <= 1e-9
            assert abs(hilbert_opnorm_analytic(x, s) - hilbert_opnorm_numeric(x, s)) <= 1e-9

    def test_maximizing_pair_is_top_two(self, rng):
        # The optimum always pairs the second-largest row with the largest.
        for n in (3, 4, 6):
            for x in smooth_orthant_coords(n, 20, rng):
                _, pair = hilbert_opnorm_pair(x, 0.35)
                assert pair == (n - 2, n - 1)

    def test_bruteforce_and_section_constraint_agree(self, rng):
        # Restricting to the section tangent plane must not change the
        # norm: candidates are shifted along the kernel direction.
        for n in (3, 4, 5):
            for _ in range(10):
                x = np.exp(rng.uniform(-1, 1, n))
                s = rng.uniform(0.1, 0.9)
                free = hilbert_opnorm_bruteforce(x, s)
                constrained = hilbert_opnorm_bruteforce(x, s, functional=np.ones(n))
                reference = hilbert_opnorm_numeric(x, s)
                assert free == pytest.approx(reference, abs=1e-12)
                assert constrained == pytest.approx(reference, abs=1e-12)

    def test_norms_from_finite_differences(self, rng):
        for n in (3, 5):
            for x in smooth_orthant_coords(n, 8, rng):
                s = rng.uniform(0.1, 0.9)
                fd = fd_derivative_table(x, s)
                fd_thompson = float(np.abs(fd).sum(axis=1).max())
                diff = fd[:, None, :] - fd[None, :, :]
                fd_hilbert = float(np.clip(diff, 0.0, None).sum(axis=-1).max())
                assert fd_thompson == pytest.approx(thompson_opnorm_analytic(x, s), rel=1e-4)
                assert fd_hilbert == pytest.approx(hilbert_opnorm_analytic(x, s), rel=1e-4)


class TestBounds:
    def test_frozen_value_against_high_precision(self):
        # mpmath at 50 digits: 2*(1-e^'-1/2')/(1-e^-1) - 1/2
        assert bound_thompson(1.0, 0.5) == pytest.approx(0.7449186624037091, abs=1e-15)
        assert bound_hilbert(1.0, 0.5) == pytest.approx(0.6224593312018546, abs=1e-15)

    @pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
    def test_limits(self, s):
        assert abs(bound_thompson(1e-8, s) - s) <= 1e-6
        assert abs(bound_thompson(1e6, s) - (2.0 - s)) <= 1e-6
        assert abs(bound_hilbert(1e-8, s) - s) <= 1e-6
        assert abs(bound_hilbert(1e6, s) - 1.0) <= 1e-6

    @pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
    def test_strictly_increasing_in_radius(self, s):
        # Strict growth while increments are representable; once e^(-R)
        # underflows the value saturates at its limit, so only demand
        # monotone there.
        strict = np.logspace(-6, 1.5, 90)
        full = np.logspace(-6, 6, 120)
        for bound in (bound_thompson, bound_hilbert):
            values = np.array([bound(r, s) for r in strict])
            assert np.all(np.diff(values) > 0.0)
            saturating = np.array([bound(r, s) for r in full])
            assert np.all(np.diff(saturating) >= 0.0)

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            bound_thompson(0.0, 0.5)
        with pytest.raises(ValueError):
            bound_hilbert(1.0, 1.0)


class TestBusemannChecker:
    def test_degenerate_vertex_equality(self, rng):
        o = Orthant(3)
        u = random_point(o, rng)
        y = random_point(o, rng)
        report = check_busemann(u, u, y, Metric.THOMPSON)
        assert report.satisfied
        assert report.lhs == pytest.approx(report.rhs, abs=1e-12)

    @pytest.mark.parametrize("metric", [Metric.THOMPSON, Metric.HILBERT])
    def test_two_dimensional_orthant_always_holds(self, metric, rng):
        o = Orthant(2)
        for _ in range(300):
            u, x, y = (random_point(o, rng, spread=2.0) for _ in range(3))
            assert check_busemann(u, x, y, metric).satisfied

    def test_three_dimensional_search_is_recorded_not_asserted(self, rng):
        # In three dimensions the straight-line midpoints can violate the
        # halved-distance bound; the checker records the outcome either way.
        o = Orthant(3)
        outcomes = []
        for _ in range(2000):
            u, x, y = (random_point(o, rng, spread=2.0) for _ in range(3))
            outcomes.append(check_busemann(u, x, y, Metric.THOMPSON).satisfied)
        report = check_busemann(random_point(o, rng), random_point(o, rng),
                                random_point(o, rng), Metric.THOMPSON)
        assert isinstance(report.satisfied, bool)
        assert report.to_dict()["kind"] == "busemann"
        # Violations exist for this sampler; record the observation.
        assert not all(outcomes)


class TestContractionChecker:
    def test_coincident_points(self, rng):
        o = Orthant(3)
        u = random_point(o, rng)
        report = check_contraction(u, u, u, 0.5, Metric.THOMPSON)
        assert report.satisfied
        assert report.lhs == 0.0

    @pytest.mark.parametrize("cone", [Orthant(2), LorentzCone(3), SymPDCone(2)],
                             ids=lambda c: c.kind)
    @pytest.mark.parametrize("metric", [Metric.THOMPSON, Metric.HILBERT])
    def test_flat_span_respects_factor_s(self, cone, metric, rng):
        for _ in range(100):
            u = random_point(cone, rng)
            z = random_point(cone, rng)
            a, b, c, d = np.exp(rng.uniform(-1, 1, 4))
            x = cone.point(a * u.coords + b * z.coords)
            y = cone.point(c * u.coords + d * z.coords)
            s = rng.uniform(0.05, 0.95)
            report = check_contraction(u, x, y, s, metric)
            assert report.details["span_dim"] <= 2
            assert report.details["flat_satisfied"]

    @pytest.mark.parametrize("metric", [Metric.THOMPSON, Metric.HILBERT])
    def test_near_extremal_configuration_is_tight(self, metric):
        # Perturbing along the maximizing direction realizes the norm, so
        # the observed ratio must land within 5% of the bound.
        s, R = 0.5, 2.0
        o = Orthant(3)
        u = o.point(np.ones(3))
        base = np.array([1.0, math.exp(R) * (1.0 - 1e-6), math.exp(R)])
        direction = np.array([1.0, 1.0, -1.0]) if metric is Metric.THOMPSON else np.array([1.0, 1.0, 0.0])
        eta = 1e-5
        x = o.point(base)
        y = o.point(base * np.exp(eta * direction))
        report = check_contraction(u, x, y, s, metric)
        assert report.satisfied
        achieved = report.lhs / (report.rhs / report.details["factor"])
        assert achieved >= 0.95 * report.details["factor"]

    def test_report_serialization_fields(self, rng):
        o = Orthant(3)
        u, x, y = (random_point(o, rng) for _ in range(3))
        data = check_contraction(u, x, y, 0.5, Metric.HILBERT).to_dict()
        for key in ("lhs", "rhs", "R", "s", "satisfied", "witness_points", "span_dim"):
            assert key in data


class TestSemihyperbolicChecker:
    def test_identical_tracks(self, rng):
        o = Orthant(4)
        x, y = random_point(o, rng), random_point(o, rng)
        report = check_semihyperbolic(x, y, x, y, 1.0, Metric.THOMPSON)
        assert report.lhs == 0.0
        assert report.satisfied

    @pytest.mark.parametrize("metric", [Metric.THOMPSON, Metric.HILBERT])
    def test_perturbed_quadruples_stay_within_eight(self, metric, rng):
        o = Orthant(4)
        for _ in range(200):
            x, y = random_point(o, rng, spread=1.5), random_point(o, rng, spread=1.5)
            shift = 0.5 if metric is Metric.HILBERT else 1.0
            x2 = o.point(x.coords * np.exp(rng.uniform(-shift, shift, 4)))
            y2 = o.point(y.coords * np.exp(rng.uniform(-shift, shift, 4)))
            t = rng.uniform(0.0, 5.0)
            assert check_semihyperbolic(x, y, x2, y2, t, metric).satisfied

    def test_precondition_violation_raises(self, rng):
        o = Orthant(4)
        x, y = random_point(o, rng), random_point(o, rng)
        x_far = o.point(x.coords * math.e**2)
        with pytest.raises(ValueError):
            check_semihyperbolic(x, y, x_far, y, 1.0, Metric.THOMPSON)
