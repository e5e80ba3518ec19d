import numpy as np
import pytest

from core.errors import (BadRange, CaseOneCurve, LambdaTooSmall, NearBoundary)
from engine.resolvent_ngm import (CurveCase, bisect_radius, clamp_nonnegative,
                                  curve, factorization_discrepancy,
                                  neumann_resolvent, next_generation, r0,
                                  resolvent_A, resolvent_T)


class TestResolvent:
    def test_nilpotent_transition(self, worked_split):
        np.testing.assert_allclose(resolvent_T(worked_split, 1.0), [[1, 0], [0.5, 1]], atol=1e-15)

    def test_zero_transition(self, split_of):
        sys = split_of([[0, 0], [0, 0]], [[0, 0], [0, 0]])
        np.testing.assert_allclose(resolvent_T(sys, 2.0), 0.5 * np.eye(2))

    def test_scalar(self, split_of):
        np.testing.assert_allclose(resolvent_T(split_of([[0.5]], [[0]]), 1.0), [[2.0]])

    def test_lambda_at_r_t_is_rejected(self, split_of):
        with pytest.raises(LambdaTooSmall):
            resolvent_T(split_of([[0.5]], [[0]]), 0.5)

    def test_agrees_with_neumann_series(self, split_of):
        sys = split_of([[0.2, 0.3], [0.1, 0.4]], [[1, 0], [0, 1]])
        np.testing.assert_allclose(resolvent_T(sys, 1.0), neumann_resolvent(sys, 1.0, 200), rtol=1e-10)


class TestNeumann:
    def test_terminates_for_nilpotent(self, worked_split):
        np.testing.assert_array_equal(neumann_resolvent(worked_split, 1.0, 2), [[1, 0], [0.5, 1]])

    def test_geometric_series(self, split_of):
        np.testing.assert_allclose(neumann_resolvent(split_of([[0.5]], [[0]]), 1.0, 30), [[2.0]], atol=1e-8)

    def test_single_term_is_identity(self, split_of):
        np.testing.assert_array_equal(neumann_resolvent(split_of([[0]], [[0]]), 1.0, 1), [[1.0]])

    @pytest.mark.parametrize("lam", [1.0, 2.0])
    def test_tail_shrinks_at_rate_r_t_over_lambda(self, split_of, lam):
        # r(T) = 0.5, second eigenvalue 0.1
        sys = split_of([[0.2, 0.3], [0.1, 0.4]], [[0, 1], [1, 0]])
        exact = resolvent_T(sys, lam)
        gaps = [np.max(np.abs(neumann_resolvent(sys, lam, terms) - exact)) for terms in range(8, 15)]
        for before, after in zip(gaps, gaps[1:]):
            assert after / before == pytest.approx(sys.r_T / lam, rel=1e-3)

    def test_needs_one_term(self, worked_split):
        with pytest.raises(BadRange):
            neumann_resolvent(worked_split, 1.0, 0)


class TestNextGeneration:
    def test_worked_example(self, worked_split):
        np.testing.assert_allclose(next_generation(worked_split, 1.0).entries, [[1.5, 1], [0, 0]])

    def test_zero_fertility(self, split_of):
        assert next_generation(split_of([[0.3]], [[0]]), 2.0).is_zero()

    def test_scalar(self, split_of):
        np.testing.assert_allclose(next_generation(split_of([[0]], [[1]]), 2.0).entries, [[0.5]])


class TestR0:
    def test_worked_example(self, worked_split):
        assert r0(worked_split).radius == pytest.approx(1.5, abs=1e-9)

    def test_zero_fertility(self, split_of):
        assert r0(split_of([[0, 0], [0.5, 0]], [[0, 0], [0, 0]])).radius == 0.0

    def test_scaling_of_fertility(self, subcritical_split):
        assert r0(subcritical_split).radius == pytest.approx(0.375, abs=1e-9)


class TestCurve:
    def test_worked_example(self, worked_split):
        sample = curve(worked_split, 1.0, 3.0, 5)
        assert sample.radii[0] == pytest.approx(1.5, abs=1e-9)
        assert all(b < a for a, b in zip(sample.radii, sample.radii[1:]))
        assert sample.monotone_ok and sample.convex_ok

    def test_zero_fertility(self, split_of):
        sample = curve(split_of([[0.5]], [[0]]), 1.0, 2.0, 4)
        assert sample.radii == [0.0] * 4
        assert sample.monotone_ok and sample.convex_ok
        assert sample.max_violation == 0.0

    def test_scalar_is_one_over_lambda(self, split_of):
        sample = curve(split_of([[0]], [[1]]), 1.0, 4.0, 7)
        np.testing.assert_allclose(sample.radii, [1.0 / lam for lam in sample.lambdas], rtol=1e-9)

    def test_workers_do_not_change_values(self, worked_split):
        assert curve(worked_split, 1.0, 3.0, 9, workers=4).points == curve(worked_split, 1.0, 3.0, 9).points

    @pytest.mark.parametrize("lo, hi, samples", [(0.0, 2.0, 5), (2.0, 1.0, 5), (1.0, 2.0, 2)])
    def test_bad_range(self, split_of, lo, hi, samples):
        with pytest.raises(BadRange):
            curve(split_of([[0.5]], [[1]]), lo, hi, samples)


class TestBisectRadius:
    def test_worked_example(self, worked_split, r_a_worked):
        result = bisect_radius(worked_split)
        assert result.curve_case == CurveCase.CROSSES_ONE
        assert result.radius == pytest.approx(r_a_worked, abs=1e-8)
        assert result.discrepancy <= 1e-6

    def test_scalar(self, split_of):
        assert bisect_radius(split_of([[0]], [[2]])).lambda_star == pytest.approx(2.0, abs=1e-8)

    def test_below_one_returns_r_a(self, subcritical_split):
        result = bisect_radius(subcritical_split)
        assert result.curve_case == CurveCase.BELOW_ONE
        assert result.lambda_star is None
        assert result.radius == pytest.approx(0.5, abs=1e-9)

    def test_strict_case_two(self, subcritical_split):
        with pytest.raises(CaseOneCurve) as info:
            bisect_radius(subcritical_split, strict_case_two=True)
        assert info.value.r_A == pytest.approx(0.5, abs=1e-9)

    def test_near_boundary(self, split_of):
        with pytest.raises(NearBoundary):
            bisect_radius(split_of([[0]], [[1]]))


class TestFactorization:
    def test_resolvent_of_a(self, worked_split, r_a_worked):
        lam = r_a_worked + 1.0
        expected = np.linalg.inv(lam * np.eye(2) - worked_split.A.entries)
        np.testing.assert_allclose(resolvent_A(worked_split, lam), expected, rtol=1e-10)

    def test_discrepancy_is_roundoff(self, worked_split, r_a_worked):
        assert factorization_discrepancy(worked_split, r_a_worked + 1.0) <= 1e-10

    def test_below_r_a(self, worked_split):
        with pytest.raises(LambdaTooSmall):
            factorization_discrepancy(worked_split, 1.2)


class TestClamp:
    def test_roundoff_is_clamped(self):
        matrix = np.array([[1.0, -1e-17], [0.0, 1.0]])
        clamped, magnitude = clamp_nonnegative(matrix)
        assert clamped[0, 1] == 0.0
        assert magnitude == pytest.approx(1e-17)

    def test_untouched_when_nonnegative(self):
        matrix = np.eye(2)
        clamped, magnitude = clamp_nonnegative(matrix)
        assert clamped is matrix
        assert magnitude == 0.0
