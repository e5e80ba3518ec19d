import pytest

from core.core_model import Tolerances
from core.errors import PreconditionUnmet, R0Zero
from engine.oracle_harness import GenConfig, gen_irreducible_split, gen_split
from engine.trichotomy import (TrichotomyCase, classify, classify_strict,
                               verify_unit_radius)


class TestClassify:
    def test_supercritical(self, worked_split, r_a_worked):
        verdict = classify(worked_split)
        assert verdict.case == TrichotomyCase.SUPERCRITICAL_A
        assert verdict.r0 == pytest.approx(1.5, abs=1e-9)
        assert verdict.rA == pytest.approx(r_a_worked, abs=1e-9)
        assert not verdict.strict
        assert not verdict.boundary_flag

    def test_subcritical(self, subcritical_split):
        verdict = classify(subcritical_split)
        assert verdict.case == TrichotomyCase.SUBCRITICAL_C
        assert verdict.r0 == pytest.approx(0.375, abs=1e-9)
        assert verdict.rA == pytest.approx(0.5, abs=1e-9)

    def test_critical(self, split_of):
        verdict = classify(split_of([[0]], [[1]]))
        assert verdict.case == TrichotomyCase.CRITICAL_B
        assert verdict.boundary_flag

    def test_zero_fertility_is_subcritical(self, split_of):
        verdict = classify(split_of([[0, 0], [0.5, 0]], [[0, 0], [0, 0]]))
        assert verdict.case == TrichotomyCase.SUBCRITICAL_C
        assert verdict.r0 == 0.0

    def test_describe(self, worked_split):
        assert classify(worked_split).describe() == "case (a): R0=1.5 ≥ r(A)=1.3660254 > 1"

    def test_tolerance_band_widens_case_b(self, split_of):
        verdict = classify(split_of([[0]], [[1.001]]), Tolerances(tol_eq=1e-2))
        assert verdict.case == TrichotomyCase.CRITICAL_B

    @pytest.mark.parametrize("target", [0.1, 0.5, 0.9])
    def test_random_instances_satisfy_case_inequalities(self, target):
        for seed in range(25):
            sys = gen_split(GenConfig(seed=seed, target_rT=target))
            verdict = classify(sys)
            if verdict.case == TrichotomyCase.SUPERCRITICAL_A:
                assert verdict.r0 >= verdict.rA - 1e-7
            elif verdict.case == TrichotomyCase.SUBCRITICAL_C:
                assert verdict.r0 <= verdict.rA + 1e-7


class TestVerifyUnitRadius:
    def test_worked_example(self, worked_split):
        assert verify_unit_radius(worked_split) == pytest.approx(1.0, abs=1e-8)

    def test_scalar(self, split_of):
        assert verify_unit_radius(split_of([[0]], [[3]])) == pytest.approx(1.0, abs=1e-12)

    def test_zero_fertility(self, split_of):
        with pytest.raises(R0Zero):
            verify_unit_radius(split_of([[0.5]], [[0]]))


class TestClassifyStrict:
    def test_certified(self, worked_split):
        verdict = classify_strict(worked_split)
        assert verdict.strict
        assert verdict.unmet_preconditions == []
        assert verdict.describe() == "case (a): R0=1.5 > r(A)=1.3660254 > 1"

    def test_zero_transition(self, split_of):
        verdict = classify_strict(split_of([[0, 0], [0, 0]], [[1, 1], [0, 0]]))
        assert not verdict.strict
        assert "T is the zero operator" in verdict.unmet_preconditions

    def test_reducible(self, split_of):
        sys = split_of([[0.5, 0], [0, 0.5]], [[0, 0], [0, 1.5]])
        with pytest.raises(PreconditionUnmet) as info:
            classify_strict(sys, require=True)
        assert "A is reducible" in info.value.unmet
        assert classify(sys).case == TrichotomyCase.SUPERCRITICAL_A

    def test_zero_r0(self, split_of):
        verdict = classify_strict(split_of([[0, 0.5], [0.5, 0]], [[0, 0], [0, 0]]))
        assert verdict.unmet_preconditions == ["R0 is zero"]

    def test_random_irreducible_instances_are_strict(self):
        for seed in range(40):
            sys = gen_irreducible_split(GenConfig(seed=seed, n_max=6))
            verdict = classify(sys)
            if verdict.r0 <= 1e-6 or abs(verdict.r0 - 1.0) <= 1e-3:
                continue
            strict = classify_strict(sys, require=True)
            assert strict.strict
            assert abs(strict.r0 - strict.rA) > 1e-7
